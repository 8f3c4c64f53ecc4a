# coding: utf-8

# # The peg in one session
#
# A Perp contract has no expiry, yet its price ends up following Spot. Here we run one default
# session and look at how closely it does.

# In[1]:

import numpy as np

from perp_abm import SimulationConfig, run_session, shewhart


# Defaults: 200 traders, 4 act per step, orders live for 8 steps, and 250 warm-up steps out of 1000.

# In[2]:

config = SimulationConfig(seed=7)
result = run_session(config)
w = config.warmup_steps
print(config.to_dict())


# The warm-up stretch is just Spot plus uniform noise, so only the part after it is of interest.

# In[3]:

tail = result.premium_tail()
print("spot  first/last:", result.spot[w].round(2), result.spot[-1].round(2))
print("perp  first/last:", result.perp[w].round(2), result.perp[-1].round(2))
print("premium mean %.3f  std %.3f  min %.2f  max %.2f" % (tail.mean(), tail.std(), tail.min(), tail.max()))


# In[4]:

for t in range(w, len(result.spot), 75):
    print(f"t={t:4d}  spot={result.spot[t]:8.2f}  perp={result.perp[t]:8.2f}  premium={result.premium[t]:+6.2f}")


# The premium hovers near zero with a small positive lean. Across seeds the mean sits a unit or
# so above zero.

# In[5]:

centers = [shewhart(run_session(config.replace(seed=s)).premium_tail()).center for s in range(10)]
np.round(centers, 2)
