# coding: utf-8

# # Reading a premium series as a control chart
#
# An individuals chart gives five numbers per series: the center, a sigma estimated from
# the moving range, the lower and upper limits, and two counts of unusual points.

# In[1]:

from pathlib import Path

import numpy as np

from perp_abm import SimulationConfig, run_session, shewhart
from perp_abm.analytics import svg_control_chart


# A toy series first, so the counts can be checked by eye. The mean is 1, the eight 2s form a
# run above it, and the 1s sit exactly on the center line, so they break runs and count for
# neither side.

# In[2]:

toy = np.array([0, 1, 0, 1, 0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 0, 1, 0, 0, 0, 0.0])
s = shewhart(toy)
print(s)


# Now a real session.

# In[3]:

result = run_session(SimulationConfig(seed=3))
summary = shewhart(result.premium_tail())
for name, value in summary.__dict__.items():
    print(f"{name:>10}: {value:8.3f}")


# Violations are rare next to runs: the premium is strongly autocorrelated, so it spends long
# stretches on one side of its mean.

# In[4]:

out = Path("notebook_output")
out.mkdir(exist_ok=True)
chart = svg_control_chart(result.premium_tail(), summary, x0=result.warmup_steps)
(out / "control_chart.svg").write_text(chart)
print("wrote", out / "control_chart.svg")
