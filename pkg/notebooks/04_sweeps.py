# coding: utf-8

# # Parameter sweeps
#
# Each sweep point averages the chart statistics over several sessions. Every point uses the
# same session seeds, so row-to-row differences come from the parameter itself.
# N_SIMS is kept small so this runs in well under a minute; the acceptance suite uses 100.

# In[1]:

from perp_abm import SimulationConfig, run_sweep

N_SIMS = 10
base = SimulationConfig()


def show(report):
    print(f"{report.param_name:>8} {'center':>8} {'lcl':>8} {'ucl':>8} {'viol':>7} {'runs':>7}")
    for value, row in zip(report.values, report.rows):
        print(f"{value:8g} {row.center:8.2f} {row.lcl:8.2f} {row.ucl:8.2f} {row.violations:7.1f} {row.runs:7.1f}")


# Bias: a low bias sends most traders to basis trading, and the premium sits well above zero.

# In[2]:

show(run_sweep(base, "bias", [0.05, 0.2, 0.35, 0.5], N_SIMS))


# Order lifetime: a deeper book (larger tau) narrows the limits, and more points fall outside them.

# In[3]:

show(run_sweep(base, "tau", [2, 4, 8, 12], N_SIMS))


# Spread cap: over the full range, wider quotes give slightly more violations and runs. With only
# a few sessions per point the middle rows are noisy.

# In[4]:

show(run_sweep(base, "k_max", [0.1, 0.3, 0.5], N_SIMS))


# Chartist horizon: no visible effect on the center.

# In[5]:

show(run_sweep(base, "l_max", [5, 10, 15, 20], N_SIMS))
