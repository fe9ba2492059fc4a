"""Stationary workload in heavy traffic, on the log / log log scale.

The stationary workload of this queue grows like (1/alpha) * log(1/(1-rho))
/ log log(1/(1-rho)) as utilization rho tends to one: far slower than the
1/(1-rho) blowup of a renewal-fed queue.  Each sample below simulates from
empty over a horizon of 20/(1-rho), the equilibration time scale.
"""
import math

import numpy as np

from schedq import TwoSidedPareto, steady_workload_sample
from schedq.experiments import rep_stream, summarize

model = TwoSidedPareto(0.25, 2.0, 0.25, 2.0)
REPS = 150

print(f"pareto alpha=2, {REPS} stationary samples per utilization")
print(" rho     scaled median    quartiles        raw median W")
for rho in (0.8, 0.9, 0.99):
    vals = np.empty(REPS)
    for r in range(REPS):
        g = rep_stream(777, f"demo-heavy/{rho}", r)
        vals[r] = steady_workload_sample(model, rho, 20.0, g, eps=1e-6)
    norm = math.log(math.log(1.0 / (1.0 - rho))) / math.log(1.0 / (1.0 - rho))
    s = summarize(vals * norm)
    print(f"{rho:5.2f}   {s.median:10.3f}    {s.q1:6.3f} .. {s.q3:6.3f}   "
          f"{np.median(vals):10.2f}")
print("\nscaled medians drift toward 1/alpha = 0.5 as rho -> 1")
