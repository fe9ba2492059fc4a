"""With random services, scheduled input matches a fixed schedule at
diffusion scale.

Lambda(s) feeds customer k's work at the k-th scheduled-stream arrival;
Lambda'(s) feeds the same draws at integer times.  Their centered sup gap,
divided by sqrt(t), vanishes as t grows, and the diffusion-scale variance of
the cumulative input matches the service variance alone: the arrival
randomness is invisible at this scale.
"""
import math

import numpy as np

from schedq import ServiceSpec, TwoSidedPareto, generate_path, sup_centered_diff
from schedq.experiments import rep_stream, summarize
from schedq.traffic import count

model = TwoSidedPareto(0.25, 2.0, 0.25, 2.0)
services = ServiceSpec("exp")
REPS = 100

print(f"median (1/sqrt(t)) sup |Lambda - Lambda'| over {REPS} paths, exp(1) services")
for t in (1e3, 1e4, 1e5):
    vals = np.empty(REPS)
    for r in range(REPS):
        g = rep_stream(99, f"demo-fclt/{t}", r)
        path = generate_path(model, (0.0, t), None, g, eps=1e-5)
        vals[r] = sup_centered_diff(path, services, t, stream=g)
    s = summarize(vals)
    print(f"  t = 1e{int(math.log10(t))}: median {s.median:.4f} "
          f"(quartiles {s.q1:.4f} .. {s.q3:.4f})")

n = 20_000
lam = np.empty(200)
for r in range(200):
    g = rep_stream(98, "demo-fclt-var", r)
    path = generate_path(model, (0.0, float(n)), None, g, eps=1e-5)
    v = services.sample(count(path, float(n)), g)
    lam[r] = (v.sum() - n) / math.sqrt(n)
print(f"\nsample variance of n^-1/2 (Lambda(n) - n) at n = {n}: "
      f"{np.var(lam, ddof=1):.3f}  (service variance = {services.variance})")
