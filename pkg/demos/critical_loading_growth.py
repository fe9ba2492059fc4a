"""Workload growth at exactly critical load (unit jobs, unit service rate).

With punctual arrivals the workload never exceeds one job.  With Pareto
perturbations it grows, but only like (1/alpha) * log t / log log t: the
scaled medians below hover around 1/alpha = 0.5 across decades (convergence
is slow, so finite-t values sit above the limit).
"""
import math

import numpy as np

from schedq import TwoSidedPareto, Degenerate, generate_path, workload
from schedq.experiments import rep_stream, summarize

T_GRID = [1e3, 1e4, 1e5]
REPS = 120

for model, label in ((TwoSidedPareto(0.25, 2.0, 0.25, 2.0), "pareto alpha=2"),
                     (Degenerate(), "punctual")):
    print(f"{label}: scaled medians of W(t) * log log t / log t over {REPS} paths")
    for t in T_GRID:
        vals = np.empty(REPS)
        for r in range(REPS):
            g = rep_stream(4242, f"demo-critical/{t}", r)
            path = generate_path(model, (0.0, t), None, g, eps=1e-5)
            vals[r] = workload(path, 1.0, [t]).grid_values[0]
        s = summarize(vals * math.log(math.log(t)) / math.log(t))
        print(f"  t = 1e{int(math.log10(t))}: median {s.median:.3f} "
              f"(quartiles {s.q1:.3f} .. {s.q3:.3f}), raw median W = "
              f"{np.median(vals):.2f}")
    print()
print("reference level: 1/alpha = 0.5 for the Pareto model; 0 for punctual")
