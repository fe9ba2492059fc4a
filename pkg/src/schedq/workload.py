"""Single-server workloads driven by scheduled arrival paths.

The server drains work at rate ``1/rho``; customer ``k`` brings ``V_k`` units
of work (unit jobs by default, matching the deterministic-service queue the
growth laws are stated for).  Starting empty at the window's left edge,

    W(t) = max over s <= t of [net input on (s, t]]

which is evaluated in O(n) through the running-minimum form of the Lindley
recursion; the brute-force maximum is kept as a test oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .perturbation import PerturbationModel
from .traffic import ArrivalPath, generate_path

__all__ = [
    "ServiceSpec",
    "WorkloadTrace",
    "steady_workload_sample",
    "sup_centered_diff",
    "workload",
]


@dataclass(frozen=True)
class ServiceSpec:
    """Mean-one service requirement family.

    ``unit`` is the deterministic service of the scheduled/deterministic
    queue; ``exp`` and ``uniform`` (on [0.5, 1.5]) cover the random-service
    results, both with all moments finite.
    """

    kind: str

    _KINDS = ("unit", "exp", "uniform")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown service kind {self.kind!r}; one of {self._KINDS}")

    @property
    def variance(self) -> float:
        return {"unit": 0.0, "exp": 1.0, "uniform": 1.0 / 12.0}[self.kind]

    @property
    def deterministic(self) -> bool:
        return self.kind == "unit"

    def sample(self, k: int, stream: Optional[np.random.Generator]) -> np.ndarray:
        if self.kind == "unit":
            return np.ones(k)
        if stream is None:
            raise ValueError(f"{self.kind!r} services need a random stream")
        if self.kind == "exp":
            return stream.exponential(1.0, size=k)
        return stream.uniform(0.5, 1.5, size=k)


@dataclass(frozen=True)
class WorkloadTrace:
    """Workload evaluated just after each arrival and on a query grid."""

    rho: float
    arrival_times: np.ndarray
    after_jump: np.ndarray
    grid_times: np.ndarray
    grid_values: np.ndarray


def _lindley_state(arrivals: np.ndarray, sizes: np.ndarray, t0: float, rho: float):
    """Cumulative input and running minimum driving the workload formula.

    With X(t) = sum of sizes arrived by t minus (t - t0)/rho, the workload is
    W(t) = X(t) - min(0, inf_{s<=t} X(s)); the infimum over the piecewise
    linear X is attained just before an arrival or at the endpoints.
    """
    cum = np.cumsum(sizes)
    drift = (arrivals - t0) / rho
    pre_jump = np.concatenate([[0.0], cum[:-1]]) - drift
    run_min = np.minimum(np.minimum.accumulate(pre_jump), 0.0) if len(arrivals) else np.zeros(0)
    return cum, run_min


def workload(
    path: ArrivalPath,
    rho: float,
    grid: Sequence[float],
    services: ServiceSpec = ServiceSpec("unit"),
    stream: Optional[np.random.Generator] = None,
) -> WorkloadTrace:
    """Workload trace from an arrival path, empty at the window start.

    Equivalent to the recursion W(a_k+) = max(W(a_{k-1}+) - (a_k - a_{k-1})/rho, 0) + V_k
    followed by linear drain to the grid points."""
    if not (0.0 < rho <= 1.0):
        raise ValueError("rho must lie in (0, 1]")
    grid = np.asarray(grid, dtype=float)
    t0, t1 = path.window
    if grid.size and (grid.min() < t0 or grid.max() > t1):
        raise ValueError("grid must lie inside the path window")

    arrivals = path.entries_time
    sizes = services.sample(arrivals.size, stream)
    cum, run_min = _lindley_state(arrivals, sizes, t0, rho)
    after = cum - (arrivals - t0) / rho - run_min if arrivals.size else np.zeros(0)

    k = np.searchsorted(arrivals, grid, side="right")
    cum_k = np.concatenate([[0.0], cum])[k]
    min_k = np.concatenate([[0.0], run_min])[k]
    values = np.maximum(cum_k - (grid - t0) / rho - min_k, 0.0)
    return WorkloadTrace(
        rho=rho,
        arrival_times=arrivals,
        after_jump=after,
        grid_times=grid,
        grid_values=values,
    )


def sup_centered_diff(
    path: ArrivalPath,
    services: ServiceSpec,
    t: float,
    stream: Optional[np.random.Generator] = None,
) -> float:
    """(1/sqrt(t)) * sup over s in [0, t] of |Lambda(s) - Lambda'(s)|, where
    Lambda feeds customer k's work at the k-th scheduled-stream arrival and
    Lambda' feeds the same work at integer time k.  The same service draws
    back both processes."""
    t0 = path.window[0]
    if t0 > 0.0 or t > path.window[1] or t <= 0.0:
        raise ValueError("need a path window covering (0, t]")
    n_arr = int(np.searchsorted(path.entries_time, t, side="right"))
    n_int = int(math.floor(t))
    v = services.sample(max(n_arr, n_int), stream)

    times = np.concatenate([path.entries_time[:n_arr], np.arange(1, n_int + 1, dtype=float)])
    deltas = np.concatenate([v[:n_arr], -v[:n_int]])
    kind = np.concatenate([np.zeros(n_arr, dtype=np.int8), np.ones(n_int, dtype=np.int8)])
    order = np.lexsort((kind, times))
    diff = np.cumsum(deltas[order])
    sup = float(np.max(np.abs(diff))) if diff.size else 0.0
    return sup / math.sqrt(t)


def steady_workload_sample(
    model: PerturbationModel,
    rho: float,
    horizon_mult: float,
    stream: np.random.Generator,
    eps: float = 1e-6,
    services: ServiceSpec = ServiceSpec("unit"),
) -> float:
    """One approximate draw of the stationary workload at utilization rho.

    Simulates from empty over a horizon of ``horizon_mult / (1 - rho)``
    (the equilibration time scale of this queue is of order 1/(1-rho)) and
    returns the terminal workload."""
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0, 1) for a stationary workload")
    if horizon_mult <= 0.0:
        raise ValueError("horizon_mult must be positive")
    horizon = horizon_mult / (1.0 - rho)
    path = generate_path(model, (0.0, horizon), None, stream, eps=eps)
    trace = workload(path, rho, [horizon], services=services, stream=stream)
    return float(trace.grid_values[0])
