"""Scheduled arrival paths and their counting statistics.

The scheduled stream places customer ``i`` (``i`` ranging over all integers)
at time ``i + U + xi_i`` where ``U`` is one uniform shared by the whole path
and the ``xi_i`` are i.i.d. perturbations.  A path realization keeps every
sampled index in a padded scan range around the observation window, so the
counting process ``N``, the early/late counts and the exact decomposition
identity can all be evaluated from the same draw.

Truncation is certified: the scan padding ``B`` is chosen from the model's
exact survival so that the expected number of arrivals missed by the scan is
below ``truncation_eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import zeta

from .perturbation import Degenerate, PerturbationModel, TwoSidedExp, TwoSidedPareto

__all__ = [
    "ArrivalPath",
    "MarginError",
    "ScanBudgetError",
    "conditional_cov",
    "count",
    "decomposition_residual",
    "early_late",
    "generate_path",
    "path_to_csv",
    "sample_limit_rv",
    "scan_pad",
]

_MAX_SCAN = 1 << 27  # hard cap on sampled indices per path (~1 GB of floats)


class MarginError(ValueError):
    """Query time outside the observable part of the path."""


class ScanBudgetError(RuntimeError):
    """The requested truncation needs more samples than the per-path budget."""


def _abs_tail(model: PerturbationModel, x: float) -> float:
    """P(xi > x) + P(xi <= -x)."""
    return float(model.survival(x)) + float(model.cdf(-x))


def scan_pad(model: PerturbationModel, window_len: float, eps: float) -> int:
    """Smallest integer padding B such that scanning schedule indices within
    distance B of the window misses at most ``eps`` arrivals in expectation.

    The certified bound telescopes the per-index interval probabilities into
    single tails: expected misses <= ceil(T) * (P(xi > B-1) + P(xi <= -(B-1))).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if isinstance(model, Degenerate):
        return 1
    d = math.ceil(max(window_len, 1.0))

    def ok(b: int) -> bool:
        return d * _abs_tail(model, b - 1.0) <= eps

    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > 1 << 62:
            raise ScanBudgetError("perturbation tails do not admit a finite scan pad")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ArrivalPath:
    """One realization of the scheduled stream on ``(t_lo, t_hi]``.

    ``entries_*`` hold the in-window arrivals sorted by time (ties broken by
    schedule index); ``scan_*`` hold every sampled index in the padded range,
    in schedule order, which is what the early/late counts are computed from.
    """

    u: float
    window: Tuple[float, float]
    truncation_eps: float
    pad: int
    scan_index: np.ndarray
    scan_time: np.ndarray
    entries_index: np.ndarray
    entries_time: np.ndarray

    @property
    def t_lo(self) -> float:
        return self.window[0]

    @property
    def t_hi(self) -> float:
        return self.window[1]

    def _check_in_window(self, t: float) -> None:
        if not (self.t_lo <= t <= self.t_hi):
            raise MarginError(
                f"t={t!r} outside the observable window [{self.t_lo}, {self.t_hi}]"
            )


def generate_path(
    model: PerturbationModel,
    window: Tuple[float, float],
    u: Optional[float],
    stream: np.random.Generator,
    eps: float = 1e-10,
) -> ArrivalPath:
    """Sample one arrival path; ``u=None`` draws the common uniform fresh.

    Reproducible given (model, window, u, stream state): the common uniform
    (when fresh) is drawn first, then one uniform per scanned index.
    """
    t_lo, t_hi = float(window[0]), float(window[1])
    if not (t_hi > t_lo):
        raise ValueError("window must be non-empty")
    if u is None:
        u = float(stream.random())
    elif not (0.0 < u < 1.0):
        raise ValueError("u must lie in (0, 1)")

    pad = scan_pad(model, t_hi - t_lo, eps)
    i_lo = math.ceil(t_lo - pad)
    i_hi = math.floor(t_hi + pad)
    n_scan = i_hi - i_lo + 1
    if n_scan > _MAX_SCAN:
        raise ScanBudgetError(
            f"scan of {n_scan} indices exceeds the per-path budget; "
            f"relax eps (currently {eps:g}) or shrink the window"
        )
    idx = np.arange(i_lo, i_hi + 1, dtype=np.int64)
    xi = model.sample(stream, size=n_scan)
    times = idx + u + xi

    mask = (times > t_lo) & (times <= t_hi)
    ein, et = idx[mask], times[mask]
    order = np.lexsort((ein, et))
    ein, et = ein[order], et[order]
    for a in (idx, times, ein, et):
        a.flags.writeable = False
    return ArrivalPath(
        u=u,
        window=(t_lo, t_hi),
        truncation_eps=eps,
        pad=pad,
        scan_index=idx,
        scan_time=times,
        entries_index=ein,
        entries_time=et,
    )


def count(path: ArrivalPath, t: float) -> int:
    """N-count of arrivals in (window start, t]; right-continuous in t."""
    path._check_in_window(t)
    return int(np.searchsorted(path.entries_time, t, side="right"))


def early_late(path: ArrivalPath, t: float) -> Tuple[int, int]:
    """(E, L): customers early at t (scheduled after t, arrived by t) and
    late at t (scheduled by t, arriving after t).

    The scan padding already covers every index that can contribute more
    than ``truncation_eps`` in expectation for any t inside the window."""
    path._check_in_window(t)
    sched = path.scan_index + path.u
    e = int(np.count_nonzero((sched > t) & (path.scan_time <= t)))
    l = int(np.count_nonzero((sched <= t) & (path.scan_time > t)))
    return e, l


def decomposition_residual(path: ArrivalPath, t: float) -> int:
    """N(t) - t minus its schedule-count / early / late decomposition.

    The identity is pathwise and exact over any index set, so the residual
    must be exactly zero; it is returned in integer arithmetic (the two -t
    terms cancel)."""
    if t < 0.0:
        raise MarginError("t must be >= 0 for the decomposition")
    path._check_in_window(t)
    path._check_in_window(0.0)
    n_t = count(path, t) - count(path, 0.0)
    sched_count = int(math.floor(t - path.u)) + 1 if t >= path.u else 0
    e_t, l_t = early_late(path, t)
    e_0, l_0 = early_late(path, 0.0)
    return n_t - (sched_count + (e_t - l_t) - (e_0 - l_0))


def conditional_cov(
    model: PerturbationModel, u: float, n: int, eps: float = 1e-12
) -> float:
    """Conditional covariance of the unit-interval counts at lag n given U=u:

        -sum_i P(i + xi + u in (0,1]) * P(i + xi + u in (n-1,n])

    evaluated exactly by summation over a truncated index range whose
    remainder is below ``eps``.  Always <= 0."""
    if n < 2:
        raise ValueError("n must be >= 2 (disjoint unit intervals)")
    if not (0.0 < u < 1.0):
        raise ValueError("u must lie in (0, 1)")
    if isinstance(model, Degenerate):
        return 0.0

    def ok(m: int) -> bool:
        return _abs_tail(model, float(m)) <= eps

    m = 2
    while not ok(m):
        m *= 2
        if m > _MAX_SCAN:
            raise ScanBudgetError("conditional_cov truncation exceeds budget; relax eps")
    i = np.arange(-m, n + m + 1, dtype=np.int64)
    a = model.interval_prob(-i - u, 1.0 - i - u)
    b = model.interval_prob(n - 1.0 - i - u, float(n) - i - u)
    return -float(np.dot(a, b))


# --------------------------------------------------------------------------
# weak limit of N(n+s) - (n+s)
# --------------------------------------------------------------------------

def _lattice_tail_sums(model: PerturbationModel, side: str, x0: float):
    """(sum_{k>=0} tail(x0+k), sum_{k>=0} tail(x0+k)^2) in closed form, where
    tail is the right survival (side="late") or the left cdf (side="early")."""
    if isinstance(model, Degenerate):
        return 0.0, 0.0
    if isinstance(model, TwoSidedPareto):
        if side == "late":
            coeff, alpha = model.c1, model.alpha1
        else:
            coeff, alpha = model.c2, model.alpha2
        if x0 < 1.0:
            raise ValueError("lattice tail sums need x0 >= 1")
        s1 = coeff * float(zeta(alpha, x0))
        s2 = coeff * coeff * float(zeta(2.0 * alpha, x0))
        return s1, s2
    if isinstance(model, TwoSidedExp):
        if side == "late":
            coeff, beta = model.d1 / model.beta1, model.beta1
        else:
            coeff, beta = model.d2 / model.beta2, model.beta2
        s1 = coeff * math.exp(-beta * x0) / -math.expm1(-beta)
        s2 = coeff * coeff * math.exp(-2.0 * beta * x0) / -math.expm1(-2.0 * beta)
        return s1, s2
    raise TypeError(f"unsupported model {model!r}")


def _end_count(
    model: PerturbationModel, u: float, stream: np.random.Generator,
    side: str, eps: float,
) -> int:
    """One draw of the stationary early count E(0) (side="early") or late
    count L(0) (side="late"), conditional on U=u.

    Indices up to a cut M are simulated as Bernoulli draws; the remaining
    (tiny, independent) indices contribute a Poisson-distributed count with
    the exact remaining mean, accurate to total variation <= sum of squared
    remaining probabilities <= eps."""
    if isinstance(model, Degenerate):
        return 0

    def sq_rem(m: int) -> float:
        x0 = (m + u) if side == "early" else (m + 1.0 - u)
        return _lattice_tail_sums(model, side, x0)[1]

    m = 64
    while sq_rem(m) > eps:
        m *= 2
        if m > _MAX_SCAN:
            raise ScanBudgetError("limit sampler truncation exceeds budget")
    if side == "early":
        p = model.cdf(-(np.arange(m, dtype=float) + u))
        lam = _lattice_tail_sums(model, side, m + u)[0]
    else:
        p = model.survival(np.arange(1, m + 1, dtype=float) - u)
        lam = _lattice_tail_sums(model, side, m + 1.0 - u)[0]
    n_direct = int(np.count_nonzero(stream.random(m) < p))
    return n_direct + int(stream.poisson(lam))


def sample_limit_rv(
    model: PerturbationModel,
    s: float,
    stream: np.random.Generator,
    eps: float = 1e-10,
) -> float:
    """One draw from the weak limit of N(n+s) - (n+s):

        -s + I(U <= s) + (E'(s) - L'(s)) - (E(0) - L(0)),

    the four counts conditionally independent given U, with E'(s) and E(0)
    equal in law (same for the late pair)."""
    if not (0.0 <= s < 1.0):
        raise ValueError("s must lie in [0, 1)")
    u = float(stream.random())
    base = -s + (1.0 if u <= s else 0.0)
    e1 = _end_count(model, u, stream, "early", eps)
    l1 = _end_count(model, u, stream, "late", eps)
    e0 = _end_count(model, u, stream, "early", eps)
    l0 = _end_count(model, u, stream, "late", eps)
    return base + (e1 - l1) - (e0 - l0)


def path_to_csv(path: ArrivalPath) -> str:
    """CSV export of the in-window arrivals, with the path parameters in the
    header comment."""
    lines = [
        f"# u={path.u!r} window=({path.t_lo!r},{path.t_hi!r}) eps={path.truncation_eps!r}",
        "schedule_index,arrival_time",
    ]
    for i, t in zip(path.entries_index, path.entries_time):
        lines.append(f"{int(i)},{t:.17g}")
    return "\n".join(lines) + "\n"
