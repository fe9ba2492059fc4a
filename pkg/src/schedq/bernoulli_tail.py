"""Exact and asymptotic tails for sums of independent Bernoulli variables.

The central object is ``Z = sum_j I_j`` with ``P(I_j = 1) = p_j`` and
``p_j = c*(w+j)**(-alpha)`` (``alpha > 1``), the count family that drives
everything else in this package: late/early customer counts of a scheduled
arrival stream are exactly such sums.

Three layers are provided:

* an exact oracle (:func:`exact_tail`, :func:`exact_tail_profile`) built on
  Poisson-binomial dynamic programming with a certified truncation error,
* the log-moment-generating function ``psi`` and its derivatives under
  exponential tilting (:func:`psi_and_derivatives`), plus the Chernoff upper
  bound (:func:`chernoff_bound`),
* the constants ``r*``, ``eta*``, ``gamma`` of the exact tail asymptotics and
  the two asymptotic formulas themselves (:func:`asymp_tail_general`,
  :func:`asymp_tail_power`).

Probabilities as small as ``exp(-10**5)`` stay representable: deep tails are
reported in log space, with an automatic log-domain rerun of the dynamic
program when the linear-domain values underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numba import njit
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln, zeta

__all__ = [
    "ParamSeq",
    "PowerLawDescriptor",
    "PsiValues",
    "TailConstants",
    "TailEstimate",
    "TailProfile",
    "TruncationError",
    "asymp_tail_general",
    "asymp_tail_power",
    "chernoff_bound",
    "eta_star",
    "exact_tail",
    "exact_tail_profile",
    "gamma_const",
    "log_tail_slope",
    "power_law_constants",
    "psi_and_derivatives",
    "solve_r_star",
]

_START_TERMS = 1 << 14
_MAX_TERMS = 1 << 24


class TruncationError(RuntimeError):
    """No affordable truncation achieves the requested certified error."""


# --------------------------------------------------------------------------
# parameter sequences
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLawDescriptor:
    """Analytic form p_j = c*(w+j)**(-alpha)."""

    c: float
    alpha: float
    w: float


@dataclass(frozen=True)
class ParamSeq:
    """A sequence of Bernoulli success probabilities with tail-sum control.

    ``probs`` maps an int64 index array to probabilities.  ``tail_sum_bound(J)``
    is a non-increasing upper bound on ``sum_{j>J} p_j``; when the sums
    ``sum_{j>J} p_j`` and ``sum_{j>J} p_j**2`` are available exactly (power-law
    and finite sequences) they enable the Poisson tail top-up that makes the
    truncation error certificate sharp.
    """

    probs: Callable[[np.ndarray], np.ndarray]
    tail_sum_bound: Callable[[int], float]
    tail_sum_exact: Optional[Callable[[int], float]] = None
    tail_sq_sum_exact: Optional[Callable[[int], float]] = None
    length: Optional[int] = None
    descriptor: Optional[PowerLawDescriptor] = None

    @staticmethod
    def power_law(c: float, alpha: float, w: float = 1.0) -> "ParamSeq":
        """p_j = c*(w+j)**(-alpha) for j >= 0."""
        if alpha <= 1.0:
            raise ValueError("alpha must exceed 1 (summable probabilities)")
        if c <= 0.0 or w <= 0.0:
            raise ValueError("c and w must be positive")
        if c * w ** (-alpha) > 1.0 + 1e-15:
            raise ValueError("p_0 = c*w**(-alpha) exceeds 1")

        def probs(j):
            return np.minimum(c * np.power(w + np.asarray(j, dtype=float), -alpha), 1.0)

        def tail_sum(j_last: int) -> float:
            return float(c * zeta(alpha, w + j_last + 1.0))

        def tail_sq_sum(j_last: int) -> float:
            return float(c * c * zeta(2.0 * alpha, w + j_last + 1.0))

        return ParamSeq(
            probs=probs,
            tail_sum_bound=tail_sum,
            tail_sum_exact=tail_sum,
            tail_sq_sum_exact=tail_sq_sum,
            descriptor=PowerLawDescriptor(c=c, alpha=alpha, w=w),
        )

    @staticmethod
    def from_probs(p: Sequence[float]) -> "ParamSeq":
        """Finite explicit sequence."""
        arr = np.asarray(p, dtype=float)
        if arr.ndim != 1:
            raise ValueError("probability list must be one-dimensional")
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise ValueError("probabilities must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        suffix = np.concatenate([np.cumsum(arr[::-1])[::-1], [0.0]])
        suffix_sq = np.concatenate([np.cumsum((arr ** 2)[::-1])[::-1], [0.0]])

        def probs(j):
            return arr[np.asarray(j, dtype=np.int64)]

        def tail_sum(j_last: int) -> float:
            k = min(max(j_last + 1, 0), arr.size)
            return float(suffix[k])

        def tail_sq(j_last: int) -> float:
            k = min(max(j_last + 1, 0), arr.size)
            return float(suffix_sq[k])

        return ParamSeq(
            probs=probs,
            tail_sum_bound=tail_sum,
            tail_sum_exact=tail_sum,
            tail_sq_sum_exact=tail_sq,
            length=arr.size,
        )


# --------------------------------------------------------------------------
# Poisson-binomial dynamic programming
# --------------------------------------------------------------------------

@njit(cache=True)
def _pb_feed(p, f, top):
    """In-place DP update: counts above K = len(f)-1 pool into ``top``."""
    K = f.shape[0] - 1
    t = top
    for j in range(p.shape[0]):
        pj = p[j]
        qj = 1.0 - pj
        t += f[K] * pj
        for k in range(K, 0, -1):
            f[k] = f[k] * qj + f[k - 1] * pj
        f[0] *= qj
    return t


@njit(cache=True)
def _logaddexp(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


@njit(cache=True)
def _pb_feed_log(lp, lq, lf, ltop):
    """Same DP carried entirely in log space (for tails below 1e-300)."""
    K = lf.shape[0] - 1
    t = ltop
    for j in range(lp.shape[0]):
        a = lp[j]
        b = lq[j]
        t = _logaddexp(t, lf[K] + a)
        for k in range(K, 0, -1):
            lf[k] = _logaddexp(lf[k] + b, lf[k - 1] + a)
        lf[0] += b
    return t


def _feed_chunks(seq: ParamSeq, n_terms: int, K: int):
    """Run the linear DP over j = 0..n_terms-1; returns (f, top)."""
    f = np.zeros(K + 1)
    f[0] = 1.0
    top = 0.0
    step = 1 << 20
    for lo in range(0, n_terms, step):
        hi = min(lo + step, n_terms)
        p = np.asarray(seq.probs(np.arange(lo, hi, dtype=np.int64)), dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("sequence produced a probability outside [0, 1]")
        top = _pb_feed(p, f, top)
    return f, top


def _feed_chunks_log(seq: ParamSeq, n_terms: int, K: int):
    lf = np.full(K + 1, -np.inf)
    lf[0] = 0.0
    ltop = -np.inf
    step = 1 << 20
    with np.errstate(divide="ignore"):
        for lo in range(0, n_terms, step):
            hi = min(lo + step, n_terms)
            p = np.asarray(seq.probs(np.arange(lo, hi, dtype=np.int64)), dtype=float)
            lp = np.log(p)
            lq = np.log1p(-p)
            ltop = _pb_feed_log(lp, lq, lf, ltop)
    return lf, ltop


def _log_suffix(lf, ltop):
    """log of (sum_{k>=n} f[k] + top) for each n."""
    out = np.empty(lf.shape[0])
    acc = ltop
    for n in range(lf.shape[0] - 1, -1, -1):
        acc = np.logaddexp(acc, lf[n])
        out[n] = acc
    return out


def _poisson_log_weights(s: float, k_max: int):
    k = np.arange(k_max + 1, dtype=float)
    return -s + k * math.log(s) - gammaln(k + 1.0) if s > 0.0 else None


@dataclass(frozen=True)
class TailProfile:
    """P(Z >= n) for n = 0..n_max with certified one-sided error bounds.

    ``tail`` may underflow to 0.0 for very deep levels; ``log_tail`` is then
    the authoritative value.  ``err_bound[n]`` bounds |true - reported|.
    """

    n_max: int
    tail: np.ndarray
    log_tail: np.ndarray
    err_bound: np.ndarray
    j_terms: int
    tail_sum_remaining: float
    total_mass: float

    def estimate(self, n: int) -> "TailEstimate":
        return TailEstimate(
            n=n,
            value=float(self.tail[n]),
            log_value=float(self.log_tail[n]),
            err_bound=float(self.err_bound[n]),
            j_terms=self.j_terms,
        )


@dataclass(frozen=True)
class TailEstimate:
    """One tail probability plus the guarantee |P(Z>=n) - value| <= err_bound."""

    n: int
    value: float
    log_value: float
    err_bound: float
    j_terms: int


def _min_weight_series(two_l: float, s: float, k_max: int):
    """w[k] = min(two_l, s**k/k!), the pointwise bound on the Poisson top-up error."""
    w = np.zeros(k_max + 1)
    if s <= 0.0:
        return w
    pk = 1.0
    for k in range(k_max + 1):
        w[k] = min(two_l, pk)
        pk *= s / (k + 1)
        if w[k] == 0.0 and k > 0:
            break
    return w


def _profile_from_state(seq, f, top, j_terms, K):
    """Assemble tail values + certified errors from the DP state."""
    rev = np.cumsum(f[::-1])[::-1]
    G = rev + top
    total_mass = float(G[0])

    if seq.tail_sum_exact is not None:
        s = float(seq.tail_sum_exact(j_terms - 1))
    else:
        s = float(seq.tail_sum_bound(j_terms - 1))

    if seq.tail_sq_sum_exact is not None and s > 0.0:
        # Poisson top-up: convolve the truncated tail with Poisson(s); the
        # pointwise Le Cam bound certifies the residual error.
        L = float(seq.tail_sq_sum_exact(j_terms - 1))
        k_cut = K + 1
        lw = _poisson_log_weights(s, k_cut)
        pois = np.exp(lw)
        value = np.zeros(K + 1)
        for k in range(k_cut + 1):
            if pois[k] == 0.0 and k > 2:
                break
            shifted = np.empty(K + 1)
            shifted[:k] = 1.0
            shifted[k:] = G[: K + 1 - k]
            value += pois[k] * shifted
        wt = _min_weight_series(2.0 * L, s, k_cut)
        err = np.zeros(K + 1)
        for k in range(k_cut + 1):
            if wt[k] == 0.0 and k > 2:
                break
            shifted = np.empty(K + 1)
            shifted[:k] = 1.0
            shifted[k:] = G[: K + 1 - k]
            err += wt[k] * shifted
        err = np.minimum(err, s)
    elif s > 0.0:
        # No exact remainder sum: plain truncation, one-sided union-type bound
        # sum_l P(R >= l) * P(Z_J = n-l) with P(R >= l) <= s**l / l!.
        value = G.copy()
        w = np.zeros(K + 1)
        wl = s
        for l in range(1, K + 1):
            w[l] = wl
            wl *= s / (l + 1)
            if wl < 1e-320:
                break
        err = np.convolve(f, w)[: K + 1]
        err = np.minimum(err, s)
    else:
        value = G.copy()
        err = np.zeros(K + 1)

    return value, err, s, total_mass, G


def exact_tail_profile(
    seq: ParamSeq,
    n_max: int,
    eps: float = 1e-12,
    rel_tol: float = 1e-7,
    max_terms: int = _MAX_TERMS,
) -> TailProfile:
    """Certified P(Z >= n) for every n = 0..n_max.

    The truncation depth doubles until, for every level, the certified error
    is below ``eps`` (absolute) or below ``rel_tol`` of the value.  Raises
    :class:`TruncationError` if the absolute guarantee is unreachable within
    ``max_terms`` DP terms.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    K = n_max

    if seq.length is not None:
        n_terms = seq.length
        f, top = _feed_chunks(seq, n_terms, K)
        value, err, s, total_mass, G = _profile_from_state(seq, f, top, n_terms, K)
    else:
        f = np.zeros(K + 1)
        f[0] = 1.0
        top = 0.0
        fed = 0
        target = min(_START_TERMS, max_terms)
        while True:
            p = np.asarray(seq.probs(np.arange(fed, target, dtype=np.int64)), dtype=float)
            if np.any((p < 0.0) | (p > 1.0)):
                raise ValueError("sequence produced a probability outside [0, 1]")
            top = _pb_feed(p, f, top)
            fed = target
            value, err, s, total_mass, G = _profile_from_state(seq, f, top, fed, K)
            abs_ok = bool(np.all(err <= eps))
            rel_ok = bool(np.all((err <= rel_tol * value) | (value == 0.0)))
            if (abs_ok and rel_ok) or fed >= max_terms:
                break
            target = min(fed * 2, max_terms)
        if not abs_ok:
            worst = float(np.max(err))
            raise TruncationError(
                f"certified absolute error {worst:.3e} still above eps={eps:.3e} "
                f"after {fed} terms; relax eps or raise max_terms"
            )
        n_terms = fed

    # Log-domain values; rerun the DP in log space if the linear values
    # underflowed (possible once tails drop below ~1e-300).
    if np.all(value > 1e-280):
        log_tail = np.log(value)
    else:
        lf, ltop = _feed_chunks_log(seq, n_terms, K)
        logG = _log_suffix(lf, ltop)
        if seq.tail_sq_sum_exact is not None and s > 0.0:
            # mirror the linear branch: Poisson top-up with the exact mean
            lw = _poisson_log_weights(s, K + 1)
            log_tail = np.full(K + 1, -np.inf)
            for k in range(K + 2):
                shifted = np.empty(K + 1)
                shifted[:k] = 0.0
                shifted[k:] = logG[: K + 1 - k]
                log_tail = np.logaddexp(log_tail, lw[k] + shifted)
        else:
            log_tail = logG
        value = np.where(value > 0.0, value, np.exp(log_tail))

    return TailProfile(
        n_max=n_max,
        tail=value,
        log_tail=log_tail,
        err_bound=err,
        j_terms=n_terms,
        tail_sum_remaining=s,
        total_mass=total_mass,
    )


def exact_tail(
    seq: ParamSeq,
    n: int,
    eps: float = 1e-12,
    rel_tol: float = 1e-7,
    max_terms: int = _MAX_TERMS,
) -> TailEstimate:
    """P(Z >= n) with the guarantee |P(Z >= n) - value| <= err_bound <= eps."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return exact_tail_profile(seq, n, eps=eps, rel_tol=rel_tol, max_terms=max_terms).estimate(n)


# --------------------------------------------------------------------------
# psi = log E exp(theta Z) and exponential tilting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiValues:
    """psi(theta) with first and second derivatives and certified errors."""

    theta: float
    psi: float
    dpsi: float
    d2psi: float
    psi_err: float
    dpsi_err: float
    d2psi_err: float


def _psi_direct(p: np.ndarray, em1: float, m: float):
    q = p * em1
    psi = float(np.sum(np.log1p(q)))
    dpsi = float(np.sum(p * m / (1.0 + q)))
    d2psi = float(np.sum(p * (1.0 - p) * m / (1.0 + q) ** 2))
    return psi, dpsi, d2psi


def psi_and_derivatives(seq: ParamSeq, theta: float, eps: float = 1e-12) -> PsiValues:
    """psi(theta) = sum_j log(p_j*(e^theta - 1) + 1) and its two derivatives.

    For the power-law family the tail beyond the direct summation range is
    folded in through Hurwitz-zeta moment sums, with a certified remainder;
    for finite sequences the value is exact up to rounding.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    em1 = math.expm1(theta)
    m = em1 + 1.0

    if seq.length is not None:
        p = np.asarray(seq.probs(np.arange(seq.length, dtype=np.int64)), dtype=float)
        psi, dpsi, d2psi = _psi_direct(p, em1, m)
        return PsiValues(theta, psi, dpsi, d2psi, 0.0, 0.0, 0.0)

    desc = seq.descriptor
    if desc is not None:
        c, alpha, w = desc.c, desc.alpha, desc.w
        # direct part large enough that |p_j * em1| <= 1/2 beyond it
        j_min = (2.0 * c * abs(em1)) ** (1.0 / alpha) - w if em1 != 0.0 else 0.0
        J = int(max(1 << 16, math.ceil(j_min) + 1))
        p = np.asarray(seq.probs(np.arange(J, dtype=np.int64)), dtype=float)
        psi, dpsi, d2psi = _psi_direct(p, em1, m)
        # Hurwitz-zeta moment sums S_k = sum_{j >= J} p_j^k
        q0 = w + float(J)
        S = [float(c ** k * zeta(k * alpha, q0)) for k in range(1, 7)]
        e = em1
        psi_t = e * S[0] - e * e * S[1] / 2.0 + e ** 3 * S[2] / 3.0 - e ** 4 * S[3] / 4.0
        psi_err = 2.0 * abs(e) ** 5 * S[4] / 5.0
        dpsi_t = m * (S[0] - e * S[1] + e * e * S[2] - e ** 3 * S[3])
        dpsi_err = 2.0 * m * abs(e) ** 4 * S[4]
        d2_t = m * sum(
            (-1.0) ** k * (k + 1) * e ** k * (S[k] - S[k + 1]) for k in range(4)
        )
        d2_err = 12.0 * m * abs(e) ** 4 * (S[4] + S[5])
        return PsiValues(
            theta, psi + psi_t, dpsi + dpsi_t, d2psi + d2_t, psi_err, dpsi_err, d2_err
        )

    # generic infinite sequence: plain truncation on the tail-sum bound
    scale = max(abs(em1), 1e-30)
    J = _START_TERMS
    while scale * seq.tail_sum_bound(J - 1) > eps:
        if J >= _MAX_TERMS:
            raise TruncationError(
                "tail_sum_bound does not reach the requested psi tolerance"
            )
        J *= 2
    p = np.asarray(seq.probs(np.arange(J, dtype=np.int64)), dtype=float)
    psi, dpsi, d2psi = _psi_direct(p, em1, m)
    tsb = seq.tail_sum_bound(J - 1)
    big = max(m, 1.0 / m if m > 0 else 1.0)
    return PsiValues(theta, psi, dpsi, d2psi, abs(em1) * tsb, big * tsb, big * tsb)


# --------------------------------------------------------------------------
# tail constants r*, eta*, gamma
# --------------------------------------------------------------------------

def _alt_tail_series(a: float, X: float, alpha: float, kind: str):
    """Analytic tail of the three improper integrals on [X, inf).

    Expansions in y = a*x**(-alpha) (alternating, |y| <= 1/4 enforced by the
    caller's choice of X), truncated when terms fall below 1e-18; returns
    (value, remainder_bound).
    """
    total = 0.0
    k = 0
    term = math.inf
    while abs(term) > 1e-18 and k < 300:
        expo = alpha * (k + 1) - 1.0
        base = (-1.0) ** k * a ** (k + 1) * X ** (-expo) / expo
        if kind == "frac":
            term = base
        elif kind == "frac2":
            term = (k + 1) * base
        elif kind == "log":
            term = base / (k + 1)
        else:
            raise ValueError(kind)
        total += term
        k += 1
    return total, abs(term)


def _tail_cut(a: float, alpha: float) -> float:
    return max(2.0, (4.0 * a) ** (1.0 / alpha))


def _mass_integral(c: float, alpha: float, r: float):
    """integral_0^inf c*r/(c*r + x**alpha) dx with a certified error."""
    a = c * r
    X = _tail_cut(a, alpha)
    main, qerr = quad(lambda x: a / (a + x ** alpha), 0.0, X,
                      epsabs=1e-13, epsrel=1e-13, limit=400)
    tail, terr = _alt_tail_series(a, X, alpha, "frac")
    return main + tail, qerr + terr


def solve_r_star(c: float, alpha: float) -> float:
    """The tilting scale r*: integral_0^inf c*r*/(c*r* + x**alpha) dx = 1.

    Computed independently by the closed form
    ``c*r* = (alpha*sin(pi/alpha)/pi)**alpha`` and by bisection on adaptive
    quadrature of the defining integral; the two routes must agree to 1e-8.
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1: the defining integral diverges")
    if c <= 0.0:
        raise ValueError("c must be positive")
    a_closed = (alpha * math.sin(math.pi / alpha) / math.pi) ** alpha
    r_closed = a_closed / c

    def g(r):
        return _mass_integral(c, alpha, r)[0] - 1.0

    lo, hi = 0.5 * r_closed, 2.0 * r_closed
    while g(lo) > 0.0:
        lo *= 0.5
    while g(hi) < 0.0:
        hi *= 2.0
    r_quad = brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)

    if abs(r_quad - r_closed) > 1e-8 * max(1.0, abs(r_closed)):
        raise ArithmeticError(
            f"closed-form and quadrature solutions disagree: {r_closed!r} vs {r_quad!r}"
        )
    residual, res_err = _mass_integral(c, alpha, r_closed)
    if abs(residual - 1.0) > 1e-10 + res_err:
        raise ArithmeticError(f"r* residual too large: {residual - 1.0:.3e}")
    return r_closed


def eta_star(c: float, alpha: float, r_star: float) -> float:
    """eta* = integral_0^inf c r* x^alpha / (c r* + x^alpha)^2 dx."""
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    a = c * r_star
    if a <= 0.0:
        raise ValueError("c*r_star must be positive")
    X = _tail_cut(a, alpha)
    main, _ = quad(lambda x: a * x ** alpha / (a + x ** alpha) ** 2, 0.0, X,
                   epsabs=1e-13, epsrel=1e-13, limit=400)
    tail, _ = _alt_tail_series(a, X, alpha, "frac2")
    out = main + tail
    if out <= 0.0:
        raise ArithmeticError("eta* must be positive")
    return out


def gamma_const(c: float, alpha: float, r_star: float) -> float:
    """gamma = int_0^1 log(1 + x^alpha/(c r*)) dx
             + int_1^inf log(1 + c r* x^(-alpha)) dx + alpha + log(c)."""
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    a = c * r_star
    i1, e1 = quad(lambda x: math.log1p(x ** alpha / a), 0.0, 1.0,
                  epsabs=1e-12, epsrel=1e-12, limit=400)
    X = _tail_cut(a, alpha)
    i2, e2 = quad(lambda x: math.log1p(a * x ** (-alpha)), 1.0, X,
                  epsabs=1e-12, epsrel=1e-12, limit=400)
    tail, e3 = _alt_tail_series(a, X, alpha, "log")
    if e1 + e2 + e3 > 1e-9:
        raise ArithmeticError("gamma quadrature error budget exceeded")
    return i1 + i2 + tail + alpha + math.log(c)


@lru_cache(maxsize=None)
def power_law_constants(c: float, alpha: float):
    """(r*, eta*, gamma) for the power-law family, cached."""
    r = solve_r_star(c, alpha)
    return r, eta_star(c, alpha, r), gamma_const(c, alpha, r)


@dataclass(frozen=True)
class TailConstants:
    """Constant bundle (c, alpha, w, r*, eta*, gamma) for the exact asymptotics."""

    c: float
    alpha: float
    w: float
    r_star: float
    eta_star: float
    gamma: float

    @classmethod
    def compute(cls, c: float, alpha: float, w: float = 1.0) -> "TailConstants":
        r, eta, gam = power_law_constants(c, alpha)
        return cls(c=c, alpha=alpha, w=w, r_star=r, eta_star=eta, gamma=gam)


# --------------------------------------------------------------------------
# asymptotic formulas and bounds
# --------------------------------------------------------------------------

def asymp_tail_general(seq: ParamSeq, n: int) -> float:
    """log of the leading-order tail approximation

        P(Z >= n) ~ (2 pi eta*)^(-1/2) * r*^(-n) * n^(-alpha n - 1/2)
                    * exp(psi(r* n^alpha)),

    evaluated entirely in log space through the tilted psi."""
    if seq.descriptor is None:
        raise ValueError("asymp_tail_general needs the analytic descriptor")
    if n < 1:
        raise ValueError("n must be >= 1")
    c, alpha = seq.descriptor.c, seq.descriptor.alpha
    r, eta, _ = power_law_constants(c, alpha)
    theta = math.log(r) + alpha * math.log(n)
    psi = psi_and_derivatives(seq, theta).psi
    return (
        -0.5 * math.log(2.0 * math.pi * eta)
        - n * math.log(r)
        - (alpha * n + 0.5) * math.log(n)
        + psi
    )


def asymp_tail_power(c: float, w: float, alpha: float, n: int) -> float:
    """log of the fully explicit tail asymptotic for p_j = c*(w+j)**(-alpha):

        (2 pi)^(-(alpha+1)/2) * Gamma(w)^alpha / sqrt(eta*)
        * (c r*)^(1/2 - w) * n^(-alpha n + (alpha-1)/2 - w alpha) * e^(gamma n)
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if c <= 0.0 or w <= 0.0:
        raise ValueError("c and w must be positive")
    r, eta, gam = power_law_constants(c, alpha)
    a = c * r
    return (
        -(alpha + 1.0) / 2.0 * math.log(2.0 * math.pi)
        + alpha * float(gammaln(w))
        - 0.5 * math.log(eta)
        + (0.5 - w) * math.log(a)
        + (-alpha * n + 0.5 * (alpha - 1.0) - w * alpha) * math.log(n)
        + gam * n
    )


def chernoff_bound(seq: ParamSeq, z: float, r: Optional[float] = None) -> float:
    """log of the Chernoff/Markov bound at tilt theta(z) = log(r*z**alpha):

        P(Z >= z) <= exp(psi(theta(z)) - theta(z) * z).

    ``r`` defaults to the tilting scale r* of the sequence's power law."""
    if z <= 0.0:
        raise ValueError("z must be positive")
    if seq.descriptor is None:
        raise ValueError("chernoff_bound needs the analytic descriptor")
    alpha = seq.descriptor.alpha
    if r is None:
        r = power_law_constants(seq.descriptor.c, alpha)[0]
    if r <= 0.0:
        raise ValueError("r must be positive")
    theta = math.log(r) + alpha * math.log(z)
    return psi_and_derivatives(seq, theta).psi - theta * z


def log_tail_slope(values):
    """Normalized slopes log P / (z log z) used as the tail-exponent diagnostic."""
    out = []
    for z, logp in values:
        if z < 3.0:
            raise ValueError("z must be >= 3 for the z*log(z) normalization")
        out.append((z, logp / (z * math.log(z))))
    return out
