"""Parametric perturbation laws for scheduled arrivals.

A scheduled arrival process places customer ``n`` at time ``n + xi_n`` where
the ``xi_n`` are i.i.d. copies of a perturbation variable.  This module
provides the three perturbation families used throughout the package, each
with exact (closed form) survival and interval probabilities and inverse-CDF
sampling:

* :class:`TwoSidedPareto` -- polynomial tails on both sides, the remaining
  mass uniform on ``[-1, 1]``,
* :class:`TwoSidedExp` -- two-sided exponential density,
* :class:`Degenerate` -- point mass at zero (perfectly punctual customers).

All families have finite mean, which is what makes the early/late customer
counts of the traffic module finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Degenerate",
    "PerturbationModel",
    "TailParams",
    "TwoSidedExp",
    "TwoSidedPareto",
    "model_from_config",
    "model_to_config",
]

# Uniform draws are clamped away from {0, 1} before inversion so the mapped
# quantiles stay finite; the distortion is far below any tolerance used here.
_U_LO = 1e-300
_U_HI = 1.0 - 1e-16


@dataclass(frozen=True)
class TailParams:
    """Tail description of a perturbation law, in both common conventions.

    For polynomial tails (``kind == "power"``) the survival convention is
    ``P(xi > x) ~ right_survival_coeff * x**(-right_exponent)`` and the
    density convention is
    ``f(x) ~ right_density_coeff * x**(-right_exponent - 1)``; the density
    coefficient always equals ``exponent * survival coefficient``.

    For exponential tails (``kind == "exponential"``) the density is
    ``right_density_coeff * exp(-right_exponent * x)`` and the survival
    coefficient is ``density coefficient / rate``.

    ``kind == "none"`` marks a law with no polynomial or exponential tail
    (the degenerate case); all numeric fields are NaN.
    """

    kind: str
    right_exponent: float = math.nan
    right_survival_coeff: float = math.nan
    right_density_coeff: float = math.nan
    left_exponent: float = math.nan
    left_survival_coeff: float = math.nan
    left_density_coeff: float = math.nan

    @property
    def has_tail(self) -> bool:
        return self.kind != "none"


@dataclass(frozen=True)
class TwoSidedPareto:
    """Perturbation with Pareto tails on both sides.

    ``P(xi > x) = c1 * x**(-alpha1)`` for ``x >= 1``,
    ``P(xi < -x) = c2 * x**(-alpha2)`` for ``x >= 1``, and the remaining
    mass ``1 - c1 - c2`` spread uniformly on ``[-1, 1]``.  The density is
    bounded and the tail onset at ``|x| = 1`` carries no atom.
    """

    c1: float
    alpha1: float
    c2: float
    alpha2: float

    def __post_init__(self) -> None:
        if not (self.c1 >= 0.0 and self.c2 >= 0.0):
            raise ValueError("tail coefficients must be non-negative")
        if self.c1 + self.c2 > 1.0 + 1e-15:
            raise ValueError("tail mass c1 + c2 must not exceed 1")
        if not (self.alpha1 > 1.0 and self.alpha2 > 1.0):
            raise ValueError("tail exponents alpha must exceed 1 (finite mean)")

    @property
    def _core_mass(self) -> float:
        return 1.0 - self.c1 - self.c2

    def survival(self, x):
        """P(xi > x), exact, vectorized over ``x``."""
        x = np.asarray(x, dtype=float)
        right = self.c1 * np.power(np.maximum(x, 1.0), -self.alpha1)
        left = 1.0 - self.c2 * np.power(np.maximum(-x, 1.0), -self.alpha2)
        core = self.c1 + self._core_mass * (1.0 - np.clip(x, -1.0, 1.0)) / 2.0
        out = np.where(x >= 1.0, right, np.where(x < -1.0, left, core))
        return out if out.ndim else float(out)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def ppf(self, v):
        """Inverse CDF, vectorized; used for sampling."""
        v = np.clip(np.asarray(v, dtype=float), _U_LO, _U_HI)
        left = -np.power(self.c2 / np.maximum(v, _U_LO), 1.0 / self.alpha2)
        right = np.power(self.c1 / np.maximum(1.0 - v, _U_LO), 1.0 / self.alpha1)
        core_span = max(self._core_mass, _U_LO)
        core = -1.0 + 2.0 * (v - self.c2) / core_span
        out = np.where(v <= self.c2, left, np.where(v >= 1.0 - self.c1, right, core))
        return out if out.ndim else float(out)

    def sample(self, stream: np.random.Generator, size=None):
        u = stream.random(size)
        return self.ppf(u)

    def interval_prob(self, a, b):
        """P(a < xi <= b); accepts scalars or arrays."""
        a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if np.any(a_arr > b_arr):
            raise ValueError("invalid interval: a must be <= b")
        out = self.survival(a_arr) - self.survival(b_arr)
        return out if np.ndim(out) else float(out)

    def tail_params(self) -> TailParams:
        return TailParams(
            kind="power",
            right_exponent=self.alpha1,
            right_survival_coeff=self.c1,
            right_density_coeff=self.alpha1 * self.c1,
            left_exponent=self.alpha2,
            left_survival_coeff=self.c2,
            left_density_coeff=self.alpha2 * self.c2,
        )

    def mean_abs(self) -> float:
        """E|xi|, closed form; finite for all admissible parameters."""
        core = self._core_mass / 2.0
        return (
            self.c1 + self.c2 + core
            + self.c1 / (self.alpha1 - 1.0)
            + self.c2 / (self.alpha2 - 1.0)
        )


@dataclass(frozen=True)
class TwoSidedExp:
    """Two-sided exponential density ``d1*exp(-beta1*x)`` for ``x > 0`` and
    ``d2*exp(beta2*x)`` for ``x < 0``, normalized so ``d1/beta1 + d2/beta2 = 1``.

    Normalization is enforced at construction; a silent mass defect would
    corrupt every downstream probability.
    """

    d1: float
    beta1: float
    d2: float
    beta2: float

    def __post_init__(self) -> None:
        if min(self.d1, self.beta1, self.d2, self.beta2) <= 0.0:
            raise ValueError("rates and density coefficients must be positive")
        mass = self.d1 / self.beta1 + self.d2 / self.beta2
        if abs(mass - 1.0) > 1e-12:
            raise ValueError(f"density not normalized: d1/beta1 + d2/beta2 = {mass!r}")

    @classmethod
    def laplace(cls, beta: float = 1.0) -> "TwoSidedExp":
        """Symmetric Laplace law with rate ``beta`` (density ``beta/2*e^(-beta|x|)``)."""
        return cls(d1=beta / 2.0, beta1=beta, d2=beta / 2.0, beta2=beta)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        pos = (self.d1 / self.beta1) * np.exp(-self.beta1 * np.maximum(x, 0.0))
        neg = 1.0 - (self.d2 / self.beta2) * np.exp(self.beta2 * np.minimum(x, 0.0))
        out = np.where(x >= 0.0, pos, neg)
        return out if out.ndim else float(out)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def ppf(self, v):
        v = np.clip(np.asarray(v, dtype=float), _U_LO, _U_HI)
        p_neg = self.d2 / self.beta2
        left = np.log(np.maximum(v, _U_LO) * self.beta2 / self.d2) / self.beta2
        right = -np.log(np.maximum(1.0 - v, _U_LO) * self.beta1 / self.d1) / self.beta1
        out = np.where(v <= p_neg, left, right)
        return out if out.ndim else float(out)

    def sample(self, stream: np.random.Generator, size=None):
        return self.ppf(stream.random(size))

    def interval_prob(self, a, b):
        a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if np.any(a_arr > b_arr):
            raise ValueError("invalid interval: a must be <= b")
        out = self.survival(a_arr) - self.survival(b_arr)
        return out if np.ndim(out) else float(out)

    def tail_params(self) -> TailParams:
        return TailParams(
            kind="exponential",
            right_exponent=self.beta1,
            right_survival_coeff=self.d1 / self.beta1,
            right_density_coeff=self.d1,
            left_exponent=self.beta2,
            left_survival_coeff=self.d2 / self.beta2,
            left_density_coeff=self.d2,
        )

    def mean_abs(self) -> float:
        return self.d1 / self.beta1**2 + self.d2 / self.beta2**2


@dataclass(frozen=True)
class Degenerate:
    """Point mass at zero: every customer arrives exactly on schedule."""

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0.0, 1.0, 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0.0, 1.0, 0.0)
        return out if out.ndim else float(out)

    def ppf(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        return out if out.ndim else 0.0

    def sample(self, stream: np.random.Generator, size=None):
        if size is None:
            return 0.0
        return np.zeros(size)

    def interval_prob(self, a, b):
        a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        if np.any(a_arr > b_arr):
            raise ValueError("invalid interval: a must be <= b")
        out = np.where((a_arr < 0.0) & (b_arr >= 0.0), 1.0, 0.0)
        return out if out.ndim else float(out)

    def tail_params(self) -> TailParams:
        return TailParams(kind="none")

    def mean_abs(self) -> float:
        return 0.0


PerturbationModel = Union[TwoSidedPareto, TwoSidedExp, Degenerate]


def model_from_config(cfg: dict) -> PerturbationModel:
    """Build a model from its config-file form.

    Accepted shapes::

        {"type": "pareto2", "c1": .., "alpha1": .., "c2": .., "alpha2": ..}
        {"type": "exp2", "d1": .., "beta1": .., "d2": .., "beta2": ..}
        {"type": "zero"}
    """
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ValueError("model config must be a mapping with a 'type' key")
    kind = cfg["type"]
    extra = {k for k in cfg if k != "type"}
    if kind == "pareto2":
        wanted = {"c1", "alpha1", "c2", "alpha2"}
        if extra != wanted:
            raise ValueError(f"pareto2 model needs exactly the keys {sorted(wanted)}")
        return TwoSidedPareto(c1=float(cfg["c1"]), alpha1=float(cfg["alpha1"]),
                              c2=float(cfg["c2"]), alpha2=float(cfg["alpha2"]))
    if kind == "exp2":
        wanted = {"d1", "beta1", "d2", "beta2"}
        if extra != wanted:
            raise ValueError(f"exp2 model needs exactly the keys {sorted(wanted)}")
        return TwoSidedExp(d1=float(cfg["d1"]), beta1=float(cfg["beta1"]),
                           d2=float(cfg["d2"]), beta2=float(cfg["beta2"]))
    if kind == "zero":
        if extra:
            raise ValueError("zero model takes no parameters")
        return Degenerate()
    raise ValueError(f"unknown model type {kind!r}")


def model_to_config(model: PerturbationModel) -> dict:
    if isinstance(model, TwoSidedPareto):
        return {"type": "pareto2", "c1": model.c1, "alpha1": model.alpha1,
                "c2": model.c2, "alpha2": model.alpha2}
    if isinstance(model, TwoSidedExp):
        return {"type": "exp2", "d1": model.d1, "beta1": model.beta1,
                "d2": model.d2, "beta2": model.beta2}
    if isinstance(model, Degenerate):
        return {"type": "zero"}
    raise TypeError(f"not a perturbation model: {model!r}")
