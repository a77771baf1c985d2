"""The signed sub-CDF F0(y | lambda, theta) and membership tests for Phi+."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .distributions import ComponentDistribution
from .errors import InsufficientDataError, ValidationError


class CdfHandle(Protocol):
    def cdf(self, y): ...


class EmpiricalCdf:
    """Right-continuous F_n(x) = #{X_i <= x} / n over a sorted copy of the sample."""

    def __init__(self, data):
        x = np.sort(np.asarray(data, dtype=float).ravel())
        if x.size == 0:
            raise InsufficientDataError("empirical CDF of an empty sample")
        if not np.all(np.isfinite(x)):
            raise ValidationError("sample contains non-finite values")
        self.sorted = x
        self.n = x.size

    def cdf(self, y):
        return np.searchsorted(self.sorted, np.asarray(y, dtype=float), side="right") / self.n

    __call__ = cdf

    @property
    def range(self) -> tuple[float, float]:
        return float(self.sorted[0]), float(self.sorted[-1])


def _check_proportion(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise ValidationError(f"lambda must lie in (0, 1), got {lam}")
    return lam


@dataclass(frozen=True)
class SignedSubCdf:
    mixture: CdfHandle
    parametric: ComponentDistribution
    proportion: float

    def __post_init__(self):
        _check_proportion(self.proportion)

    def __call__(self, y):
        lam = self.proportion
        return (self.mixture.cdf(y) - lam * self.parametric.cdf(y)) / (1.0 - lam)


def eval_signed_cdf(lam: float, parametric: ComponentDistribution, mixture: CdfHandle, y):
    """(1/(1-lambda)) F(y) - (lambda/(1-lambda)) F1(y|theta); not clipped to [0, 1]."""
    return SignedSubCdf(mixture, parametric, lam)(y)


@dataclass(frozen=True)
class PhiPlusCheck:
    ok: bool
    witness: Optional[float] = None
    value: Optional[float] = None

    def __bool__(self) -> bool:
        return self.ok


def phi_plus_check(
    lam: float,
    parametric: ComponentDistribution,
    truth,
    grid_size: int = 1000,
    tolerance: float = 1e-9,
) -> PhiPlusCheck:
    """Checks that (p_T - lambda p1)/(1 - lambda) >= -tolerance at G quantile-spaced points of F_T.

    ``truth`` needs ``pdf`` and ``quantile``; returns the first violation found.
    """
    lam = _check_proportion(lam)
    u = (np.arange(1, grid_size + 1) - 0.5) / grid_size
    y = np.asarray(truth.quantile(u), dtype=float)
    density = (truth.pdf(y) - lam * parametric.pdf(y)) / (1.0 - lam)
    bad = np.flatnonzero(density < -tolerance)
    if bad.size:
        i = bad[0]
        return PhiPlusCheck(False, witness=float(y[i]), value=float(density[i]))
    return PhiPlusCheck(True)


def dkw_halfwidth(n: int, level: float = 0.05) -> float:
    return math.sqrt(math.log(2.0 / level) / (2.0 * n))


def phi_plus_check_empirical(
    lam: float,
    parametric: ComponentDistribution,
    sample,
    level: float = 0.05,
) -> PhiPlusCheck:
    """Whether the plug-in F0 is compatible with a genuine CDF inside a DKW band.

    With eps the band half-width divided by (1 - lambda), the estimate must stay
    in [-eps, 1 + eps] and never fall more than 2 eps below its running maximum.
    Both the values at the order statistics and their left limits are inspected.
    """
    lam = _check_proportion(lam)
    F = sample if isinstance(sample, EmpiricalCdf) else EmpiricalCdf(sample)
    eps = dkw_halfwidth(F.n, level) / (1.0 - lam)
    x = F.sorted
    f1 = parametric.cdf(x)
    i = np.arange(1, F.n + 1)
    left = ((i - 1) / F.n - lam * f1) / (1.0 - lam)
    right = (i / F.n - lam * f1) / (1.0 - lam)
    values = np.empty(2 * F.n)
    values[0::2] = left
    values[1::2] = right
    points = np.repeat(x, 2)

    out_of_band = np.flatnonzero((values < -eps) | (values > 1.0 + eps))
    if out_of_band.size:
        j = out_of_band[0]
        return PhiPlusCheck(False, witness=float(points[j]), value=float(values[j]))
    drop = np.maximum.accumulate(values) - values
    falling = np.flatnonzero(drop > 2.0 * eps)
    if falling.size:
        j = falling[0]
        return PhiPlusCheck(False, witness=float(points[j]), value=float(values[j]))
    return PhiPlusCheck(True)
