"""Set of (lambda, a1) reproducing the second L-moment of an exponential mixture.

For F_T = l* Exp(a1*) + (1 - l*) Exp(a0*) and a candidate parametric Exp(a1)
with weight lambda, the second L-moment of the implied unknown component equals
the true 1/(2 a0*) exactly on the curve returned here.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .distributions import ComponentDistribution, MixtureSpec
from .errors import ValidationError
from .signed_cdf import phi_plus_check

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExponentialMixtureTruth:
    lambda_star: float
    a1_star: float
    a0_star: float

    def __post_init__(self):
        if not 0.0 < self.lambda_star < 1.0:
            raise ValidationError(f"lambda* must lie in (0, 1), got {self.lambda_star}")
        if self.a1_star <= 0 or self.a0_star <= 0:
            raise ValidationError("exponential rates must be positive")

    @property
    def c2(self) -> float:
        return self.lambda_star / self.a1_star + (1.0 - self.lambda_star) / self.a0_star

    @property
    def c1(self) -> float:
        ls, a1, a0 = self.lambda_star, self.a1_star, self.a0_star
        return self.c2 - ls**2 / (4 * a1) - (1 - ls) ** 2 / (4 * a0) - ls * (1 - ls) / (a1 + a0)

    @property
    def target(self) -> float:
        return 1.0 / (2.0 * self.a0_star)

    def lhs(self, lam, a1):
        lam = np.asarray(lam, dtype=float)
        a1 = np.asarray(a1, dtype=float)
        ls = self.lambda_star
        scale = (1.0 - lam) ** 2
        return (
            (2 * self.c1 - (lam + 1) * self.c2) / scale
            + (lam**2 - 2 * lam) / (2 * a1 * scale)
            + 2 * ls * lam / (scale * (a1 + self.a1_star))
            + 2 * lam * (1 - ls) / (scale * (a1 + self.a0_star))
        )

    def residual(self, lam, a1):
        return self.lhs(lam, a1) - self.target

    def mixture(self) -> MixtureSpec:
        return MixtureSpec(
            proportion=self.lambda_star,
            parametric=ComponentDistribution.of("exponential", rate=self.a1_star),
            unknown=ComponentDistribution.of("exponential", rate=self.a0_star),
        )


@dataclass(frozen=True)
class CurvePoint:
    lam: float
    a1: float
    residual: float
    phi_plus: bool


def identifiability_curve_exponential(
    lambda_star: float,
    a1_star: float,
    a0_star: float,
    lambdas: Optional[Sequence[float]] = None,
    a1_grid: Optional[Sequence[float]] = None,
    *,
    grid_size: int = 1000,
) -> list[CurvePoint]:
    """Roots in a1 of the L-moment identity for every lambda of the grid.

    Sign changes along ``a1_grid`` bracket the roots; brackets without a sign
    change contribute nothing.
    """
    truth = ExponentialMixtureTruth(lambda_star, a1_star, a0_star)
    lambdas = np.linspace(0.5, 0.95, 91) if lambdas is None else np.asarray(lambdas, dtype=float)
    a1_grid = np.geomspace(0.05, 20.0, 801) if a1_grid is None else np.sort(np.asarray(a1_grid, dtype=float))
    mixture = truth.mixture()

    points: list[CurvePoint] = []
    for lam in lambdas:
        if not 0.0 < lam < 1.0:
            raise ValidationError(f"lambda grid must lie in (0, 1), got {lam}")
        values = truth.residual(lam, a1_grid)
        roots = [float(a) for a, v in zip(a1_grid, values) if v == 0.0]
        for j in np.flatnonzero(values[:-1] * values[1:] < 0):
            root = optimize.brentq(
                lambda a: float(truth.residual(lam, a)), a1_grid[j], a1_grid[j + 1], xtol=1e-14, rtol=1e-15, maxiter=200
            )
            roots.append(float(root))
        for a1 in sorted(roots):
            component = ComponentDistribution.of("exponential", rate=a1)
            points.append(
                CurvePoint(
                    lam=float(lam),
                    a1=a1,
                    residual=float(truth.residual(lam, a1)),
                    phi_plus=bool(phi_plus_check(float(lam), component, mixture, grid_size)),
                )
            )
    logger.debug("identifiability curve: %d roots over %d lambdas", len(points), len(lambdas))
    return points
