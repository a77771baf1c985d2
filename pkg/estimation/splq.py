"""SPLQ estimation: L-moment constraints only, plugged in through sample spacings.

The integral over the quantile measure is replaced by the sum over
i = 1..n-1 of K(i/n) (X_{i+1:n} - X_{i:n}), so no quadrature is involved.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import ConstraintModel
from .divergences import DivergenceGenerator, chi2
from .dual import ConstraintIntegrals, DualState, profiled_objective
from .errors import EstimationFailure, InsufficientDataError, ValidationError
from .lmoments import LMomentBasis
from .mixture import ParameterSpace, StartTrace, nelder_mead_start

logger = logging.getLogger(__name__)


@dataclass
class SpacingsProblem:
    """Duck-types the dual problem with spacings as weights at the nodes i/n."""

    m: np.ndarray
    basis: LMomentBasis
    integrals: ConstraintIntegrals


def spacings_integrals(data, basis: LMomentBasis) -> ConstraintIntegrals:
    x = np.sort(np.asarray(data, dtype=float).ravel())
    n = x.size
    if n < max(basis.max_order, 2):
        raise InsufficientDataError(f"SPLQ with order {basis.max_order} needs at least {basis.max_order} observations")
    if not np.all(np.isfinite(x)):
        raise ValidationError("sample contains non-finite values")
    spacings = np.diff(x)
    if not np.any(spacings > 0):
        raise InsufficientDataError("all observations are tied; the spacings are degenerate")
    k = basis.evaluate(np.arange(1, n) / n)
    return ConstraintIntegrals(
        nodes=x[:-1],
        weights=spacings,
        k_values=k,
        b=spacings @ k,
        omega=(k.T * spacings) @ k,
        error=0.0,
        converged=True,
        plan=None,
    )


def spacings_problem(data, basis: LMomentBasis, m_alpha: Sequence[float]) -> SpacingsProblem:
    return SpacingsProblem(m=np.asarray(m_alpha, dtype=float), basis=basis, integrals=spacings_integrals(data, basis))


@dataclass
class SplqFit:
    alpha: dict[str, float]
    xi: np.ndarray
    objective: float
    spacings: int
    starts: list[StartTrace] = field(default_factory=list)
    divergence: str = "chi2"

    def as_dict(self) -> dict:
        return {
            "alpha": dict(self.alpha),
            "xi": [float(v) for v in self.xi],
            "objective": self.objective,
            "spacings": self.spacings,
            "divergence": self.divergence,
            "starts": [s.as_dict() for s in self.starts],
        }


class SpacingsEvaluator:
    def __init__(self, integrals: ConstraintIntegrals, constraints: ConstraintModel, basis: LMomentBasis, generator):
        self.integrals = integrals
        self.constraints = constraints
        self.basis = basis
        self.generator = generator

    def profile(self, alpha: Sequence[float], xi0: Optional[np.ndarray] = None) -> DualState:
        problem = SpacingsProblem(m=self.constraints.m(alpha), basis=self.basis, integrals=self.integrals)
        return profiled_objective(problem, self.generator, xi0=xi0)


def splq_fit(
    data,
    constraints: ConstraintModel,
    space: ParameterSpace,
    generator: Optional[DivergenceGenerator] = None,
    starts: Sequence[Sequence[float]] = (),
) -> SplqFit:
    """arginf over alpha of sup_xi xi^t m(alpha) - sum psi(xi^t K(i/n)) dX_i."""
    generator = generator or chi2()
    if space.proportion_first:
        space = ParameterSpace(space.lower, space.upper, proportion_first=False)
    if len(space.lower) != constraints.dimension:
        raise ValidationError(f"alpha box has {len(space.lower)} sides for {constraints.dimension} parameters")
    basis = LMomentBasis(constraints.orders)
    integrals = spacings_integrals(data, basis)
    evaluator = SpacingsEvaluator(integrals, constraints, basis, generator)

    points = [space.centre()] + [np.asarray(s, dtype=float) for s in starts]
    traces = [nelder_mead_start(evaluator, space, p) for p in points]
    finite = [t for t in traces if math.isfinite(t.value)]
    if not finite:
        raise EstimationFailure("no SPLQ start produced a finite objective", traces=traces)
    best = min(finite, key=lambda t: (t.value, t.phi))
    state = evaluator.profile(best.phi)
    return SplqFit(
        alpha=dict(zip(constraints.free, best.phi)),
        xi=state.xi,
        objective=float(state.value),
        spacings=int(integrals.weights.size),
        starts=traces,
        divergence=generator.name,
    )
