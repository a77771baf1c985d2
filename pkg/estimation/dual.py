"""Inner supremum over xi of H(phi, xi) and the profiled objective.

For a fixed phi the signed sub-CDF is integrated once on an adaptive rule
that resolves K(F0) and K K^t; every xi-dependent integral afterwards is a
weighted sum over the same nodes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .conf import numeric_setting
from .distributions import ComponentDistribution
from .divergences import DivergenceGenerator, chi2
from .errors import DivergenceDomainError, LineSearchError, SingularMatrixError
from .events.event_types import EventType
from .events.helpers import log_event
from .lmoments import LMomentBasis
from .quadrature import IntegrationPlan, decimated_breakpoints, integrate, truncation_plan
from .signed_cdf import EmpiricalCdf, SignedSubCdf

logger = logging.getLogger(__name__)


# ---------- Plans ----------
def plan_for(parametric: ComponentDistribution, mixture, *, rtol: Optional[float] = None) -> IntegrationPlan:
    """Truncation range and breakpoints for integrands built on F0(.|phi)."""
    mass = numeric_setting("TAIL_MASS")
    ranges = [parametric.tail_range(mass)]
    breakpoints: Sequence[float] = ()
    if isinstance(mixture, EmpiricalCdf):
        ranges.append(mixture.range)
        breakpoints = decimated_breakpoints(mixture.sorted)
    elif hasattr(mixture, "tail_ranges"):
        ranges.extend(mixture.tail_ranges(mass))
    return truncation_plan(ranges, breakpoints=breakpoints, rtol=rtol)


# ---------- Integrals shared by every xi ----------
@dataclass
class ConstraintIntegrals:
    """b = int K(F0) dy and Omega = int K(F0) K(F0)^t dy with the rule that produced them."""

    nodes: np.ndarray
    weights: np.ndarray
    k_values: np.ndarray  # K(F0(nodes)), shape (N, m)
    b: np.ndarray
    omega: np.ndarray
    error: float
    converged: bool
    plan: IntegrationPlan


def constraint_integrals(signed: SignedSubCdf, basis: LMomentBasis, plan: IntegrationPlan) -> ConstraintIntegrals:
    m = basis.size
    iu = np.triu_indices(m)

    def integrand(y):
        k = basis.evaluate(signed(y))
        outer = k[:, iu[0]] * k[:, iu[1]]
        return np.concatenate([k, outer], axis=1)

    result = integrate(integrand, plan, keep_rule=True)
    if not result.converged:
        log_event(EventType.QUADRATURE_NOT_CONVERGED, {"what": "constraint integrals", "error": result.error})
    # b and Omega come from the kept rule so every xi sees the same discretisation
    nodes, weights = result.extra["nodes"], result.extra["weights"]
    k_values = basis.evaluate(signed(nodes))
    weighted = k_values * weights[:, None]
    omega = weighted.T @ k_values
    return ConstraintIntegrals(
        nodes=nodes,
        weights=weights,
        k_values=k_values,
        b=weighted.sum(axis=0),
        omega=0.5 * (omega + omega.T),
        error=result.error,
        converged=result.converged,
        plan=plan,
    )


@dataclass
class DualProblem:
    """Everything needed to evaluate H(phi, .) for one phi."""

    m: np.ndarray
    signed: SignedSubCdf
    basis: LMomentBasis
    plan: IntegrationPlan
    _integrals: Optional[ConstraintIntegrals] = field(default=None, repr=False)

    @classmethod
    def build(
        cls,
        lam: float,
        parametric: ComponentDistribution,
        m_alpha: Sequence[float],
        mixture,
        basis: LMomentBasis,
        plan: Optional[IntegrationPlan] = None,
    ) -> "DualProblem":
        signed = SignedSubCdf(mixture, parametric, lam)
        return cls(
            m=np.asarray(m_alpha, dtype=float),
            signed=signed,
            basis=basis,
            plan=plan or plan_for(parametric, mixture),
        )

    @property
    def integrals(self) -> ConstraintIntegrals:
        if self._integrals is None:
            self._integrals = constraint_integrals(self.signed, self.basis, self.plan)
        return self._integrals


@dataclass(frozen=True)
class DualState:
    xi: np.ndarray
    value: float
    gradient_norm: float
    omega: np.ndarray
    b: np.ndarray
    iterations: int = 0
    condition: float = float("nan")
    converged: bool = True
    trace: tuple = ()


# ---------- H and its derivatives ----------
def _psi_terms(problem: DualProblem, xi: np.ndarray, generator: DivergenceGenerator, derivatives: bool):
    ints = problem.integrals
    t = ints.k_values @ xi
    inside = generator.in_domain(t)
    if not np.all(inside):
        j = int(np.flatnonzero(~inside)[0])
        raise DivergenceDomainError(float(t[j]), float(ints.nodes[j]))
    w = ints.weights
    value = float(xi @ problem.m - w @ generator.psi(t))
    if not derivatives:
        return value, None, None
    gradient = problem.m - ints.k_values.T @ (w * generator.psi_prime(t))
    hessian = -(ints.k_values.T * (w * generator.psi_second(t))) @ ints.k_values
    return value, gradient, hessian


def objective_H(problem: DualProblem, xi: Sequence[float], generator: Optional[DivergenceGenerator] = None) -> float:
    """xi^t m(alpha) - int psi(xi^t K(F0(y))) dy."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    value, _, _ = _psi_terms(problem, xi, generator or chi2(), derivatives=False)
    return value


def dual_gradient(problem: DualProblem, xi: Sequence[float], generator: Optional[DivergenceGenerator] = None) -> np.ndarray:
    """m(alpha) - int K psi'(xi^t K) dy."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    _, gradient, _ = _psi_terms(problem, xi, generator or chi2(), derivatives=True)
    return gradient


def symmetric_solve(matrix: np.ndarray, rhs: np.ndarray, *, what: str = "Omega"):
    """Solves matrix @ x = rhs through an eigendecomposition; returns (x, condition)."""
    limit = numeric_setting("COND_LIMIT")
    eigenvalues, vectors = linalg.eigh(matrix)
    largest = float(np.max(np.abs(eigenvalues)))
    smallest = float(eigenvalues[0])
    condition = largest / smallest if smallest > 0 else float("inf")
    if not condition <= limit:
        raise SingularMatrixError(f"{what} is numerically singular", condition=condition, direction=vectors[:, 0])
    rhs = np.asarray(rhs, dtype=float)
    scale = eigenvalues[:, None] if rhs.ndim == 2 else eigenvalues
    return vectors @ ((vectors.T @ rhs) / scale), condition


def _warn_large(xi: np.ndarray) -> None:
    norm = float(np.linalg.norm(xi))
    if norm > numeric_setting("XI_NORM_WARN"):
        log_event(EventType.XI_NORM_LARGE, {"norm": norm})


def inner_sup_chi2(problem: DualProblem) -> DualState:
    """xi = Omega^-1 (m - b), H = (1/2)(m - b)^t Omega^-1 (m - b)."""
    ints = problem.integrals
    residual = problem.m - ints.b
    xi, condition = symmetric_solve(ints.omega, residual)
    value = float(xi @ residual - 0.5 * xi @ ints.omega @ xi)
    gradient = residual - ints.omega @ xi
    _warn_large(xi)
    return DualState(
        xi=xi,
        value=value,
        gradient_norm=float(np.linalg.norm(gradient)),
        omega=ints.omega,
        b=ints.b,
        condition=condition,
        converged=ints.converged,
    )


def inner_sup_newton(
    problem: DualProblem,
    generator: DivergenceGenerator,
    *,
    xi0: Optional[Sequence[float]] = None,
    tolerance: float = 1e-9,
    max_iterations: int = 100,
    armijo: float = 1e-4,
    max_halvings: int = 60,
) -> DualState:
    """Damped Newton ascent on the concave map xi -> H(phi, xi)."""
    ints = problem.integrals
    xi = np.zeros(problem.basis.size) if xi0 is None else np.asarray(xi0, dtype=float).copy()
    try:
        value, gradient, hessian = _psi_terms(problem, xi, generator, derivatives=True)
    except DivergenceDomainError:
        # warm start left the domain
        xi = np.zeros(problem.basis.size)
        value, gradient, hessian = _psi_terms(problem, xi, generator, derivatives=True)

    trace = [value]
    iterations = 0
    condition = float("nan")
    while float(np.linalg.norm(gradient)) > tolerance and iterations < max_iterations:
        direction, condition = symmetric_solve(-hessian, gradient, what="dual Hessian")
        slope = float(gradient @ direction)
        step = 1.0
        for _ in range(max_halvings):
            candidate = xi + step * direction
            try:
                c_value, c_gradient, c_hessian = _psi_terms(problem, candidate, generator, derivatives=True)
            except DivergenceDomainError:
                step *= 0.5
                continue
            slack = 1e-13 * (1.0 + abs(value))
            if c_value >= value + armijo * step * slope - slack:
                break
            step *= 0.5
        else:
            raise LineSearchError(
                f"line search failed after {max_halvings} halvings (gradient norm {np.linalg.norm(gradient):.3e})",
                last_xi=xi,
            )
        xi, value, gradient, hessian = candidate, c_value, c_gradient, c_hessian
        iterations += 1
        trace.append(value)

    _warn_large(xi)
    grad_norm = float(np.linalg.norm(gradient))
    if grad_norm > tolerance:
        logger.debug("Newton stopped after %d iterations with gradient norm %.3e", iterations, grad_norm)
    return DualState(
        xi=xi,
        value=value,
        gradient_norm=grad_norm,
        omega=ints.omega,
        b=ints.b,
        iterations=iterations,
        condition=condition,
        converged=ints.converged and grad_norm <= tolerance,
        trace=tuple(trace),
    )


def profiled_objective(
    problem: DualProblem,
    generator: Optional[DivergenceGenerator] = None,
    *,
    xi0: Optional[Sequence[float]] = None,
) -> DualState:
    """sup_xi H(phi, xi): closed form for chi-square, Newton otherwise."""
    generator = generator or chi2()
    if generator.is_quadratic:
        return inner_sup_chi2(problem)
    return inner_sup_newton(problem, generator, xi0=xi0)
