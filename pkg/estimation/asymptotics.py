"""Plug-in asymptotic covariance of (phi_hat, xi_n(phi_hat)).

All matrices are evaluated at phi_hat with the CDF the estimate was computed
from (the empirical one in practice), so every figure here is a plug-in value.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .conf import numeric_setting
from .dual import DualProblem, plan_for, symmetric_solve
from .errors import SingularMatrixError
from .events.event_types import EventType
from .events.helpers import log_event
from .lmoments import LMomentBasis
from .mixture import MixtureModel
from .quadrature import integrate, integrate2d
from .signed_cdf import SignedSubCdf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JacobianBlocks:
    """J = d(m - int K(F0))/d phi, shape (m, dim phi), and J_xixi = Omega."""

    j: np.ndarray
    omega: np.ndarray
    names: tuple[str, ...] = ()


@dataclass
class AsymptoticReport:
    sigma: np.ndarray
    j: np.ndarray
    omega: np.ndarray
    sigma_tilde: np.ndarray
    h: np.ndarray
    p: np.ndarray
    s: np.ndarray
    n: int
    names: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def parameter_covariance(self) -> np.ndarray:
        return self.h @ self.sigma @ self.h.T

    @property
    def standard_errors(self) -> np.ndarray:
        if not self.n:
            return np.full(self.h.shape[0], np.nan)
        return np.sqrt(np.clip(np.diag(self.parameter_covariance), 0.0, None) / self.n)

    def as_dict(self) -> dict:
        return {
            "plugin": True,
            "n": self.n,
            "names": list(self.names),
            "standard_errors": dict(zip(self.names, self.standard_errors.tolist())),
            "sigma": self.sigma.tolist(),
            "j_phi_xi": self.j.tolist(),
            "j_xi_xi": self.omega.tolist(),
            "sigma_tilde": self.sigma_tilde.tolist(),
            "h": self.h.tolist(),
            "p": self.p.tolist(),
            "s": self.s.tolist(),
            "diagnostics": dict(self.diagnostics),
        }


def _signed(model: MixtureModel, phi: Sequence[float], cdf):
    lam, parametric, alpha = model.unpack(phi)
    return lam, parametric, alpha, SignedSubCdf(cdf, parametric, lam)


def constraint_covariance(
    model: MixtureModel,
    phi: Sequence[float],
    cdf,
    *,
    panels: Optional[int] = None,
    rtol: Optional[float] = None,
) -> tuple[np.ndarray, dict]:
    """Sigma_{r1 r2} = (1-lambda)^-2 iint (F(min(x,y)) - F(x)F(y)) K'_{r1}(F0(x)) K'_{r2}(F0(y)) dx dy."""
    lam, parametric, _, signed = _signed(model, phi, cdf)
    basis = LMomentBasis(model.constraints.orders)
    m = basis.size
    iu = np.triu_indices(m)
    plan = plan_for(parametric, cdf)

    def integrand(x, y):
        fx, fy = cdf.cdf(x), cdf.cdf(y)
        kernel = np.minimum(fx, fy) - fx * fy
        ax = basis.derivative(signed(x))
        ay = basis.derivative(signed(y))
        return kernel[:, None] * ax[:, iu[0]] * ay[:, iu[1]]

    result = integrate2d(integrand, plan, panels=panels, kink_on_diagonal=True, rtol=rtol)
    sigma = np.zeros((m, m))
    sigma[iu] = np.atleast_1d(result.value)
    sigma = sigma + np.triu(sigma, 1).T
    sigma /= (1.0 - lam) ** 2

    tail_mass = float(cdf.cdf(plan.lower)) + 1.0 - float(cdf.cdf(plan.upper))
    grid = np.linspace(plan.lower, plan.upper, 257)
    bound = float(np.max(np.abs(basis.derivative(signed(grid))))) if grid.size else 0.0
    tail_estimate = tail_mass * plan.width * bound**2 / (1.0 - lam) ** 2
    tolerance = numeric_setting("QUAD_RTOL_2D") * max(float(np.max(np.abs(sigma))), 1e-300)
    if tail_estimate > tolerance:
        log_event(EventType.TAIL_TRUNCATION, {"estimate": tail_estimate, "what": "the constraint covariance"})
    if not result.converged:
        log_event(EventType.QUADRATURE_NOT_CONVERGED, {"what": "the constraint covariance", "error": result.error})
    return sigma, {"sigma_error": result.error, "sigma_converged": result.converged, "tail_estimate": tail_estimate}


def jacobian_blocks(model: MixtureModel, phi: Sequence[float], cdf) -> JacobianBlocks:
    lam, parametric, alpha, signed = _signed(model, phi, cdf)
    basis = LMomentBasis(model.constraints.orders)
    m = basis.size
    theta_names = model.theta_names
    k = len(theta_names)
    plan = plan_for(parametric, cdf)

    def integrand(y):
        kprime = basis.derivative(signed(y))  # (N, m)
        lam_col = -((cdf.cdf(y) - parametric.cdf(y)) / (1.0 - lam) ** 2)[:, None] * kprime
        grad = parametric.cdf_gradient(y, theta_names)  # (N, k)
        theta_cols = (lam / (1.0 - lam)) * kprime[:, :, None] * grad[:, None, :]
        return np.concatenate([lam_col, theta_cols.reshape(y.size, m * k)], axis=1)

    result = integrate(integrand, plan)
    values = np.atleast_1d(result.value)
    lam_block = values[:m].reshape(m, 1)
    theta_block = values[m:].reshape(m, k)
    alpha_block = model.constraints.gradient(alpha)
    j = np.hstack([lam_block, theta_block, alpha_block])

    problem = DualProblem.build(lam, parametric, model.constraints.m(alpha), cdf, basis)
    return JacobianBlocks(j=j, omega=problem.integrals.omega, names=model.names)


def assemble_covariance(blocks: JacobianBlocks, sigma: np.ndarray, n: int) -> AsymptoticReport:
    """Sigma_tilde = (J^t Omega^-1 J)^-1, H = Sigma_tilde J^t Omega^-1, P = Omega^-1 - Omega^-1 J H."""
    j, omega = blocks.j, blocks.omega
    m, d = j.shape
    omega_inv_j, omega_condition = symmetric_solve(omega, j, what="J_xi_xi")
    omega_inv, _ = symmetric_solve(omega, np.eye(m), what="J_xi_xi")
    omega_inv = 0.5 * (omega_inv + omega_inv.T)
    normal = j.T @ omega_inv_j
    normal = 0.5 * (normal + normal.T)
    rank = int(np.linalg.matrix_rank(j))
    if rank < d:
        raise SingularMatrixError(
            f"J_phi_xi has rank {rank} < {d}; parameters are not locally identified",
            condition=float("inf"),
        )
    sigma_tilde, normal_condition = symmetric_solve(normal, np.eye(d), what="J^t J_xi_xi^-1 J")
    sigma_tilde = 0.5 * (sigma_tilde + sigma_tilde.T)
    h = sigma_tilde @ omega_inv_j.T
    p = omega_inv - omega_inv_j @ h
    p = 0.5 * (p + p.T)
    stacked = np.vstack([h, p])
    s = stacked @ sigma @ stacked.T
    s = 0.5 * (s + s.T)

    def psd_margin(matrix):
        floor = float(linalg.eigvalsh(matrix)[0])
        return floor / max(float(np.trace(matrix)), 1e-300)

    report = AsymptoticReport(
        sigma=sigma,
        j=j,
        omega=omega,
        sigma_tilde=sigma_tilde,
        h=h,
        p=p,
        s=s,
        n=int(n),
        names=blocks.names,
        diagnostics={
            "omega_condition": float(omega_condition),
            "normal_condition": float(normal_condition),
            "sigma_psd_margin": psd_margin(sigma),
            "s_psd_margin": psd_margin(s),
            "pj_max": float(np.max(np.abs(p @ j))),
        },
    )
    return report


def asymptotic_report(model: MixtureModel, phi: Sequence[float], cdf, n: int, *, panels: Optional[int] = None) -> AsymptoticReport:
    blocks = jacobian_blocks(model, phi, cdf)
    sigma, info = constraint_covariance(model, phi, cdf, panels=panels)
    report = assemble_covariance(blocks, sigma, n)
    report.diagnostics.update(info)
    return report
