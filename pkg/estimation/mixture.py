"""Semiparametric two-component mixture estimation by multi-start Nelder-Mead."""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .conf import numeric_setting
from .distributions import ComponentDistribution, ConstraintModel, MixtureSpec
from .divergences import DivergenceGenerator, chi2
from .dual import DualProblem, DualState, profiled_objective
from .errors import EstimationError, EstimationFailure, InsufficientDataError, ValidationError
from .events.event_types import EventType
from .events.helpers import log_event
from .lmoments import LMomentBasis
from .signed_cdf import EmpiricalCdf, PhiPlusCheck, phi_plus_check, phi_plus_check_empirical

logger = logging.getLogger(__name__)

MIN_SAMPLE_SIZE = 30


# ---------- Model and parameter space ----------
@dataclass(frozen=True)
class MixtureModel:
    """F = lambda F1(.|theta) + (1 - lambda) F0 with F0 constrained through m(alpha)."""

    parametric: ComponentDistribution
    theta_names: tuple[str, ...]
    constraints: ConstraintModel

    def __post_init__(self):
        for name in self.theta_names:
            if name not in self.parametric.values:
                raise ValidationError(f"{self.parametric.family} has no parameter {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return (
            ("lambda",)
            + tuple(f"theta_{n}" for n in self.theta_names)
            + tuple(f"alpha_{n}" for n in self.constraints.free)
        )

    @property
    def dimension(self) -> int:
        return 1 + len(self.theta_names) + self.constraints.dimension

    def unpack(self, phi: Sequence[float]) -> tuple[float, ComponentDistribution, np.ndarray]:
        phi = np.asarray(phi, dtype=float)
        if phi.size != self.dimension:
            raise ValidationError(f"expected {self.dimension} parameters {self.names}, got {phi.size}")
        k = len(self.theta_names)
        parametric = self.parametric.with_values(dict(zip(self.theta_names, phi[1 : 1 + k].tolist())))
        return float(phi[0]), parametric, phi[1 + k :]

    def split(self, phi: Sequence[float]) -> tuple[float, dict[str, float], dict[str, float]]:
        phi = [float(v) for v in phi]
        k = len(self.theta_names)
        theta = dict(zip(self.theta_names, phi[1 : 1 + k]))
        alpha = dict(zip(self.constraints.free, phi[1 + k :]))
        return phi[0], theta, alpha


@dataclass(frozen=True)
class ParameterSpace:
    """Compact box; the first coordinate is the mixture weight unless ``proportion_first`` is off."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    proportion_first: bool = True

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValidationError("box bounds differ in length")
        for lo, hi in zip(self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValidationError(f"invalid box side [{lo}, {hi}]")

    @property
    def effective_lower(self) -> np.ndarray:
        lo = np.asarray(self.lower, dtype=float).copy()
        if self.proportion_first:
            lo[0] = max(lo[0], numeric_setting("LAMBDA_MIN"))
        return lo

    @property
    def effective_upper(self) -> np.ndarray:
        hi = np.asarray(self.upper, dtype=float).copy()
        if self.proportion_first:
            hi[0] = min(hi[0], numeric_setting("LAMBDA_MAX"))
        return hi

    def project(self, point: Sequence[float]) -> np.ndarray:
        """Reflect once across a violated side, then clip."""
        x = np.asarray(point, dtype=float).copy()
        lo, hi = self.effective_lower, self.effective_upper
        x = np.where(x < lo, 2 * lo - x, x)
        x = np.where(x > hi, 2 * hi - x, x)
        return np.clip(x, lo, hi)

    def centre(self) -> np.ndarray:
        return 0.5 * (self.effective_lower + self.effective_upper)


# ---------- Evaluation ----------
class ProfileEvaluator:
    """phi -> sup_xi H_n(phi, xi) for one data set (or one true CDF)."""

    def __init__(
        self,
        model: MixtureModel,
        cdf,
        generator: Optional[DivergenceGenerator] = None,
    ):
        self.model = model
        self.cdf = cdf
        self.generator = generator or chi2()
        self.basis = LMomentBasis(model.constraints.orders)

    def problem(self, phi: Sequence[float]) -> DualProblem:
        lam, parametric, alpha = self.model.unpack(phi)
        return DualProblem.build(lam, parametric, self.model.constraints.m(alpha), self.cdf, self.basis)

    def profile(self, phi: Sequence[float], xi0: Optional[np.ndarray] = None) -> DualState:
        return profiled_objective(self.problem(phi), self.generator, xi0=xi0)


@dataclass(frozen=True)
class StartTrace:
    start: tuple[float, ...]
    phi: tuple[float, ...]
    value: float
    iterations: int
    evaluations: int
    converged: bool
    message: str
    error: str = ""

    def as_dict(self) -> dict:
        return {
            "start": list(self.start),
            "phi": list(self.phi),
            "objective": self.value,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "message": self.message,
            "error": self.error,
        }


@dataclass
class EstimationResult:
    names: tuple[str, ...]
    phi: np.ndarray
    lam: float
    theta: dict[str, float]
    alpha: dict[str, float]
    xi: np.ndarray
    objective: float
    phi_plus: bool
    starts: list[StartTrace]
    n: int
    divergence: str
    seconds: float = 0.0
    phi_plus_witness: Optional[float] = None
    asymptotics: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "lambda": self.lam,
            "theta": dict(self.theta),
            "alpha": dict(self.alpha),
            "xi": [float(v) for v in self.xi],
            "objective": self.objective,
            "phi_plus": self.phi_plus,
            "n": self.n,
            "divergence": self.divergence,
            "starts": [s.as_dict() for s in self.starts],
            "diagnostics": dict(self.diagnostics),
        }
        if self.asymptotics is not None:
            out["asymptotics"] = self.asymptotics
        return out


def _initial_simplex(x0: np.ndarray, space: ParameterSpace) -> np.ndarray:
    width = space.effective_upper - space.effective_lower
    steps = 0.05 * np.maximum(np.abs(x0), 0.05 * width)
    steps = np.where(steps > 0, steps, 0.05)
    simplex = np.tile(x0, (x0.size + 1, 1))
    for j in range(x0.size):
        simplex[j + 1, j] += steps[j]
    return simplex


def nelder_mead_start(evaluator: ProfileEvaluator, space: ParameterSpace, start: np.ndarray) -> StartTrace:
    """One Nelder-Mead run in box-scaled coordinates.

    Stops when the simplex diameter relative to the box width drops below
    ``NM_XATOL`` or after ``NM_MAXITER`` iterations; objective spread plays no part.
    """
    warm: dict[str, Optional[np.ndarray]] = {"xi": None}
    lower = space.effective_lower
    width = space.effective_upper - lower
    width = np.where(width > 0, width, 1.0)

    def objective(z):
        phi = space.project(lower + z * width)
        try:
            state = evaluator.profile(phi, xi0=warm["xi"])
        except EstimationError as exc:
            logger.debug("objective failed at %s: %s", phi, exc)
            return math.inf
        if not math.isfinite(state.value):
            return math.inf
        warm["xi"] = state.xi
        return state.value

    x0 = space.project(start)
    try:
        res = optimize.minimize(
            objective,
            (x0 - lower) / width,
            method="Nelder-Mead",
            options={
                "xatol": numeric_setting("NM_XATOL"),
                "fatol": np.inf,
                "maxiter": int(numeric_setting("NM_MAXITER")),
                "initial_simplex": (_initial_simplex(x0, space) - lower) / width,
            },
        )
    except Exception as exc:  # noqa: BLE001 - recorded in the trace
        logger.exception("start %s crashed", start)
        return StartTrace(tuple(map(float, start)), tuple(map(float, x0)), math.inf, 0, 0, False, "crashed", str(exc))
    phi = space.project(lower + res.x * width)

    return StartTrace(
        start=tuple(float(v) for v in start),
        phi=tuple(float(v) for v in phi),
        value=float(res.fun),
        iterations=int(res.nit),
        evaluations=int(res.nfev),
        converged=bool(res.success),
        message=str(res.message),
    )


def _pick_best(traces: Sequence[StartTrace]) -> StartTrace:
    finite = [t for t in traces if math.isfinite(t.value)]
    return min(finite, key=lambda t: (t.value, t.phi))


def check_phi_plus(model: MixtureModel, phi: Sequence[float], cdf) -> PhiPlusCheck:
    lam, parametric, _ = model.unpack(phi)
    if isinstance(cdf, EmpiricalCdf):
        return phi_plus_check_empirical(lam, parametric, cdf)
    return phi_plus_check(lam, parametric, cdf)


def estimate(
    data,
    model: MixtureModel,
    space: ParameterSpace,
    starts: Sequence[Sequence[float]] = (),
    generator: Optional[DivergenceGenerator] = None,
    *,
    seed: Optional[int] = None,
    random_starts: int = 0,
    jobs: Optional[int] = None,
    scenario: str = "",
) -> EstimationResult:
    """Minimises the profiled dual objective over the box from every start.

    ``data`` is a sample or, for checks against the model itself, a
    ``MixtureSpec`` whose exact CDF replaces the empirical one. ``seed`` only
    drives the optional uniformly drawn extra starts.
    """
    began = time.perf_counter()
    generator = generator or chi2()
    if isinstance(data, MixtureSpec):
        cdf, n = data, 0
    else:
        cdf = data if isinstance(data, EmpiricalCdf) else EmpiricalCdf(data)
        n = cdf.n
        if n < MIN_SAMPLE_SIZE:
            raise InsufficientDataError(f"mixture estimation needs at least {MIN_SAMPLE_SIZE} observations, got {n}")
    if len(space.lower) != model.dimension:
        raise ValidationError(f"parameter box has {len(space.lower)} sides for {model.dimension} parameters")

    start_points = [np.asarray(s, dtype=float) for s in starts]
    for s in start_points:
        if s.size != model.dimension:
            raise ValidationError(f"start {s.tolist()} does not match parameters {model.names}")
    if random_starts:
        rng = np.random.default_rng(seed)
        lo, hi = space.effective_lower, space.effective_upper
        start_points.extend(lo + (hi - lo) * rng.random(model.dimension) for _ in range(random_starts))
    if not start_points:
        start_points = [space.centre()]

    evaluator = ProfileEvaluator(model, cdf, generator)
    if evaluator.basis.size < model.dimension:
        log_event(EventType.FEW_CONSTRAINTS, {"constraints": evaluator.basis.size, "parameters": model.dimension})
    log_event(
        EventType.ESTIMATION_STARTED,
        {"scenario": scenario, "n": n, "starts": len(start_points), "divergence": generator.name},
    )

    jobs = int(jobs or numeric_setting("JOBS"))
    if jobs > 1 and len(start_points) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(lambda s: nelder_mead_start(evaluator, space, s), start_points))
    else:
        traces = [nelder_mead_start(evaluator, space, s) for s in start_points]

    for trace in traces:
        if not math.isfinite(trace.value):
            log_event(EventType.START_FAILED, {"start": list(trace.start), "error": trace.error or trace.message})
    if not any(math.isfinite(t.value) for t in traces):
        raise EstimationFailure("no start produced a finite objective", traces=traces)

    best = _pick_best(traces)
    finite_values = [t.value for t in traces if math.isfinite(t.value)]
    spread = max(finite_values) - min(finite_values)
    if spread > 1e-3:
        log_event(EventType.MULTISTART_DISAGREEMENT, {"spread": spread})

    state = evaluator.profile(best.phi)
    membership = check_phi_plus(model, best.phi, cdf)
    if not membership:
        log_event(EventType.PHI_PLUS_VIOLATION, {"phi": list(best.phi), "witness": membership.witness})

    lam, theta, alpha = model.split(best.phi)
    result = EstimationResult(
        names=model.names,
        phi=np.asarray(best.phi),
        lam=lam,
        theta=theta,
        alpha=alpha,
        xi=state.xi,
        objective=float(state.value),
        phi_plus=bool(membership),
        phi_plus_witness=membership.witness,
        starts=list(traces),
        n=n,
        divergence=generator.name,
        seconds=time.perf_counter() - began,
        diagnostics={
            "omega_condition": float(state.condition),
            "gradient_norm": float(state.gradient_norm),
            "quadrature_converged": bool(state.converged),
            "start_spread": float(spread),
        },
    )
    log_event(EventType.ESTIMATION_FINISHED, {"phi": list(best.phi), "objective": result.objective})
    return result


def objective_trace(
    evaluator: ProfileEvaluator,
    path: Sequence[Sequence[float]],
) -> list[float]:
    """Profiled objective along a user path; failed points come back as NaN."""
    values = []
    for phi in path:
        try:
            values.append(float(evaluator.profile(phi).value))
        except EstimationError as exc:
            logger.debug("trace point %s failed: %s", list(phi), exc)
            values.append(math.nan)
    return values


def phi_plus_grid(
    parametric: ComponentDistribution,
    theta_name: str,
    truth,
    lambdas: Sequence[float],
    thetas: Sequence[float],
    grid_size: int = 1000,
) -> list[tuple[float, float, bool]]:
    """Phi+ membership over a (lambda, theta) grid for one free parametric coordinate."""
    rows = []
    for lam in lambdas:
        for value in thetas:
            component = parametric.with_values({theta_name: value})
            rows.append((float(lam), float(value), bool(phi_plus_check(lam, component, truth, grid_size))))
    return rows
