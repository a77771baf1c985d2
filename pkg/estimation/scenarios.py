"""Simulation scenarios: true mixtures, estimation templates and start lists.

The Weibull-lognormal and Gaussian/two-sided Weibull start lists are the
reference ones for those studies. The others are spread around the truth and
towards the box edges.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .distributions import ComponentDistribution, ConstraintModel, MixtureSpec
from .errors import NotFound, ValidationError
from .mixture import MixtureModel, ParameterSpace

LAMBDA_BOX = (0.005, 0.995)
SHAPE_BOX = (0.2, 20.0)
LOG_LOCATION_BOX = (-5.0, 10.0)
LOCATION_BOX = (-10.0, 10.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int
    truth: MixtureSpec
    model: MixtureModel
    space: ParameterSpace
    starts: tuple[tuple[float, ...], ...]
    description: str = ""

    @property
    def truth_phi(self) -> tuple[float, ...]:
        theta = [self.truth.parametric[name] for name in self.model.theta_names]
        alpha = [self.truth.unknown[name] for name in self.model.constraints.free]
        return (self.truth.proportion, *theta, *alpha)

    def with_n(self, n: Optional[int]) -> "Scenario":
        if n is None:
            return self
        if int(n) < 1:
            raise ValidationError(f"sample size must be positive, got {n}")
        return replace(self, n=int(n))


def _weibull_lognormal(name, n, lam):
    """Lognormal(mu, 0.5) parametric with weight lam, Weibull(1, nu) unknown."""
    parametric = ComponentDistribution.of("lognormal", mu=3.0, sigma=0.5)
    unknown = ComponentDistribution.of("weibull", scale=1.0, shape=1.5)
    return Scenario(
        name=name,
        n=n,
        truth=MixtureSpec(lam, parametric, unknown),
        model=MixtureModel(parametric, ("mu",), ConstraintModel(unknown, ("shape",), (2, 3, 4))),
        space=ParameterSpace((LAMBDA_BOX[0], LOG_LOCATION_BOX[0], SHAPE_BOX[0]), (LAMBDA_BOX[1], LOG_LOCATION_BOX[1], SHAPE_BOX[1])),
        starts=((0.8, 2, 1), (0.5, 2, 1), (0.8, 1, 1), (0.7, 3, 1.5), (0.7, 2, 2), (0.5, 4, 2), (0.5, 1.5, 2)),
        description="lambda Lognormal(mu=3, sigma=0.5) + (1-lambda) Weibull(scale=1, shape=1.5)",
    )


def _weibull_parametric(name, n, lam, shape, starts):
    """Weibull(1, nu) parametric with weight lam, Lognormal(mu, 0.5) unknown."""
    parametric = ComponentDistribution.of("weibull", scale=1.0, shape=shape)
    unknown = ComponentDistribution.of("lognormal", mu=3.0, sigma=0.5)
    return Scenario(
        name=name,
        n=n,
        truth=MixtureSpec(lam, parametric, unknown),
        model=MixtureModel(parametric, ("shape",), ConstraintModel(unknown, ("mu",), (2, 3, 4))),
        space=ParameterSpace((LAMBDA_BOX[0], SHAPE_BOX[0], LOG_LOCATION_BOX[0]), (LAMBDA_BOX[1], SHAPE_BOX[1], LOG_LOCATION_BOX[1])),
        starts=starts,
        description=f"lambda Weibull(scale=1, shape={shape:g}) + (1-lambda) Lognormal(mu=3, sigma=0.5)",
    )


def _gaussian_two_sided(name, n, lam, shape, scale, starts):
    """Gaussian(mu, 0.5) parametric with weight lam, two-sided Weibull(scale, nu) unknown."""
    parametric = ComponentDistribution.of("gaussian", mu=0.0, sigma=0.5)
    unknown = ComponentDistribution.of("two-sided-weibull", scale=scale, shape=shape)
    return Scenario(
        name=name,
        n=n,
        truth=MixtureSpec(lam, parametric, unknown),
        model=MixtureModel(parametric, ("mu",), ConstraintModel(unknown, ("shape",), (2, 3, 4))),
        space=ParameterSpace((LAMBDA_BOX[0], LOCATION_BOX[0], SHAPE_BOX[0]), (LAMBDA_BOX[1], LOCATION_BOX[1], SHAPE_BOX[1])),
        starts=starts,
        description=f"lambda N(mu=0, 0.5) + (1-lambda) two-sided Weibull(scale={scale:g}, shape={shape:g})",
    )


def _weibull_weibull(name, n, lam):
    parametric = ComponentDistribution.of("weibull", scale=0.5, shape=2.0)
    unknown = ComponentDistribution.of("weibull", scale=1.0, shape=1.0)
    return Scenario(
        name=name,
        n=n,
        truth=MixtureSpec(lam, parametric, unknown),
        model=MixtureModel(parametric, ("shape",), ConstraintModel(unknown, ("shape",), (2, 3, 4))),
        space=ParameterSpace((LAMBDA_BOX[0], SHAPE_BOX[0], SHAPE_BOX[0]), (LAMBDA_BOX[1], SHAPE_BOX[1], SHAPE_BOX[1])),
        starts=((0.3, 2, 1), (0.5, 1.5, 1.5), (0.2, 3, 0.8), (0.4, 1, 1.2), (0.6, 2.5, 1), (0.1, 2, 2)),
        description="lambda Weibull(scale=0.5, shape=2) + (1-lambda) Weibull(scale=1, shape=1)",
    )


def _registry() -> dict[str, Scenario]:
    scenarios = [
        _weibull_weibull("table1-mix1", 10_000, 0.3),
        _weibull_lognormal("table2-n100", 100, 0.7),
        _weibull_lognormal("table2-n1000", 1_000, 0.7),
        _weibull_lognormal("table2-n10000", 10_000, 0.7),
        _weibull_parametric(
            "table3-mix1", 1_000, 0.3, 1.5,
            ((0.3, 1.5, 3), (0.5, 1, 2.5), (0.2, 0.5, 3.5), (0.4, 2, 2), (0.1, 0.5, 1), (0.15, 0.5, 0.7)),
        ),
        _weibull_parametric(
            "table3-mix2", 10_000, 0.1, 1.0,
            ((0.1, 0.5, 1), (0.15, 0.5, 0.7), (0.05, 1.5, 2.5), (0.1, 1, 3)),
        ),
        _weibull_parametric(
            "table3-mix3", 50_000, 0.05, 0.4,
            ((0.05, 0.4, 3), (0.1, 1, 3), (0.03, 0.5, 2.5), (0.08, 0.7, 3.5)),
        ),
        _gaussian_two_sided(
            "table4-mix1", 100, 0.7, 3.0, 1.5,
            ((0.8, 1, 1), (0.5, -1, 2.5), (0.8, 0.5, 2), (0.7, 0, 3), (0.7, 1, 4), (0.5, 2, 3.5)),
        ),
        _gaussian_two_sided(
            "table4-mix2", 100, 0.3, 3.0, 1.5,
            ((0.2, 1, 1), (0.5, -1, 2.5), (0.2, 0.5, 2), (0.3, 0, 3), (0.3, 1, 4)),
        ),
        _gaussian_two_sided(
            "table4-mix3", 5_000, 0.05, 1.5, 2.0,
            ((0.1, 1, 1), (0.05, -1, 2.5), (0.03, 0.5, 2), (0.01, 0, 1.5), (0.005, 1, 0.7)),
        ),
        _gaussian_two_sided(
            "table4-mix4", 100_000, 0.01, 1.5, 2.0,
            ((0.1, 1, 1), (0.005, 1, 0.7)),
        ),
    ]
    return {s.name: s for s in scenarios}


SCENARIOS = _registry()
ALIASES = {"table2": "table2-n1000"}


def scenario_names() -> list[str]:
    return sorted(SCENARIOS) + sorted(ALIASES)


def get_scenario(name: str, n: Optional[int] = None) -> Scenario:
    key = ALIASES.get(name, name)
    try:
        scenario = SCENARIOS[key]
    except KeyError:
        raise NotFound(f"unknown scenario {name!r}; available: {', '.join(scenario_names())}") from None
    return scenario.with_n(n)


def _component(document: dict, where: str) -> ComponentDistribution:
    if not isinstance(document, dict) or "family" not in document:
        raise ValidationError(f"{where}: expected an object with a 'family' key")
    values = {k: float(v) for k, v in document.items() if k != "family"}
    return ComponentDistribution.of(document["family"], **values)


def scenario_from_dict(document: dict, n: Optional[int] = None) -> Scenario:
    """Custom scenario from a JSON ``model`` object.

    Keys: ``lambda``, ``parametric`` and ``unknown`` (family plus parameter
    values, used as truth and as the fixed values of non-free parameters),
    ``theta`` and ``alpha`` (free names), optional ``orders``, ``lower``,
    ``upper``, ``starts``, ``n`` and ``name``.
    """
    try:
        parametric = _component(document["parametric"], "parametric")
        unknown = _component(document["unknown"], "unknown")
        lam = float(document["lambda"])
        theta = tuple(document.get("theta", ()))
        alpha = tuple(document.get("alpha", ()))
    except KeyError as exc:
        raise ValidationError(f"model: missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"model: {exc}") from None
    orders = tuple(int(r) for r in document.get("orders", (2, 3, 4)))
    model = MixtureModel(parametric, theta, ConstraintModel(unknown, alpha, orders))
    lower = tuple(float(v) for v in document.get("lower", ()))
    upper = tuple(float(v) for v in document.get("upper", ()))
    if len(lower) != model.dimension or len(upper) != model.dimension:
        raise ValidationError(f"model: 'lower' and 'upper' need {model.dimension} entries for {model.names}")
    space = ParameterSpace(lower, upper)
    starts = tuple(tuple(float(v) for v in s) for s in document.get("starts", ()))
    size = n if n is not None else document.get("n", 1000)
    scenario = Scenario(
        name=str(document.get("name", "custom")),
        n=1,
        truth=MixtureSpec(lam, parametric, unknown),
        model=model,
        space=space,
        starts=starts or (tuple(float(v) for v in space.centre()),),
        description=f"lambda {parametric.describe()} + (1-lambda) {unknown.describe()}",
    )
    return scenario.with_n(size)
