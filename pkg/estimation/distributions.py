"""Component distributions, their L-moments, and two-component mixtures."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from django.db.models import TextChoices
from scipy import special, stats

from .errors import ValidationError
from .lmoments import LMomentVector, population_lmoments_by_quadrature

logger = logging.getLogger(__name__)


class Family(TextChoices):
    WEIBULL = "weibull", "Weibull"
    LOGNORMAL = "lognormal", "Lognormal"
    GAUSSIAN = "gaussian", "Gaussian"
    TWO_SIDED_WEIBULL = "two-sided-weibull", "Two-sided Weibull"
    EXPONENTIAL = "exponential", "Exponential"


PARAMETER_NAMES: dict[str, tuple[str, ...]] = {
    Family.WEIBULL: ("scale", "shape"),
    Family.LOGNORMAL: ("mu", "sigma"),
    Family.GAUSSIAN: ("mu", "sigma"),
    Family.TWO_SIDED_WEIBULL: ("scale", "shape"),
    Family.EXPONENTIAL: ("rate",),
}

POSITIVE_PARAMETERS = {"scale", "shape", "sigma", "rate"}


# ---------- closed-form L-moments ----------
def _positive(**params: float) -> None:
    for name, value in params.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValidationError(f"{name} must be positive and finite, got {value}")


def weibull_lmoments(scale: float, shape: float) -> tuple[float, float, float]:
    _positive(scale=scale, shape=shape)
    inv = 1.0 / shape
    d2 = -math.expm1(-inv * math.log(2.0))  # 1 - 2^{-1/nu}
    d3 = -math.expm1(-inv * math.log(3.0))
    d4 = -math.expm1(-inv * math.log(4.0))
    l2 = scale * d2 * math.gamma(1.0 + inv)
    l3 = l2 * (3.0 - 2.0 * d3 / d2)
    l4 = l2 * (6.0 + (5.0 * d4 - 10.0 * d3) / d2)
    return l2, l3, l4


def two_sided_weibull_lmoments(scale: float, shape: float) -> tuple[float, float, float]:
    _positive(scale=scale, shape=shape)
    e = 1.0 + 1.0 / shape
    g = scale * math.gamma(e)
    l2 = (1.0 - 2.0**-e) * g
    l4 = (1.0 - 6.0 * 2.0**-e + 7.5 * 3.0**-e - 2.5 * 4.0**-e) * g
    return l2, 0.0, l4


GAUSSIAN_TAU4 = 30.0 / math.pi * math.atan(math.sqrt(2.0)) - 9.0


def gaussian_lmoments(mu: float, sigma: float) -> tuple[float, float, float]:
    _positive(sigma=sigma)
    l2 = sigma / math.sqrt(math.pi)
    return l2, 0.0, GAUSSIAN_TAU4 * l2


def exponential_lmoments(rate: float) -> tuple[float, float, float]:
    _positive(rate=rate)
    return tuple(1.0 / (rate * r * (r - 1)) for r in (2, 3, 4))


@lru_cache(maxsize=256)
def _unit_lognormal_lmoments(sigma: float, orders: tuple[int, ...], epsrel: float) -> tuple[float, ...]:
    dist = stats.lognorm(s=sigma)
    vector = population_lmoments_by_quadrature(dist.ppf, max(orders), orders=orders, epsrel=epsrel)
    return vector.values


def lognormal_lmoments(
    mu: float, sigma: float, *, orders: Sequence[int] = (2, 3, 4), epsrel: float = 1e-10
) -> tuple[float, ...]:
    """By quadrature on the quantile; lambda_r(mu, sigma) = e^mu lambda_r(0, sigma)."""
    _positive(sigma=sigma)
    unit = _unit_lognormal_lmoments(float(sigma), tuple(int(r) for r in orders), float(epsrel))
    factor = math.exp(mu)
    return tuple(factor * v for v in unit)


# ---------- components ----------
@dataclass(frozen=True)
class ComponentDistribution:
    family: str
    params: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if self.family not in PARAMETER_NAMES:
            raise ValidationError(f"unknown family {self.family!r}; use one of {', '.join(Family.values)}")
        names = tuple(name for name, _ in self.params)
        if names != PARAMETER_NAMES[self.family]:
            raise ValidationError(f"{self.family} expects parameters {PARAMETER_NAMES[self.family]}, got {names}")
        for name, value in self.params:
            if not math.isfinite(value):
                raise ValidationError(f"{self.family}: {name} must be finite")
            if name in POSITIVE_PARAMETERS and value <= 0:
                raise ValidationError(f"{self.family}: {name} must be positive, got {value}")

    @classmethod
    def of(cls, family: str, **values: float) -> "ComponentDistribution":
        names = PARAMETER_NAMES.get(family)
        if names is None:
            raise ValidationError(f"unknown family {family!r}; use one of {', '.join(Family.values)}")
        missing = [n for n in names if n not in values]
        extra = [n for n in values if n not in names]
        if missing or extra:
            raise ValidationError(f"{family} expects parameters {names}; missing {missing}, unexpected {extra}")
        return cls(family=str(family), params=tuple((n, float(values[n])) for n in names))

    # ----- parameters -----
    @property
    def values(self) -> dict[str, float]:
        return dict(self.params)

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def with_values(self, updates: Mapping[str, float]) -> "ComponentDistribution":
        merged = self.values
        for name, value in updates.items():
            if name not in merged:
                raise ValidationError(f"{self.family} has no parameter {name!r}")
            merged[name] = float(value)
        return replace(self, params=tuple((n, merged[n]) for n in PARAMETER_NAMES[self.family]))

    # ----- scipy backing -----
    @property
    def frozen(self):
        v = self.values
        match self.family:
            case Family.WEIBULL:
                return stats.weibull_min(c=v["shape"], scale=v["scale"])
            case Family.LOGNORMAL:
                return stats.lognorm(s=v["sigma"], scale=math.exp(v["mu"]))
            case Family.GAUSSIAN:
                return stats.norm(loc=v["mu"], scale=v["sigma"])
            case Family.TWO_SIDED_WEIBULL:
                return stats.dweibull(c=v["shape"], scale=v["scale"])
            case Family.EXPONENTIAL:
                return stats.expon(scale=1.0 / v["rate"])

    def cdf(self, x):
        return self.frozen.cdf(np.asarray(x, dtype=float))

    def pdf(self, x):
        return self.frozen.pdf(np.asarray(x, dtype=float))

    def quantile(self, u):
        return self.frozen.ppf(np.asarray(u, dtype=float))

    def mean(self) -> float:
        return float(self.frozen.mean())

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        v = self.values
        match self.family:
            case Family.WEIBULL:
                return v["scale"] * rng.weibull(v["shape"], size=n)
            case Family.LOGNORMAL:
                return rng.lognormal(mean=v["mu"], sigma=v["sigma"], size=n)
            case Family.GAUSSIAN:
                return rng.normal(loc=v["mu"], scale=v["sigma"], size=n)
            case Family.TWO_SIDED_WEIBULL:
                sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
                return sign * v["scale"] * rng.weibull(v["shape"], size=n)
            case Family.EXPONENTIAL:
                return rng.exponential(scale=1.0 / v["rate"], size=n)

    # ----- L-moments -----
    def lmoments(self, orders: Sequence[int] = (2, 3, 4)) -> tuple[float, ...]:
        orders = tuple(int(r) for r in orders)
        v = self.values
        if self.family == Family.LOGNORMAL:
            return lognormal_lmoments(v["mu"], v["sigma"], orders=orders)
        if all(2 <= r <= 4 for r in orders):
            match self.family:
                case Family.WEIBULL:
                    closed = weibull_lmoments(v["scale"], v["shape"])
                case Family.TWO_SIDED_WEIBULL:
                    closed = two_sided_weibull_lmoments(v["scale"], v["shape"])
                case Family.GAUSSIAN:
                    closed = gaussian_lmoments(v["mu"], v["sigma"])
                case Family.EXPONENTIAL:
                    closed = exponential_lmoments(v["rate"])
            return tuple(closed[r - 2] for r in orders)
        return population_lmoments_by_quadrature(self.frozen.ppf, max(orders), orders=orders).values

    def tail_range(self, mass: float) -> tuple[float, float]:
        """Quantiles leaving ``mass/2`` in each tail."""
        lo, hi = self.quantile([mass / 2.0, 1.0 - mass / 2.0])
        return float(lo), float(hi)

    # ----- derivatives of the CDF in its parameters -----
    def cdf_gradient(self, x, names: Sequence[str]) -> np.ndarray:
        """Array of shape ``x.shape + (len(names),)``."""
        x = np.asarray(x, dtype=float)
        columns = [self._cdf_partial(x, name) for name in names]
        if not columns:
            return np.zeros(x.shape + (0,))
        return np.stack(columns, axis=-1)

    def _cdf_partial(self, x: np.ndarray, name: str) -> np.ndarray:
        v = self.values
        if name not in v:
            raise ValidationError(f"{self.family} has no parameter {name!r}")
        match (self.family, name):
            case (Family.WEIBULL, "shape"):
                z = np.where(x > 0, x / v["scale"], 1.0)
                zn = z ** v["shape"]
                return np.where(x > 0, np.exp(-zn) * zn * np.log(z), 0.0)
            case (Family.WEIBULL, "scale"):
                z = np.where(x > 0, x / v["scale"], 0.0)
                zn = z ** v["shape"]
                return np.where(x > 0, -np.exp(-zn) * v["shape"] * zn / v["scale"], 0.0)
            case (Family.LOGNORMAL, "mu" | "sigma"):
                with np.errstate(divide="ignore"):
                    z = (np.log(np.where(x > 0, x, 1.0)) - v["mu"]) / v["sigma"]
                dens = stats.norm.pdf(z) / v["sigma"]
                out = -dens if name == "mu" else -dens * z
                return np.where(x > 0, out, 0.0)
            case (Family.GAUSSIAN, "mu" | "sigma"):
                z = (x - v["mu"]) / v["sigma"]
                dens = stats.norm.pdf(z) / v["sigma"]
                return -dens if name == "mu" else -dens * z
            case (Family.EXPONENTIAL, "rate"):
                return np.where(x > 0, x * np.exp(-v["rate"] * np.maximum(x, 0.0)), 0.0)
        return self._central_difference(x, name)

    def _central_difference(self, x: np.ndarray, name: str) -> np.ndarray:
        value = self.values[name]
        h = 1e-6 * max(1.0, abs(value))
        up = self.with_values({name: value + h}).cdf(x)
        down = self.with_values({name: value - h}).cdf(x)
        return (up - down) / (2.0 * h)

    def describe(self) -> str:
        inner = ", ".join(f"{n}={val:g}" for n, val in self.params)
        return f"{self.family}({inner})"


# ---------- constraint model ----------
@dataclass(frozen=True)
class ConstraintModel:
    """alpha -> m(alpha) = (-lambda_r(alpha))_r for the unknown component's family."""

    base: ComponentDistribution
    free: tuple[str, ...]
    orders: tuple[int, ...] = (2, 3, 4)

    def __post_init__(self):
        names = PARAMETER_NAMES[self.base.family]
        for name in self.free:
            if name not in names:
                raise ValidationError(f"{self.base.family} has no parameter {name!r}")
        if not self.orders or min(self.orders) < 2:
            raise ValidationError("constraint orders must be >= 2")

    @property
    def dimension(self) -> int:
        return len(self.free)

    def component(self, alpha: Sequence[float]) -> ComponentDistribution:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        if alpha.size != len(self.free):
            raise ValidationError(f"expected {len(self.free)} constraint parameters, got {alpha.size}")
        return self.base.with_values(dict(zip(self.free, alpha.tolist())))

    def m(self, alpha: Sequence[float]) -> np.ndarray:
        return -np.asarray(self.component(alpha).lmoments(self.orders), dtype=float)

    def gradient(self, alpha: Sequence[float]) -> np.ndarray:
        """Shape (len(orders), dim alpha)."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        columns = []
        for j, name in enumerate(self.free):
            if self.base.family == Family.LOGNORMAL and name == "mu":
                columns.append(self.m(alpha))
                continue
            h = 1e-6 * max(1.0, abs(alpha[j]))
            step = np.zeros_like(alpha)
            step[j] = h
            columns.append((self.m(alpha + step) - self.m(alpha - step)) / (2.0 * h))
        return np.stack(columns, axis=1) if columns else np.zeros((len(self.orders), 0))


# ---------- mixtures ----------
@dataclass(frozen=True)
class MixtureSpec:
    """lambda F_1 + (1 - lambda) F_0; lambda weights the parametric component."""

    proportion: float
    parametric: ComponentDistribution
    unknown: ComponentDistribution

    def __post_init__(self):
        if not 0.0 <= self.proportion <= 1.0:
            raise ValidationError(f"mixture proportion must lie in [0, 1], got {self.proportion}")

    def cdf(self, y):
        lam = self.proportion
        return lam * self.parametric.cdf(y) + (1.0 - lam) * self.unknown.cdf(y)

    def pdf(self, y):
        lam = self.proportion
        return lam * self.parametric.pdf(y) + (1.0 - lam) * self.unknown.pdf(y)

    def mean(self) -> float:
        lam = self.proportion
        return lam * self.parametric.mean() + (1.0 - lam) * self.unknown.mean()

    def tail_ranges(self, mass: float) -> list[tuple[float, float]]:
        return [self.parametric.tail_range(mass), self.unknown.tail_range(mass)]

    def quantile(self, u) -> np.ndarray:
        """Numerical inverse of the mixture CDF (bisection bracketed by component quantiles)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lo = np.minimum(self.parametric.quantile(u), self.unknown.quantile(u))
        hi = np.maximum(self.parametric.quantile(u), self.unknown.quantile(u))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-14 * np.maximum(1.0, np.abs(hi))):
                break
        return 0.5 * (lo + hi)


def sample_mixture(spec: MixtureSpec, n: int, seed: int | np.random.Generator) -> np.ndarray:
    """n draws; each from the parametric component with probability ``spec.proportion``."""
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    labels = rng.random(n) < spec.proportion
    out = np.empty(n)
    n1 = int(labels.sum())
    out[labels] = spec.parametric.sample(n1, rng)
    out[~labels] = spec.unknown.sample(n - n1, rng)
    return out
