"""Cressie-Read divergence generators and their convex conjugates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from django.db.models import TextChoices
from scipy import optimize

from .errors import DivergenceDomainError, ValidationError


class DivergenceName(TextChoices):
    CHI2 = "chi2", "Pearson chi-square (gamma=2)"
    KL = "kl", "Kullback-Leibler (gamma=1)"
    MODIFIED_KL = "modified-kl", "Modified Kullback-Leibler (gamma=0)"
    HELLINGER = "hellinger", "Hellinger (gamma=1/2)"
    NEYMAN = "neyman", "Neyman chi-square (gamma=-1)"


NAMED_GAMMAS = {
    DivergenceName.CHI2: 2.0,
    DivergenceName.KL: 1.0,
    DivergenceName.MODIFIED_KL: 0.0,
    DivergenceName.HELLINGER: 0.5,
    DivergenceName.NEYMAN: -1.0,
}


@dataclass(frozen=True)
class DivergenceGenerator:
    """phi_gamma(x) = (x^g - g x + g - 1) / (g (g - 1)) and its conjugate psi.

    ``t_lower``/``t_upper`` bound the open interval on which psi is evaluated;
    ``x_lower`` is a_phi (``-inf`` for the quadratic case which is extended to signed x).
    """

    gamma: float
    name: str

    # ----- domains -----
    @property
    def is_quadratic(self) -> bool:
        return self.gamma == 2.0

    @property
    def x_lower(self) -> float:
        return -math.inf if self.is_quadratic else 0.0

    @property
    def t_lower(self) -> float:
        g = self.gamma
        if g > 1.0 and not self.is_quadratic:
            return -1.0 / (g - 1.0)
        return -math.inf

    @property
    def t_upper(self) -> float:
        g = self.gamma
        if g < 1.0:
            return 1.0 / (1.0 - g)
        return math.inf

    def in_domain(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (t > self.t_lower) & (t < self.t_upper)

    def _guard(self, t: np.ndarray) -> None:
        bad = ~self.in_domain(t)
        if np.any(bad):
            offending = float(t[bad].flat[0]) if t.ndim else float(t)
            upper = self.t_upper if math.isfinite(self.t_upper) else None
            raise DivergenceDomainError(offending, upper=upper)

    # ----- phi -----
    def phi(self, x):
        x = np.asarray(x, dtype=float)
        g = self.gamma
        if self.is_quadratic:
            return 0.5 * (x - 1.0) ** 2
        if np.any(x < 0):
            raise ValidationError(f"{self.name}: phi is only defined for x >= 0")
        with np.errstate(divide="ignore", invalid="ignore"):
            if g == 0.0:
                return -np.log(x) + x - 1.0
            if g == 1.0:
                return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0) - x + 1.0
            return (x**g - g * x + g - 1.0) / (g * (g - 1.0))

    def phi_prime(self, x):
        x = np.asarray(x, dtype=float)
        g = self.gamma
        if self.is_quadratic:
            return x - 1.0
        with np.errstate(divide="ignore"):
            if g == 0.0:
                return 1.0 - 1.0 / x
            if g == 1.0:
                return np.log(x)
            return (x ** (g - 1.0) - 1.0) / (g - 1.0)

    # ----- psi -----
    def psi(self, t):
        t = np.asarray(t, dtype=float)
        g = self.gamma
        if self.is_quadratic:
            return 0.5 * t * t + t
        self._guard(t)
        if g == 0.0:
            return -np.log1p(-t)
        if g == 1.0:
            return np.expm1(t)
        base = 1.0 + (g - 1.0) * t
        return (base ** (g / (g - 1.0)) - 1.0) / g

    def psi_prime(self, t):
        t = np.asarray(t, dtype=float)
        g = self.gamma
        if self.is_quadratic:
            return 1.0 + t
        self._guard(t)
        if g == 0.0:
            return 1.0 / (1.0 - t)
        if g == 1.0:
            return np.exp(t)
        return (1.0 + (g - 1.0) * t) ** (1.0 / (g - 1.0))

    def psi_second(self, t):
        t = np.asarray(t, dtype=float)
        g = self.gamma
        if self.is_quadratic:
            return np.ones_like(t)
        self._guard(t)
        if g == 0.0:
            return 1.0 / (1.0 - t) ** 2
        if g == 1.0:
            return np.exp(t)
        return (1.0 + (g - 1.0) * t) ** ((2.0 - g) / (g - 1.0))

    def divergence(self, p, q) -> float:
        """sum phi(p/q) q over discrete weights."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        return float(np.sum(self.phi(p / q) * q))

    def __str__(self) -> str:
        return self.name


def cressie_read(gamma: float) -> DivergenceGenerator:
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ValidationError(f"Cressie-Read index must be finite, got {gamma}")
    for tag, value in NAMED_GAMMAS.items():
        if value == gamma:
            return DivergenceGenerator(gamma=gamma, name=tag.value)
    return DivergenceGenerator(gamma=gamma, name=f"cr:{gamma:g}")


def chi2() -> DivergenceGenerator:
    return cressie_read(2.0)


def parse_divergence(text: str) -> DivergenceGenerator:
    """Accepts ``chi2``, ``kl``, ``modified-kl``, ``hellinger``, ``neyman`` or ``cr:<gamma>``."""
    text = (text or "").strip().lower()
    if text in DivergenceName.values:
        return cressie_read(NAMED_GAMMAS[DivergenceName(text)])
    if text.startswith("cr:"):
        try:
            return cressie_read(float(text[3:]))
        except ValueError:
            raise ValidationError(f"invalid Cressie-Read index in {text!r}") from None
    raise ValidationError(f"unknown divergence {text!r}; use one of {', '.join(DivergenceName.values)} or cr:<gamma>")


def conjugate_check(generator: DivergenceGenerator, t_grid, *, x_max: float = 1e3) -> float:
    """Max |sup_x {t x - phi(x)} - psi(t)| over the grid, sup found numerically."""
    lower = max(generator.x_lower, -x_max)
    if lower == 0.0:
        lower = 1e-12
    residual = 0.0
    for t in np.atleast_1d(np.asarray(t_grid, dtype=float)):
        res = optimize.minimize_scalar(
            lambda x: -(t * x - float(generator.phi(x))),
            bounds=(lower, x_max),
            method="bounded",
            options={"xatol": 1e-12, "maxiter": 2000},
        )
        residual = max(residual, abs(-res.fun - float(generator.psi(t))))
    return residual
