"""Shifted Legendre polynomials, their integrals K_r and L-moment estimates.

Coefficients are kept as exact integers/fractions and converted to floats only
when a basis is built, so orders up to ``MAX_ORDER`` stay exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .errors import InsufficientDataError, QuadratureError, ValidationError

logger = logging.getLogger(__name__)

MAX_ORDER = 32


# ---------- Polynomials ----------
@dataclass(frozen=True)
class ShiftedLegendre:
    order: int
    coefficients: tuple[int, ...]  # u^0 .. u^r

    def __call__(self, u):
        return P.polyval(np.asarray(u, dtype=float), np.array(self.coefficients, dtype=float))


@dataclass(frozen=True)
class IntegratedLegendre:
    """K_r(t) = int_0^t L_{r-1}(u) du."""

    order: int
    coefficients: tuple[Fraction, ...]  # t^0 .. t^r, constant term is 0

    def __call__(self, t):
        return P.polyval(np.asarray(t, dtype=float), np.array([float(c) for c in self.coefficients]))


def _check_order(r: int, lowest: int) -> int:
    if int(r) != r:
        raise ValidationError(f"polynomial order must be an integer, got {r!r}")
    r = int(r)
    if r < lowest:
        raise ValidationError(f"polynomial order must be >= {lowest}, got {r}")
    if r > MAX_ORDER:
        raise ValidationError(f"polynomial order {r} exceeds the supported maximum {MAX_ORDER}")
    return r


@lru_cache(maxsize=None)
def shifted_legendre(r: int) -> ShiftedLegendre:
    r = _check_order(r, 0)
    coefficients = tuple((-1) ** (r - k) * comb(r, k) * comb(r + k, k) for k in range(r + 1))
    return ShiftedLegendre(order=r, coefficients=coefficients)


@lru_cache(maxsize=None)
def integrated_legendre(r: int) -> IntegratedLegendre:
    r = _check_order(r, 2)
    # c_{r,k} are the coefficients of L_{r-1}
    c = shifted_legendre(r - 1).coefficients
    coefficients = (Fraction(0),) + tuple(Fraction(c[k], k + 1) for k in range(r))
    return IntegratedLegendre(order=r, coefficients=coefficients)


class LMomentBasis:
    """The vector K = (K_r)_{r in orders} with first and second derivatives.

    ``evaluate``/``derivative``/``second_derivative`` map an array of shape
    ``s`` to an array of shape ``s + (len(orders),)``.
    """

    def __init__(self, orders: Iterable[int]):
        orders = tuple(sorted({_check_order(r, 2) for r in orders}))
        if not orders:
            raise ValidationError("an L-moment basis needs at least one order")
        self.orders = orders
        self.max_order = orders[-1]
        degree = self.max_order
        k = np.zeros((degree + 1, len(orders)))
        for j, r in enumerate(orders):
            for power, coef in enumerate(integrated_legendre(r).coefficients):
                k[power, j] = float(coef)
        self._k = k
        self._dk = P.polyder(k, axis=0)
        self._d2k = P.polyder(k, m=2, axis=0)

    @classmethod
    def up_to(cls, max_order: int) -> "LMomentBasis":
        return cls(range(2, int(max_order) + 1))

    @property
    def size(self) -> int:
        return len(self.orders)

    @staticmethod
    def _eval(coefs: np.ndarray, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if coefs.shape[0] == 0:
            return np.zeros(t.shape + (coefs.shape[1],))
        return np.moveaxis(P.polyval(t, coefs), 0, -1)

    def evaluate(self, t) -> np.ndarray:
        return self._eval(self._k, t)

    def derivative(self, t) -> np.ndarray:
        return self._eval(self._dk, t)

    def second_derivative(self, t) -> np.ndarray:
        return self._eval(self._d2k, t)

    def coefficient_table(self) -> list[tuple[int, ...]]:
        """Exact c_{r,k} per order, i.e. the coefficients of L_{r-1}."""
        return [shifted_legendre(r - 1).coefficients for r in self.orders]

    def __repr__(self) -> str:
        return f"LMomentBasis(orders={self.orders})"


# ---------- L-moment vectors ----------
@dataclass(frozen=True)
class LMomentVector:
    orders: tuple[int, ...]
    values: tuple[float, ...]

    def __getitem__(self, r: int) -> float:
        try:
            return self.values[self.orders.index(r)]
        except ValueError:
            raise KeyError(r) from None

    def as_dict(self) -> dict[str, float]:
        return {f"l{r}": v for r, v in zip(self.orders, self.values)}


def lmoment_ratios(vector: LMomentVector) -> dict[str, float]:
    """tau_r = lambda_r / lambda_2 for r >= 3; l1 and l2 are passed through."""
    out: dict[str, float] = {}
    l2 = vector[2] if 2 in vector.orders else float("nan")
    for r, value in zip(vector.orders, vector.values):
        if r <= 2:
            out[f"l{r}"] = value
        else:
            out[f"t{r}"] = value / l2 if l2 != 0 else float("nan")
    return out


def sample_lmoments(data: Sequence[float], max_order: int) -> LMomentVector:
    """Unbiased sample L-moments of orders 1..max_order.

    Uses the probability-weighted moments b_k = n^-1 sum_i C(i-1,k)/C(n-1,k) x_(i),
    which reproduce the subsample-average definition exactly.
    """
    max_order = _check_order(max_order, 1)
    x = np.sort(np.asarray(data, dtype=float))
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise ValidationError("sample L-moments need a finite one-dimensional sample")
    n = x.size
    if n < max_order:
        raise InsufficientDataError(f"{max_order} L-moments need at least {max_order} observations, got {n}")

    i = np.arange(n, dtype=float)  # i-1 for the i-th order statistic
    weights = np.ones(n)
    b = np.empty(max_order)
    for k in range(max_order):
        if k > 0:
            weights = weights * (i - (k - 1)) / (n - k)
            weights[: k] = 0.0
        b[k] = np.dot(weights, x) / n

    values = []
    for r in range(1, max_order + 1):
        coefs = shifted_legendre(r - 1).coefficients
        values.append(float(sum(float(c) * b[k] for k, c in enumerate(coefs))))
    return LMomentVector(orders=tuple(range(1, max_order + 1)), values=tuple(values))


def population_lmoments_by_quadrature(
    quantile_fn: Callable[[float], float],
    max_order: int,
    *,
    orders: Iterable[int] | None = None,
    epsabs: float = 1e-12,
    epsrel: float = 1e-10,
    limit: int = 500,
) -> LMomentVector:
    """lambda_r = int_0^1 Q(u) L_{r-1}(u) du; the rule never samples u = 0 or 1."""
    orders = tuple(orders) if orders is not None else tuple(range(1, _check_order(max_order, 1) + 1))
    values = []
    for r in orders:
        poly = shifted_legendre(_check_order(r, 1) - 1)
        out = integrate.quad(
            lambda u: float(quantile_fn(u)) * float(poly(u)),
            0.0,
            1.0,
            epsabs=epsabs,
            epsrel=epsrel,
            limit=limit,
            full_output=1,
        )
        value, abserr = out[0], out[1]
        if len(out) > 3:
            if not np.isfinite(value) or abserr > 1e-8 * max(1.0, abs(value)):
                raise QuadratureError(f"L-moment of order {r} did not converge: {out[3]}", abserr=abserr)
            logger.debug("quad warning for order %s accepted (abserr=%.3e): %s", r, abserr, out[3])
        values.append(float(value))
    return LMomentVector(orders=orders, values=tuple(values))


def empirical_constraint_values(sorted_x: np.ndarray, basis: LMomentBasis) -> np.ndarray:
    """sum_{i=1}^{n-1} K(i/n) (X_{i+1:n} - X_{i:n}); converges to -lambda."""
    x = np.asarray(sorted_x, dtype=float)
    n = x.size
    if n < 2:
        raise InsufficientDataError("at least two observations are needed")
    k = basis.evaluate(np.arange(1, n) / n)
    return np.diff(x) @ k
