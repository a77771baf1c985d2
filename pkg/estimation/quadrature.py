"""Adaptive integration over truncated lines, plus a panel rule in 2-D.

Integrands are vectorised: ``f(y)`` receives a 1-D array of nodes and returns an
array whose first axis matches it. Any trailing shape is integrated componentwise,
so ``int K`` and ``int K K^t`` can share one pass over the nodes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate as scipy_integrate
from scipy import special

from .conf import numeric_setting
from .errors import ValidationError

logger = logging.getLogger(__name__)

# per-segment relative tolerance never goes below this
_RTOL_FLOOR = 50 * np.finfo(float).eps



@dataclass(frozen=True)
class IntegrationPlan:
    lower: float
    upper: float
    breakpoints: tuple[float, ...] = ()
    rtol: float = 1e-8
    atol: float = 1e-13
    max_subdivisions: int = 200_000

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValidationError("integration bounds must be finite")
        if not self.upper > self.lower:
            raise ValidationError(f"empty integration range [{self.lower}, {self.upper}]")

    @classmethod
    def build(
        cls,
        lower: float,
        upper: float,
        breakpoints: Iterable[float] = (),
        *,
        rtol: Optional[float] = None,
        atol: float = 1e-13,
        max_subdivisions: Optional[int] = None,
    ) -> "IntegrationPlan":
        bps = np.unique(np.asarray(list(breakpoints), dtype=float))
        bps = bps[(bps > lower) & (bps < upper)]
        return cls(
            lower=float(lower),
            upper=float(upper),
            breakpoints=tuple(bps.tolist()),
            rtol=float(rtol if rtol is not None else numeric_setting("QUAD_RTOL")),
            atol=float(atol),
            max_subdivisions=int(max_subdivisions or numeric_setting("QUAD_MAX_SUBDIVISIONS")),
        )

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[self.lower], np.asarray(self.breakpoints, dtype=float), [self.upper]])

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class IntegrationResult:
    value: np.ndarray | float
    error: float
    converged: bool
    segments: int = 0
    extra: dict = field(default_factory=dict)


def _gauss_rule(order: int, lo, hi):
    """Gauss-Legendre nodes and weights of ``order`` points on each [lo_i, hi_i]."""
    x, w = special.roots_legendre(order)
    lo, hi = np.asarray(lo, dtype=float)[:, None], np.asarray(hi, dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    return lo + half * (x[None, :] + 1.0), half * w[None, :]


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    plan: IntegrationPlan,
    *,
    keep_rule: bool = False,
    rule_order: int = 15,
) -> IntegrationResult:
    """Adaptive Gauss-Kronrod on every segment between breakpoints, through ``quad_vec``.

    Segment ``[a_i, a_i + h_i]`` is written as ``h_i f(a_i + t h_i)`` on ``t in [0, 1]``,
    so one ``quad_vec`` call refines all segments together and each evaluation of ``f``
    sees one node per segment. Running out of subdivisions returns the current value
    with ``converged=False``. With ``keep_rule`` a Gauss rule on the final subintervals
    of every segment is returned in ``extra`` so later integrands can reuse it.
    """
    edges = plan.edges
    a, h = edges[:-1], np.diff(edges)
    segments = a.size
    trailing: tuple = ()

    def mapped(t):
        nonlocal trailing
        values = np.asarray(f(a + t * h), dtype=float)
        trailing = values.shape[1:]
        return h[:, None] * values.reshape(segments, -1)

    pieces, error, info = scipy_integrate.quad_vec(
        mapped,
        0.0,
        1.0,
        epsabs=plan.atol / segments,
        epsrel=max(plan.rtol / segments, _RTOL_FLOOR),
        norm="max",
        limit=max(plan.max_subdivisions // segments, 4),
        full_output=True,
    )
    if not info.success:
        logger.warning("quadrature stopped on %d segments: %s", segments, info.message)

    total = np.asarray(pieces).sum(axis=0)
    value = total.reshape(trailing) if trailing else float(total[0])
    extra = {}
    if keep_rule:
        t_nodes, t_weights = _gauss_rule(rule_order, info.intervals[:, 0], info.intervals[:, 1])
        extra = {
            "nodes": (a[:, None] + h[:, None] * t_nodes.ravel()[None, :]).ravel(),
            "weights": (h[:, None] * t_weights.ravel()[None, :]).ravel(),
        }
    return IntegrationResult(
        value=value,
        # quad_vec bounds each segment's error; the total carries at most their sum
        error=float(error) * segments,
        converged=bool(info.success),
        segments=segments * len(info.intervals),
        extra=extra,
    )



# ---------- 2-D ----------
def _panel_edges(plan: IntegrationPlan, panels: int) -> np.ndarray:
    edges = plan.edges
    if edges.size - 1 >= panels:
        idx = np.unique(np.round(np.linspace(0, edges.size - 1, panels + 1)).astype(int))
        return edges[idx]
    return np.linspace(plan.lower, plan.upper, panels + 1)


def _halve(edges: np.ndarray) -> np.ndarray:
    coarse = edges[::2]
    if coarse[-1] != edges[-1]:
        coarse = np.append(coarse, edges[-1])
    return coarse


def _panel_rule(edges: np.ndarray, order: int):
    return _gauss_rule(order, edges[:-1], edges[1:])


def _tensor_sum(f, x_edges, y_edges, order, kink_on_diagonal):
    xn, xw = _panel_rule(x_edges, order)
    yn, yw = _panel_rule(y_edges, order)
    y_flat, yw_flat = yn.ravel(), yw.ravel()
    same_grid = kink_on_diagonal and x_edges.shape == y_edges.shape and np.array_equal(x_edges, y_edges)
    total = None
    trailing: tuple = ()
    g, gw = special.roots_legendre(order)
    u, uw = 0.5 * (g + 1.0), 0.5 * gw
    for i in range(xn.shape[0]):
        if same_grid:
            mask = np.ones(yn.shape[0], dtype=bool)
            mask[i] = False
            y_use, w_use = yn[mask].ravel(), yw[mask].ravel()
        else:
            y_use, w_use = y_flat, yw_flat
        X = np.repeat(xn[i], y_use.size)
        Y = np.tile(y_use, xn.shape[1])
        W = np.repeat(xw[i], y_use.size) * np.tile(w_use, xn.shape[1])
        values = np.asarray(f(X, Y), dtype=float)
        trailing = values.shape[1:]
        values = values.reshape(X.size, -1)
        row = W @ values
        if same_grid:
            row = row + _diagonal_cell(f, x_edges[i], x_edges[i + 1], u, uw)
        total = row if total is None else total + row
    return total, trailing


def _diagonal_cell(f, a, b, u, uw):
    """Square [a,b]^2 split along y = x, each triangle by collapsed coordinates."""
    h = b - a
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(uw, uw, indexing="ij")
    s = a + h * U.ravel()
    t = a + h * (U * V).ravel()
    w = (h * h * U * WU * WV).ravel()
    lower = np.asarray(f(s, t), dtype=float).reshape(s.size, -1)  # y <= x
    upper = np.asarray(f(t, s), dtype=float).reshape(s.size, -1)  # x <= y
    return w @ lower + w @ upper


def integrate2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    plan_x: IntegrationPlan,
    plan_y: Optional[IntegrationPlan] = None,
    *,
    panels: Optional[int] = None,
    order: int = 8,
    kink_on_diagonal: bool = False,
    rtol: Optional[float] = None,
) -> IntegrationResult:
    """Tensor-product Gauss-Legendre panels on plan_x x plan_y.

    The error estimate compares against the same rule on half as many panels.
    """
    plan_y = plan_y or plan_x
    panels = int(panels or numeric_setting("PANELS_2D"))
    rtol = float(rtol if rtol is not None else numeric_setting("QUAD_RTOL_2D"))
    x_edges = _panel_edges(plan_x, panels)
    y_edges = x_edges if plan_y is plan_x else _panel_edges(plan_y, panels)

    fine, trailing = _tensor_sum(f, x_edges, y_edges, order, kink_on_diagonal)
    coarse, _ = _tensor_sum(f, _halve(x_edges), _halve(y_edges), order, kink_on_diagonal)
    error = float(np.max(np.abs(fine - coarse)))
    tol = max(plan_x.atol, rtol * float(np.max(np.abs(fine))))
    value = fine.reshape(trailing) if trailing else float(fine[0])
    return IntegrationResult(
        value=value,
        error=error,
        converged=error <= tol,
        segments=(x_edges.size - 1) * (y_edges.size - 1),
    )


# ---------- plans ----------
def decimated_breakpoints(sorted_x: np.ndarray, max_breakpoints: Optional[int] = None) -> np.ndarray:
    """Every order statistic up to ``max_breakpoints``, else every ceil(n/max)-th."""
    x = np.asarray(sorted_x, dtype=float)
    limit = int(max_breakpoints or numeric_setting("MAX_BREAKPOINTS"))
    if x.size <= limit:
        return x
    step = math.ceil(x.size / limit)
    return x[::step]


def truncation_plan(
    ranges: Sequence[tuple[float, float]],
    *,
    breakpoints: Iterable[float] = (),
    widen: Optional[float] = None,
    rtol: Optional[float] = None,
) -> IntegrationPlan:
    """Union of candidate ranges, widened on both sides by a fraction of its width."""
    lows = [lo for lo, _ in ranges if math.isfinite(lo)]
    highs = [hi for _, hi in ranges if math.isfinite(hi)]
    if not lows or not highs:
        raise ValidationError("truncation needs at least one finite range")
    lower, upper = min(lows), max(highs)
    widen = float(widen if widen is not None else numeric_setting("TAIL_WIDEN"))
    pad = widen * max(upper - lower, 1e-12)
    return IntegrationPlan.build(lower - pad, upper + pad, breakpoints, rtol=rtol)
