from __future__ import annotations

from typing import Optional, Sequence


# ---------- Domain errors ----------
class EstimationError(Exception):
    """Base error for the estimation layer."""

    exit_code = 1


class ValidationError(EstimationError):
    """Bad input: parameters out of range, malformed files, unknown tags."""

    exit_code = 2


class InsufficientDataError(ValidationError):
    pass


class NotFound(ValidationError):
    pass


class NumericalError(EstimationError):
    pass


class QuadratureError(NumericalError):
    def __init__(self, message: str, *, abserr: float = float("nan")):
        super().__init__(f"{message} (achieved error {abserr:.3e})")
        self.abserr = abserr


class DivergenceDomainError(NumericalError):
    def __init__(self, t: float, y: Optional[float] = None, *, upper: Optional[float] = None):
        where = f" at y={y:.17g}" if y is not None else ""
        bound = f" (t must stay below {upper:.6g})" if upper is not None else ""
        super().__init__(f"conjugate evaluated outside its domain: t={t:.17g}{where}{bound}")
        self.t = t
        self.y = y


class SingularMatrixError(NumericalError):
    def __init__(self, message: str, *, condition: float, direction: Optional[Sequence[float]] = None):
        detail = f"{message}: condition number {condition:.3e}"
        if direction is not None:
            detail += " along " + "(" + ", ".join(f"{v:.4g}" for v in direction) + ")"
        super().__init__(detail)
        self.condition = condition
        self.direction = None if direction is None else list(direction)


class LineSearchError(NumericalError):
    def __init__(self, message: str, *, last_xi: Sequence[float]):
        super().__init__(message)
        self.last_xi = list(last_xi)


class EstimationFailure(NumericalError):
    def __init__(self, message: str, *, traces: Sequence = ()):
        super().__init__(message)
        self.traces = list(traces)
