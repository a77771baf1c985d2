from django.db.models import TextChoices


class EventType(TextChoices):
    ESTIMATION_STARTED = "estimation_started", "Estimation started"
    ESTIMATION_FINISHED = "estimation_finished", "Estimation finished"

    START_FAILED = "start_failed", "Start failed"
    MULTISTART_DISAGREEMENT = "multistart_disagreement", "Starts disagree"
    FEW_CONSTRAINTS = "few_constraints", "Fewer constraints than parameters"
    PHI_PLUS_VIOLATION = "phi_plus_violation", "Estimate outside Phi+"

    QUADRATURE_NOT_CONVERGED = "quadrature_not_converged", "Quadrature not converged"
    XI_NORM_LARGE = "xi_norm_large", "Large dual vector"
    TAIL_TRUNCATION = "tail_truncation", "Truncated tail contribution"

    SIMULATION_STARTED = "simulation_started", "Simulation started"
    SIMULATION_FINISHED = "simulation_finished", "Simulation finished"
    REPLICATION_FAILED = "replication_failed", "Replication failed"
    FAILURE_RATE_EXCEEDED = "failure_rate_exceeded", "Too many failed replications"

    ERROR = "error", "Error"


WARNING_EVENTS = {
    EventType.START_FAILED,
    EventType.MULTISTART_DISAGREEMENT,
    EventType.FEW_CONSTRAINTS,
    EventType.PHI_PLUS_VIOLATION,
    EventType.QUADRATURE_NOT_CONVERGED,
    EventType.XI_NORM_LARGE,
    EventType.TAIL_TRUNCATION,
    EventType.REPLICATION_FAILED,
}

ERROR_EVENTS = {EventType.FAILURE_RATE_EXCEEDED, EventType.ERROR}
