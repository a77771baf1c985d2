from .event_types import EventType


def _vector(values):
    return "(" + ", ".join(f"{float(v):.6g}" for v in values) + ")"


def _scenario(meta):
    name = meta.get("scenario") or "custom model"
    return f"{name} (n={meta.get('n', '?')})"


def build_message(event_type, metadata):
    metadata = metadata or {}
    match event_type:
        case EventType.ESTIMATION_STARTED:
            return (
                f"estimating {_scenario(metadata)} from {metadata.get('starts', 0)} starts "
                f"with {metadata.get('divergence', 'chi2')}"
            )

        case EventType.ESTIMATION_FINISHED:
            return (
                f"estimate {_vector(metadata.get('phi', []))} "
                f"objective {metadata.get('objective', float('nan')):.6g}"
            )

        case EventType.START_FAILED:
            return f"start {_vector(metadata.get('start', []))} failed: {metadata.get('error', '')}"

        case EventType.MULTISTART_DISAGREEMENT:
            return (
                f"terminal objectives of the starts spread over "
                f"{metadata.get('spread', float('nan')):.3g}; check the start list"
            )

        case EventType.FEW_CONSTRAINTS:
            return (
                f"{metadata.get('constraints')} constraints for "
                f"{metadata.get('parameters')} free parameters; the estimate may not be identified"
            )

        case EventType.PHI_PLUS_VIOLATION:
            return (
                f"estimate {_vector(metadata.get('phi', []))} does not give a proper "
                f"unknown component (first violation at y={metadata.get('witness')})"
            )

        case EventType.QUADRATURE_NOT_CONVERGED:
            return (
                f"quadrature for {metadata.get('what', 'an integral')} stopped with "
                f"error {metadata.get('error', float('nan')):.3e}"
            )

        case EventType.XI_NORM_LARGE:
            return f"dual vector norm {metadata.get('norm', float('nan')):.3e} exceeds the warning level"

        case EventType.TAIL_TRUNCATION:
            return (
                f"truncated tails may contribute {metadata.get('estimate', float('nan')):.3e} "
                f"to {metadata.get('what', 'the covariance')}"
            )

        case EventType.SIMULATION_STARTED:
            return (
                f"simulating {_scenario(metadata)} with {metadata.get('reps')} replications, "
                f"seed {metadata.get('seed')}"
            )

        case EventType.SIMULATION_FINISHED:
            return (
                f"simulation finished: {metadata.get('failures', 0)} of "
                f"{metadata.get('reps')} replications failed"
            )

        case EventType.REPLICATION_FAILED:
            return f"replication {metadata.get('rep')} failed: {metadata.get('error', '')}"

        case EventType.FAILURE_RATE_EXCEEDED:
            return (
                f"{metadata.get('failures')} of {metadata.get('reps')} replications failed, "
                f"above the {metadata.get('limit', 0.2):.0%} limit"
            )

        case EventType.ERROR:
            return f"error: {metadata.get('error', '')}"

    return str(event_type)
