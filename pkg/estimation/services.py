from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from django.db import transaction
from django.utils import timezone

from .asymptotics import asymptotic_report
from .distributions import MixtureSpec, sample_mixture
from .divergences import parse_divergence
from .errors import EstimationError, ValidationError
from .events.event_types import EventType
from .events.helpers import log_event
from .helpers import child_seed, jsonable, to_json
from .mixture import EstimationResult, estimate
from .scenarios import Scenario
from .signed_cdf import EmpiricalCdf

logger = logging.getLogger(__name__)

FAILURE_LIMIT = 0.2


# ---------- Read models (DTOs) ----------
@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    reps: int
    seed: int
    divergence: str = "chi2"
    output: Optional[Path] = None
    jobs: int = 1
    asymptotics: bool = False
    record_timing: bool = False
    starts: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.reps < 1:
            raise ValidationError(f"replications must be >= 1, got {self.reps}")
        if self.jobs < 1:
            raise ValidationError(f"jobs must be >= 1, got {self.jobs}")
        parse_divergence(self.divergence)
        dim = self.scenario.model.dimension
        lo, hi = self.scenario.space.lower, self.scenario.space.upper
        for start in self.starts or self.scenario.starts:
            if len(start) != dim:
                raise ValidationError(f"start {list(start)} does not match parameters {self.scenario.model.names}")
            for value, a, b in zip(start, lo, hi):
                if not a <= value <= b:
                    raise ValidationError(f"start {list(start)} lies outside the parameter box")

    @property
    def start_list(self) -> tuple[tuple[float, ...], ...]:
        return self.starts or self.scenario.starts

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "n": self.scenario.n,
            "reps": self.reps,
            "seed": self.seed,
            "divergence": self.divergence,
            "jobs": self.jobs,
            "asymptotics": self.asymptotics,
            "record_timing": self.record_timing,
            "starts": [list(s) for s in self.start_list],
        }


@dataclass(frozen=True)
class ReplicationRow:
    rep: int
    lam: Optional[float] = None
    theta: dict = field(default_factory=dict)
    alpha: dict = field(default_factory=dict)
    objective: Optional[float] = None
    phi_plus: Optional[bool] = None
    seconds: float = 0.0
    standard_errors: dict = field(default_factory=dict)
    failed: bool = False
    error: str = ""


@dataclass
class SimulationReport:
    config: ScenarioConfig
    rows: list[ReplicationRow]
    summary: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.failed)

    @property
    def failure_rate(self) -> float:
        return self.failures / len(self.rows) if self.rows else 0.0

    @property
    def too_many_failures(self) -> bool:
        return self.failure_rate > FAILURE_LIMIT

    def frame(self) -> pd.DataFrame:
        model = self.config.scenario.model
        columns = ["rep", "lambda"]
        columns += [f"theta_{n}" for n in model.theta_names]
        columns += [f"alpha_{n}" for n in model.constraints.free]
        columns += ["objective", "phi_plus", "seconds"]
        if self.config.asymptotics:
            columns += [f"se_{n}" for n in model.names]
        records = []
        for row in self.rows:
            record = {"rep": row.rep, "lambda": row.lam, "objective": row.objective}
            record.update({f"theta_{k}": v for k, v in row.theta.items()})
            record.update({f"alpha_{k}": v for k, v in row.alpha.items()})
            record["phi_plus"] = "" if row.phi_plus is None else str(bool(row.phi_plus)).lower()
            record["seconds"] = row.seconds if self.config.record_timing else None
            record.update({f"se_{k}": v for k, v in row.standard_errors.items()})
            records.append(record)
        frame = pd.DataFrame.from_records(records, columns=columns)
        return frame.astype({c: float for c in columns if c not in ("rep", "phi_plus")})


# ---------- Replications ----------
def replicate(
    scenario: Scenario,
    rep: int,
    master_seed: int,
    divergence: str,
    starts: Sequence[Sequence[float]],
    asymptotics: bool = False,
) -> ReplicationRow:
    """One data set from the child seed, one estimate; failures come back as rows."""
    began = time.perf_counter()
    seed = child_seed(master_seed, rep)
    try:
        data = sample_mixture(scenario.truth, scenario.n, seed)
        result = estimate(
            data,
            scenario.model,
            scenario.space,
            starts,
            parse_divergence(divergence),
            seed=seed,
            jobs=1,
            scenario=scenario.name,
        )
        errors = {}
        if asymptotics:
            errors = standard_errors_for(result, scenario, data)
    except EstimationError as exc:
        return ReplicationRow(rep=rep, seconds=time.perf_counter() - began, failed=True, error=str(exc))
    except Exception as exc:  # noqa: BLE001 - a crashing replication must not stop the batch
        logger.exception("replication %s crashed", rep)
        return ReplicationRow(rep=rep, seconds=time.perf_counter() - began, failed=True, error=repr(exc))
    return ReplicationRow(
        rep=rep,
        lam=result.lam,
        theta=result.theta,
        alpha=result.alpha,
        objective=result.objective,
        phi_plus=result.phi_plus,
        seconds=time.perf_counter() - began,
        standard_errors=errors,
    )


def standard_errors_for(result: EstimationResult, scenario: Scenario, data) -> dict:
    try:
        report = asymptotic_report(scenario.model, result.phi, EmpiricalCdf(data), len(data))
    except EstimationError as exc:
        logger.warning("asymptotic covariance unavailable: %s", exc)
        return {}
    result.asymptotics = report.as_dict()
    return dict(zip(report.names, (float(v) for v in report.standard_errors)))


# ---------- Service ----------
class SimulationService:
    @staticmethod
    def summarize(frame: pd.DataFrame) -> dict:
        """Mean and sample sd (ddof=1) per numeric column; sd is None below two values."""
        summary = {}
        for column in frame.columns:
            if column in ("rep", "phi_plus", "seconds"):
                continue
            values = frame[column].dropna().to_numpy(dtype=float)
            summary[column] = {
                "mean": float(np.mean(values)) if values.size else None,
                "sd": float(np.std(values, ddof=1)) if values.size > 1 else None,
                "count": int(values.size),
            }
        return summary

    @staticmethod
    def run(config: ScenarioConfig, *, run=None) -> SimulationReport:
        scenario = config.scenario
        log_event(
            EventType.SIMULATION_STARTED,
            {"scenario": scenario.name, "n": scenario.n, "reps": config.reps, "seed": config.seed},
            run=run,
        )
        reps = list(range(1, config.reps + 1))
        args = (config.divergence, config.start_list, config.asymptotics)
        if config.jobs > 1 and len(reps) > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                rows = list(
                    pool.map(
                        replicate,
                        [scenario] * len(reps),
                        reps,
                        [config.seed] * len(reps),
                        *[[a] * len(reps) for a in args],
                    )
                )
        else:
            rows = [replicate(scenario, rep, config.seed, *args) for rep in reps]

        for row in rows:
            if row.failed:
                log_event(EventType.REPLICATION_FAILED, {"rep": row.rep, "error": row.error}, run=run)

        report = SimulationReport(config=config, rows=rows)
        frame = report.frame()
        report.summary = {
            **config.as_dict(),
            "truth": dict(zip(scenario.model.names, scenario.truth_phi)),
            "failures": report.failures,
            "failed_reps": [{"rep": r.rep, "error": r.error} for r in rows if r.failed],
            "columns": SimulationService.summarize(frame),
        }
        if report.too_many_failures:
            log_event(
                EventType.FAILURE_RATE_EXCEEDED,
                {"failures": report.failures, "reps": config.reps, "limit": FAILURE_LIMIT},
                run=run,
            )
        log_event(EventType.SIMULATION_FINISHED, {"failures": report.failures, "reps": config.reps}, run=run)
        return report

    @staticmethod
    def write_outputs(report: SimulationReport, prefix: Path) -> dict:
        prefix = Path(prefix)
        if prefix.parent and not prefix.parent.exists():
            prefix.parent.mkdir(parents=True, exist_ok=True)
        csv_path = prefix.with_suffix(".csv")
        json_path = prefix.with_suffix(".json")
        report.frame().to_csv(csv_path, index=False, float_format="%.17g", na_rep="", lineterminator="\n")
        json_path.write_text(to_json(report.summary))
        report.paths = {"csv": str(csv_path), "json": str(json_path)}
        return report.paths

    @staticmethod
    @transaction.atomic
    def run_and_store(config: ScenarioConfig):
        from .models import ReplicationResult, SimulationRun

        run = SimulationRun.objects.create(
            scenario=config.scenario.name,
            n=config.scenario.n,
            replications=config.reps,
            seed=config.seed,
            divergence=config.divergence,
            config=jsonable(config.as_dict()),
        )
        report = SimulationService.run(config, run=run)
        ReplicationResult.objects.bulk_create(
            [
                ReplicationResult(
                    run=run,
                    rep=row.rep,
                    lam=row.lam,
                    theta=jsonable(row.theta),
                    alpha=jsonable(row.alpha),
                    objective=row.objective,
                    phi_plus=row.phi_plus,
                    standard_errors=jsonable(row.standard_errors),
                    seconds=row.seconds,
                    failed=row.failed,
                    error=row.error,
                )
                for row in report.rows
            ]
        )
        run.summary = jsonable(report.summary)
        run.failures = report.failures
        run.status = SimulationRun.Status.FAILED if report.too_many_failures else SimulationRun.Status.COMPLETED
        run.finished_at = timezone.now()
        run.save(update_fields=["summary", "failures", "status", "finished_at"])
        return report, run


class EstimationService:
    @staticmethod
    def estimate_sample(
        data,
        scenario: Scenario,
        *,
        starts: Sequence[Sequence[float]] = (),
        divergence: str = "chi2",
        asymptotics: bool = False,
        jobs: int = 1,
        seed: Optional[int] = None,
        random_starts: int = 0,
    ) -> EstimationResult:
        """``data`` may be the scenario's ``MixtureSpec``; asymptotics then need a sample."""
        if asymptotics and isinstance(data, MixtureSpec):
            raise ValidationError("asymptotic covariance needs a sample, not the true mixture")
        result = estimate(
            data,
            scenario.model,
            scenario.space,
            starts or scenario.starts,
            parse_divergence(divergence),
            seed=seed,
            random_starts=random_starts,
            jobs=jobs,
            scenario=scenario.name,
        )
        if asymptotics:
            standard_errors_for(result, scenario, data)
        return result
