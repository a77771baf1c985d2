from django.db import models

from .events.event_types import EventType


class SimulationRun(models.Model):
    class Status(models.TextChoices):
        RUNNING = "running", "Running"
        COMPLETED = "completed", "Completed"
        FAILED = "failed", "Failed"

    scenario = models.CharField(max_length=64)
    n = models.PositiveIntegerField()
    replications = models.PositiveIntegerField()
    seed = models.BigIntegerField()
    divergence = models.CharField(max_length=32, default="chi2")

    config = models.JSONField(default=dict, blank=True)
    summary = models.JSONField(default=dict, blank=True)

    status = models.CharField(max_length=16, choices=Status.choices, default=Status.RUNNING)
    failures = models.PositiveIntegerField(default=0)

    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        db_table = "simulation_run"
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["scenario", "n"], name="run_scenario_n_idx"),
        ]

    def __str__(self):
        return f"{self.scenario} n={self.n} x{self.replications} (seed {self.seed})"


class ReplicationResult(models.Model):
    run = models.ForeignKey(SimulationRun, on_delete=models.CASCADE, related_name="results")
    rep = models.PositiveIntegerField()

    lam = models.FloatField(null=True, blank=True)
    theta = models.JSONField(default=dict, blank=True)
    alpha = models.JSONField(default=dict, blank=True)
    objective = models.FloatField(null=True, blank=True)
    phi_plus = models.BooleanField(null=True, blank=True)
    standard_errors = models.JSONField(default=dict, blank=True)
    seconds = models.FloatField(default=0.0)

    failed = models.BooleanField(default=False)
    error = models.TextField(blank=True, default="")

    class Meta:
        db_table = "replication_result"
        ordering = ["run", "rep"]
        constraints = [
            models.UniqueConstraint(fields=["run", "rep"], name="uniq_rep_per_run"),
        ]


class RunEvent(models.Model):
    run = models.ForeignKey(SimulationRun, on_delete=models.CASCADE, related_name="events")

    event_type = models.CharField(
        max_length=50,
        choices=EventType.choices
    )

    message = models.TextField()
    metadata = models.JSONField(default=dict, blank=True)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = "run_event"
        ordering = ["-created_at"]
