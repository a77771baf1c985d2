from pathlib import Path

from django.core.management.base import CommandError

from estimation.services import ScenarioConfig, SimulationService

from ._base import EstimationCommand


class Command(EstimationCommand):
    help = "Seeded replications of a scenario: per-replication CSV rows plus a JSON summary."

    defaults = {
        "scenario": None,
        "n": None,
        "reps": 100,
        "seed": 0,
        "divergence": "chi2",
        "jobs": 1,
        "starts": None,
        "output": None,
        "asymptotics": False,
        "record_timing": False,
        "store": False,
    }

    def add_arguments(self, parser):
        parser.add_argument("--scenario", help="registry name, e.g. table3-mix1 or table2")
        parser.add_argument("--n", type=int, help="sample size override")
        parser.add_argument("--reps", type=int, help="number of replications (default 100)")
        parser.add_argument("--seed", type=int, help="master seed; replication k uses seed + k")
        parser.add_argument("--divergence")
        parser.add_argument("--jobs", type=int, help="replications run in parallel processes")
        parser.add_argument("--start", dest="starts", action="append")
        parser.add_argument("--output", help="path prefix for <prefix>.csv and <prefix>.json")
        parser.add_argument("--asymptotics", action="store_true", default=None, help="add plug-in standard errors")
        parser.add_argument("--record-timing", action="store_true", default=None, help="fill the seconds column")
        parser.add_argument("--store", action="store_true", default=None, help="persist the run in the database")
        self.add_config_argument(parser)

    def run(self, **options):
        opts = self.merged(options)
        scenario = self.scenario(opts)
        config = ScenarioConfig(
            scenario=scenario,
            reps=int(opts["reps"]),
            seed=int(opts["seed"]),
            divergence=str(opts["divergence"]),
            output=Path(opts["output"] or f"{scenario.name}-n{scenario.n}-seed{opts['seed']}"),
            jobs=int(opts["jobs"]),
            asymptotics=bool(opts["asymptotics"]),
            record_timing=bool(opts["record_timing"]),
            starts=self.starts(opts["starts"]),
        )

        if opts["store"]:
            report, run = SimulationService.run_and_store(config)
            self.stderr.write(f"stored simulation run {run.pk}")
        else:
            report = SimulationService.run(config)
        paths = SimulationService.write_outputs(report, config.output)

        lam = report.summary["columns"].get("lambda", {})
        self.stdout.write(
            f"{scenario.name} n={scenario.n} reps={config.reps}: "
            f"mean lambda {lam.get('mean')}, sd {lam.get('sd')}, failures {report.failures}"
        )
        self.stdout.write(f"wrote {paths['csv']} and {paths['json']}")
        if report.too_many_failures:
            raise CommandError(
                f"{report.failures} of {config.reps} replications failed (more than 20%)", returncode=1
            )
