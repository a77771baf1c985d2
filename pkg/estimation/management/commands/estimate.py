from estimation.errors import ValidationError
from estimation.helpers import read_sample_csv
from estimation.services import EstimationService

from ._base import EstimationCommand


class Command(EstimationCommand):
    help = "Estimate a semiparametric two-component mixture from a sample (or from the scenario's true CDF)."

    defaults = {
        "data": None,
        "scenario": None,
        "divergence": "chi2",
        "starts": None,
        "random_starts": 0,
        "seed": None,
        "jobs": 1,
        "asymptotics": False,
        "exact": False,
        "output": None,
    }

    def add_arguments(self, parser):
        parser.add_argument("data", nargs="?", help="CSV file, one observation per line, optional header 'x'")
        parser.add_argument("--scenario", help="registry scenario supplying the model, box and starts")
        parser.add_argument("--divergence", help="chi2, kl, modified-kl, hellinger, neyman or cr:<gamma>")
        parser.add_argument("--start", dest="starts", action="append", help="comma-separated start vector; repeatable")
        parser.add_argument("--random-starts", type=int)
        parser.add_argument("--seed", type=int, help="drives --random-starts only")
        parser.add_argument("--jobs", type=int)
        parser.add_argument("--asymptotics", action="store_true", default=None)
        parser.add_argument("--exact", action="store_true", default=None, help="use the scenario's true mixture CDF")
        parser.add_argument("--output", help="write the JSON result here instead of stdout")
        self.add_config_argument(parser)

    def run(self, **options):
        opts = self.merged(options)
        scenario = self.scenario(opts)

        if opts["exact"]:
            data = scenario.truth
        elif opts["data"]:
            data = read_sample_csv(opts["data"])
        else:
            raise ValidationError("a data file is required unless --exact is given")

        result = EstimationService.estimate_sample(
            data,
            scenario,
            starts=self.starts(opts["starts"]),
            divergence=opts["divergence"],
            asymptotics=bool(opts["asymptotics"]),
            jobs=int(opts["jobs"]),
            seed=opts["seed"],
            random_starts=int(opts["random_starts"]),
        )
        self.emit({"scenario": scenario.name, "names": list(result.names), **result.as_dict()}, opts["output"])
