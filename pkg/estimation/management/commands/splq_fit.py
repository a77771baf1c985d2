from estimation.distributions import ComponentDistribution, ConstraintModel, Family, PARAMETER_NAMES
from estimation.divergences import parse_divergence
from estimation.errors import ValidationError
from estimation.helpers import parse_vector, read_sample_csv
from estimation.mixture import ParameterSpace
from estimation.splq import splq_fit

from ._base import EstimationCommand

PARAMETER_FLAGS = ("scale", "shape", "mu", "sigma", "rate")


class Command(EstimationCommand):
    help = (
        "Fit an L-moment model alone (no parametric component) by sample-spacings plug-in. "
        "Django command names take underscores: run it as splq_fit, not splq-fit."
    )

    defaults = {
        "data": None,
        "family": None,
        "free": None,
        "orders": "2,3,4",
        "lower": None,
        "upper": None,
        "starts": None,
        "divergence": "chi2",
        "output": None,
        **{name: None for name in PARAMETER_FLAGS},
    }

    def add_arguments(self, parser):
        parser.add_argument("data", nargs="?", help="CSV file, one observation per line")
        parser.add_argument("--family", choices=Family.values)
        parser.add_argument("--free", help="comma-separated free parameter names (default: all)")
        for name in PARAMETER_FLAGS:
            parser.add_argument(f"--{name}", type=float, help="fixed value (or reference value when free)")
        parser.add_argument("--orders", help="comma-separated L-moment orders, default 2,3,4")
        parser.add_argument("--lower", help="comma-separated lower box for the free parameters")
        parser.add_argument("--upper", help="comma-separated upper box for the free parameters")
        parser.add_argument("--start", dest="starts", action="append")
        parser.add_argument("--divergence")
        parser.add_argument("--output")
        self.add_config_argument(parser)

    def run(self, **options):
        opts = self.merged(options)
        if not opts["data"] or not opts["family"]:
            raise ValidationError("a data file and --family are required")
        family = opts["family"]
        names = PARAMETER_NAMES[family]
        free = tuple(v.strip() for v in str(opts["free"]).split(",")) if opts["free"] else names

        # free parameters without a value get a placeholder inside the box
        lower = self._vector(opts["lower"], len(free), "lower")
        upper = self._vector(opts["upper"], len(free), "upper")
        values = {}
        for name in names:
            if opts.get(name) is not None:
                values[name] = float(opts[name])
            elif name in free:
                values[name] = 0.5 * (lower[free.index(name)] + upper[free.index(name)])
            else:
                raise ValidationError(f"--{name} is required when it is not free")

        orders = tuple(int(r) for r in parse_vector(str(opts["orders"])))
        constraints = ConstraintModel(ComponentDistribution.of(family, **values), free, orders)
        space = ParameterSpace(lower, upper, proportion_first=False)
        fit = splq_fit(
            read_sample_csv(opts["data"]),
            constraints,
            space,
            parse_divergence(opts["divergence"]),
            self.starts(opts["starts"]),
        )
        self.emit(fit.as_dict(), opts["output"])

    @staticmethod
    def _vector(value, size: int, what: str) -> tuple[float, ...]:
        if value is None:
            raise ValidationError(f"--{what} is required")
        vector = parse_vector(value) if isinstance(value, str) else tuple(float(v) for v in value)
        if len(vector) != size:
            raise ValidationError(f"--{what} needs {size} values, got {len(vector)}")
        return vector
