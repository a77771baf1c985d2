from django.core.management.base import CommandParser

from estimation.distributions import ComponentDistribution, Family
from estimation.errors import ValidationError
from estimation.helpers import read_sample_csv
from estimation.lmoments import LMomentVector, lmoment_ratios, sample_lmoments

from ._base import EstimationCommand

PARAMETER_FLAGS = ("scale", "shape", "mu", "sigma", "rate")


def _orders(text: str) -> tuple[int, ...]:
    try:
        orders = tuple(sorted({int(v) for v in text.split(",") if v.strip()}))
    except ValueError:
        raise ValidationError(f"invalid order list {text!r}") from None
    if not orders or orders[0] < 1:
        raise ValidationError("orders must be positive integers")
    return orders


class Command(EstimationCommand):
    help = "Population L-moments of a family (lmom dist) or sample L-moments of a CSV file (lmom sample)."

    defaults = {
        "source": None,
        "family": None,
        "path": None,
        "orders": "1,2,3,4",
        "max_order": 4,
        **{name: None for name in PARAMETER_FLAGS},
    }

    def add_arguments(self, parser):
        self.add_config_argument(parser)
        sub = parser.add_subparsers(dest="source", required=True, parser_class=CommandParser)

        dist = sub.add_parser("dist", help="closed-form (or quadrature) population L-moments")
        dist.add_argument("family", choices=Family.values)
        for name in PARAMETER_FLAGS:
            dist.add_argument(f"--{name}", type=float)
        dist.add_argument("--orders", help="comma-separated orders, e.g. 2,3,4")

        sample = sub.add_parser("sample", help="unbiased sample L-moments")
        sample.add_argument("path")
        sample.add_argument("--max-order", type=int)

    def run(self, **options):
        opts = self.merged(options)
        if opts["source"] == "dist":
            document = self._population(opts)
        else:
            data = read_sample_csv(opts["path"])
            vector = sample_lmoments(data, int(opts["max_order"]))
            document = {"n": int(data.size), "lmoments": vector.as_dict(), "ratios": lmoment_ratios(vector)}
        self.emit(document)

    @staticmethod
    def _population(opts: dict) -> dict:
        values = {name: float(opts[name]) for name in PARAMETER_FLAGS if opts.get(name) is not None}
        component = ComponentDistribution.of(opts["family"], **values)
        orders = _orders(str(opts["orders"]))
        higher = tuple(r for r in orders if r >= 2)
        lmoments = dict(zip(higher, component.lmoments(higher))) if higher else {}
        if 1 in orders:
            lmoments[1] = component.mean()
        vector = LMomentVector(orders=orders, values=tuple(float(lmoments[r]) for r in orders))
        return {
            "family": component.family,
            "params": component.values,
            "lmoments": vector.as_dict(),
            "ratios": lmoment_ratios(vector),
        }
