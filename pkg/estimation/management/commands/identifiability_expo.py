import numpy as np
import pandas as pd

from estimation.errors import ValidationError
from estimation.identifiability import identifiability_curve_exponential

from ._base import EstimationCommand


def _grid(text: str, geometric: bool = False) -> np.ndarray:
    """``lo,hi,count`` into a linear (or geometric) grid."""
    try:
        lo, hi, count = text.split(",")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ValidationError(f"grid must be 'lo,hi,count', got {text!r}") from None
    if count < 2 or not lo < hi:
        raise ValidationError(f"invalid grid {text!r}")
    return np.geomspace(lo, hi, count) if geometric else np.linspace(lo, hi, count)


class Command(EstimationCommand):
    help = (
        "Curve of (lambda, a1) pairs sharing the L-moments of an exponential mixture, with the Phi+ flag. "
        "Django command names take underscores: run it as identifiability_expo, not identifiability-expo."
    )

    defaults = {
        "lambda_star": None,
        "a1_star": None,
        "a0_star": None,
        "lambdas": "0.5,0.95,91",
        "a1_grid": "0.05,20,801",
        "grid_size": 1000,
        "phi_plus_only": False,
        "output": None,
    }

    def add_arguments(self, parser):
        parser.add_argument("--lambda-star", type=float)
        parser.add_argument("--a1-star", type=float)
        parser.add_argument("--a0-star", type=float)
        parser.add_argument("--lambdas", help="lo,hi,count")
        parser.add_argument("--a1-grid", help="lo,hi,count (geometric) bracketing grid for the roots")
        parser.add_argument("--grid-size", type=int)
        parser.add_argument("--phi-plus-only", action="store_true", default=None)
        parser.add_argument("--output", help="CSV path; stdout when omitted")
        self.add_config_argument(parser)

    def run(self, **options):
        opts = self.merged(options)
        for key in ("lambda_star", "a1_star", "a0_star"):
            if opts[key] is None:
                raise ValidationError(f"--{key.replace('_', '-')} is required")
        points = identifiability_curve_exponential(
            float(opts["lambda_star"]),
            float(opts["a1_star"]),
            float(opts["a0_star"]),
            lambdas=_grid(str(opts["lambdas"])),
            a1_grid=_grid(str(opts["a1_grid"]), geometric=True),
            grid_size=int(opts["grid_size"]),
        )
        if opts["phi_plus_only"]:
            points = [p for p in points if p.phi_plus]
        frame = pd.DataFrame(
            {
                "lambda": [p.lam for p in points],
                "a1": [p.a1 for p in points],
                "residual": [p.residual for p in points],
                "phi_plus": [str(p.phi_plus).lower() for p in points],
            },
            columns=["lambda", "a1", "residual", "phi_plus"],
        )
        self.emit_frame(frame, opts["output"])
