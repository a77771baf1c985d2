import pandas as pd

from estimation.errors import ValidationError
from estimation.mixture import phi_plus_grid

from ._base import EstimationCommand
from .identifiability_expo import _grid


class Command(EstimationCommand):
    help = "Phi+ membership of (lambda, theta) over a grid, for one free parameter of a scenario's parametric component."

    defaults = {
        "scenario": None,
        "theta": None,
        "lambdas": "0.01,0.99,50",
        "thetas": None,
        "grid_size": 1000,
        "output": None,
    }

    def add_arguments(self, parser):
        parser.add_argument("--scenario")
        parser.add_argument("--theta", help="parametric parameter to vary (default: the first free one)")
        parser.add_argument("--lambdas", help="lo,hi,count")
        parser.add_argument("--thetas", help="lo,hi,count")
        parser.add_argument("--grid-size", type=int)
        parser.add_argument("--output", help="CSV path; stdout when omitted")
        self.add_config_argument(parser)

    def run(self, **options):
        opts = self.merged(options)
        scenario = self.scenario(opts)
        theta = opts["theta"] or (scenario.model.theta_names[0] if scenario.model.theta_names else None)
        if theta is None:
            raise ValidationError(f"scenario {scenario.name} has no free parametric parameter; give --theta")
        if not opts["thetas"]:
            raise ValidationError("--thetas is required")
        rows = phi_plus_grid(
            scenario.model.parametric,
            theta,
            scenario.truth,
            _grid(str(opts["lambdas"])),
            _grid(str(opts["thetas"])),
            grid_size=int(opts["grid_size"]),
        )
        frame = pd.DataFrame(rows, columns=["lambda", theta, "phi_plus"])
        frame["phi_plus"] = frame["phi_plus"].map(lambda v: str(bool(v)).lower())
        self.emit_frame(frame, opts["output"])
