from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Optional

from django.core.management.base import BaseCommand, CommandError

from estimation.errors import EstimationError, ValidationError
from estimation.events.event_types import EventType
from estimation.events.helpers import log_event
from estimation.helpers import merge_options, parse_vector, read_json_config, to_json
from estimation.scenarios import Scenario, get_scenario, scenario_from_dict

logger = logging.getLogger(__name__)


class EstimationCommand(BaseCommand):
    """Maps domain errors onto exit codes: 2 for bad input, 1 for numerical failure."""

    # option name -> default, filled in after the config file and the flags are merged
    defaults: dict[str, Any] = {}

    def add_config_argument(self, parser):
        parser.add_argument("--config", help="JSON document whose keys mirror the command-line flags")

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except ValidationError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        except EstimationError as exc:
            logger.debug("command failed", exc_info=True)
            log_event(EventType.ERROR, {"error": str(exc)})
            raise CommandError(str(exc), returncode=1) from exc

    def run(self, **options):
        raise NotImplementedError

    # ----- helpers -----
    def merged(self, options: dict) -> dict:
        document = read_json_config(options["config"]) if options.get("config") else {}
        flags = {k: options.get(k) for k in self.defaults}
        file_options = {k.replace("-", "_"): v for k, v in document.items()}
        merged = merge_options(file_options, flags, self.defaults)
        for key, default in self.defaults.items():
            if merged[key] is None:
                merged[key] = default
        merged["model"] = file_options.get("model")
        return merged

    @staticmethod
    def scenario(options: dict) -> Scenario:
        n = options.get("n")
        n = int(n) if n is not None else None
        if options.get("model") is not None:
            return scenario_from_dict(options["model"], n=n)
        if not options.get("scenario"):
            raise ValidationError("give --scenario or a 'model' object in --config")
        return get_scenario(options["scenario"], n=n)

    @staticmethod
    def starts(values) -> tuple[tuple[float, ...], ...]:
        if not values:
            return ()
        return tuple(parse_vector(v) if isinstance(v, str) else tuple(float(x) for x in v) for v in values)

    def emit(self, document: Any, output: Optional[str] = None) -> None:
        text = to_json(document)
        if output:
            Path(output).write_text(text)
            self.stderr.write(f"wrote {output}")
        else:
            self.stdout.write(text, ending="")

    def emit_frame(self, frame, output: Optional[str] = None) -> None:
        text = frame.to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")
        if output:
            Path(output).write_text(text)
            self.stderr.write(f"wrote {output}")
        else:
            self.stdout.write(text, ending="")
