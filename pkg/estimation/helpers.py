from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd

from .errors import ValidationError


def child_seed(master_seed: int, rep: int) -> int:
    """Seed of replication ``rep`` (1-based); reproducible without running the others."""
    return int(master_seed) + int(rep)


def _clean(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def to_json(document: Any) -> str:
    """JSON with NaN/inf as null; floats keep their shortest round-trip repr."""
    return json.dumps(_clean(document), indent=2, sort_keys=False, allow_nan=False) + "\n"


def jsonable(document: Any) -> Any:
    return _clean(document)


def read_sample_csv(path: str | Path) -> np.ndarray:
    """One observation per line with an optional ``x`` header."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"{path}: no such file")
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: file is empty") from None
    except pd.errors.ParserError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if frame.shape[1] != 1:
        raise ValidationError(f"{path}: expected one value per line, found {frame.shape[1]} columns")
    column = frame.iloc[:, 0]
    column = column[column.notna()].str.strip()
    if len(column) and column.iloc[0].lower() == "x":
        column = column.iloc[1:]
    values = pd.to_numeric(column, errors="coerce")
    bad = values[values.isna() | ~np.isfinite(values.fillna(0.0))]
    if len(bad):
        index = bad.index[0]
        raise ValidationError(f"{path}: line {index + 1}: not a finite number: {frame.iloc[index, 0]!r}")
    if values.empty:
        raise ValidationError(f"{path}: no observations")
    return values.to_numpy(dtype=float)


def read_json_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(document, dict):
        raise ValidationError(f"{path}: the configuration must be a JSON object")
    return document


def merge_options(file_options: dict, flag_options: dict, keys: Iterable[str]) -> dict:
    """Flags that were given override values from the configuration file."""
    merged = {}
    for key in keys:
        flag = flag_options.get(key)
        merged[key] = flag if flag is not None else file_options.get(key)
    return merged


def parse_vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"invalid number list {text!r}") from None
