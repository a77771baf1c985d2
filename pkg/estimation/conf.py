"""Numerical defaults, overridable through ``settings.LMIX``."""
from __future__ import annotations

from typing import Any

DEFAULTS: dict[str, Any] = {
    "QUAD_RTOL": 1e-8,
    "QUAD_RTOL_2D": 1e-6,
    "QUAD_MAX_SUBDIVISIONS": 200_000,
    "MAX_BREAKPOINTS": 2000,
    "TAIL_MASS": 1e-8,
    "TAIL_WIDEN": 0.10,
    "COND_LIMIT": 1e12,
    "XI_NORM_WARN": 1e6,
    "NM_XATOL": 1e-6,
    "NM_MAXITER": 500,
    "LAMBDA_MIN": 0.005,
    "LAMBDA_MAX": 0.995,
    "PANELS_2D": 128,
    "JOBS": 1,
    "SLOW_TESTS": False,
}


def numeric_setting(name: str) -> Any:
    """Configured value, or the default when the library runs without Django settings."""
    from django.conf import settings
    from django.core.exceptions import ImproperlyConfigured

    try:
        overrides = getattr(settings, "LMIX", None) or {}
    except ImproperlyConfigured:
        overrides = {}
    return overrides.get(name, DEFAULTS[name])
