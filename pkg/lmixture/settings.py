"""
Django settings for the lmixture project.

The project has no web surface: it hosts the ``estimation`` app, its
management commands and the tables that keep simulation runs.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.0/ref/settings/
"""

from pathlib import Path
import os
import dj_database_url


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.environ.get('SECRET_KEY', default='lmixture-local-key')
DEBUG = os.environ.get('DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'estimation.apps.EstimationConfig',
]

MIDDLEWARE = []


def _env_flag(name, default=False):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


LOG_LEVEL = os.environ.get("LMIX_LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": LOG_LEVEL,
    },
}


# Database

DATABASE_URL = os.environ.get("DATABASE_URL")

if DATABASE_URL:
    # Postgres (or any dj-database-url URL) for shared run history
    DATABASES = {
        "default": dj_database_url.parse(
            DATABASE_URL,
            conn_max_age=600,
            ssl_require=_env_flag("DATABASE_SSL", False),
        )
    }
else:
    # Local: SQLite by default
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.sqlite3",
            "NAME": BASE_DIR / "db.sqlite3",
        }
    }


# Numerical defaults (see estimation/conf.py), each overridable from the environment

LMIX = {
    "QUAD_RTOL": float(os.environ.get("LMIX_QUAD_RTOL", "1e-8")),
    "QUAD_RTOL_2D": float(os.environ.get("LMIX_QUAD_RTOL_2D", "1e-6")),
    "QUAD_MAX_SUBDIVISIONS": int(os.environ.get("LMIX_QUAD_MAX_SUBDIVISIONS", "200000")),
    "MAX_BREAKPOINTS": int(os.environ.get("LMIX_MAX_BREAKPOINTS", "2000")),
    "TAIL_MASS": float(os.environ.get("LMIX_TAIL_MASS", "1e-8")),
    "TAIL_WIDEN": float(os.environ.get("LMIX_TAIL_WIDEN", "0.10")),
    "COND_LIMIT": float(os.environ.get("LMIX_COND_LIMIT", "1e12")),
    "XI_NORM_WARN": float(os.environ.get("LMIX_XI_NORM_WARN", "1e6")),
    "NM_XATOL": float(os.environ.get("LMIX_NM_XATOL", "1e-6")),
    "NM_MAXITER": int(os.environ.get("LMIX_NM_MAXITER", "500")),
    "LAMBDA_MIN": float(os.environ.get("LMIX_LAMBDA_MIN", "0.005")),
    "LAMBDA_MAX": float(os.environ.get("LMIX_LAMBDA_MAX", "0.995")),
    "PANELS_2D": int(os.environ.get("LMIX_PANELS_2D", "128")),
    "JOBS": int(os.environ.get("LMIX_JOBS", "1")),
    "SLOW_TESTS": _env_flag("LMIX_SLOW_TESTS", False),
}


# Internationalization

LANGUAGE_CODE = "en-us"
USE_I18N = False

USE_TZ = True
TIME_ZONE = "UTC"


# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
