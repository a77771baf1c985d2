from unittest import skipUnless

from django.test import tag

from estimation.conf import numeric_setting


def slow(test):
    """Desk-scale runs: tagged ``slow`` and skipped unless ``LMIX["SLOW_TESTS"]`` is on (env LMIX_SLOW_TESTS)."""
    enabled = bool(numeric_setting("SLOW_TESTS"))
    return tag("slow")(skipUnless(enabled, "set LMIX_SLOW_TESTS=1 for desk-scale runs")(test))
