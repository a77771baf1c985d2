import math

import numpy as np
from django.test import SimpleTestCase

from estimation.distributions import ComponentDistribution, MixtureSpec, sample_mixture
from estimation.errors import InsufficientDataError, ValidationError
from estimation.signed_cdf import (
    EmpiricalCdf,
    SignedSubCdf,
    dkw_halfwidth,
    eval_signed_cdf,
    phi_plus_check,
    phi_plus_check_empirical,
)


def exponential(rate):
    return ComponentDistribution.of("exponential", rate=rate)


TRUTH = MixtureSpec(0.7, exponential(1.5), exponential(0.5))


class EmpiricalCdfTests(SimpleTestCase):
    def test_right_continuous_steps(self):
        F = EmpiricalCdf([3.0, 1.0, 2.0, 2.0])
        np.testing.assert_allclose(F.cdf([0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 9.0]), [0, 0.25, 0.25, 0.75, 0.75, 1, 1])
        self.assertEqual(F(2.0), 0.75)
        self.assertEqual(F.range, (1.0, 3.0))
        self.assertEqual(F.n, 4)

    def test_rejects_bad_samples(self):
        with self.assertRaises(InsufficientDataError):
            EmpiricalCdf([])
        with self.assertRaises(ValidationError):
            EmpiricalCdf([1.0, math.nan])


class SignedSubCdfTests(SimpleTestCase):
    def test_recovers_the_unknown_component_at_the_truth(self):
        y = np.linspace(0.0, 10.0, 21)
        np.testing.assert_allclose(eval_signed_cdf(0.7, exponential(1.5), TRUTH, y), TRUTH.unknown.cdf(y), atol=1e-14)

    def test_is_not_clipped(self):
        values = SignedSubCdf(TRUTH, exponential(0.1), 0.99)(np.array([5.0, 20.0]))
        self.assertTrue(np.any(values > 1.0) or np.any(values < 0.0))

    def test_proportion_must_be_interior(self):
        for lam in (0.0, 1.0, -0.2):
            with self.assertRaises(ValidationError):
                SignedSubCdf(TRUTH, exponential(1.0), lam)


class PhiPlusCheckTests(SimpleTestCase):
    def test_truth_is_a_member(self):
        self.assertTrue(phi_plus_check(0.7, exponential(1.5), TRUTH))

    def test_heavy_parametric_tail_is_rejected(self):
        result = phi_plus_check(0.99, exponential(0.1), TRUTH)
        self.assertFalse(result)
        self.assertIsNotNone(result.witness)
        self.assertLess(result.value, 0.0)

    def test_vanishing_proportion(self):
        self.assertTrue(phi_plus_check(1e-6, exponential(0.1), TRUTH))


class EmpiricalPhiPlusTests(SimpleTestCase):
    def setUp(self):
        self.sample = sample_mixture(TRUTH, 2000, 4)

    def test_dkw_halfwidth(self):
        self.assertAlmostEqual(dkw_halfwidth(100), math.sqrt(math.log(40.0) / 200.0))
        self.assertLess(dkw_halfwidth(10_000), dkw_halfwidth(100))

    def test_truth_is_compatible(self):
        self.assertTrue(phi_plus_check_empirical(0.7, exponential(1.5), self.sample, level=0.01))

    def test_incompatible_candidate(self):
        result = phi_plus_check_empirical(0.99, exponential(0.1), EmpiricalCdf(self.sample))
        self.assertFalse(result)
        self.assertGreater(result.value, 1.0)
