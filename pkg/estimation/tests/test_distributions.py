import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from estimation.distributions import (
    ComponentDistribution,
    ConstraintModel,
    MixtureSpec,
    gaussian_lmoments,
    lognormal_lmoments,
    sample_mixture,
    two_sided_weibull_lmoments,
    weibull_lmoments,
)
from estimation.errors import ValidationError
from estimation.lmoments import population_lmoments_by_quadrature, shifted_legendre

SCALES = (0.5, 1.0, 1.5, 2.0, 3.0)
SHAPES = (0.7, 1.0, 1.5, 2.0, 3.0)


class ClosedFormLMomentTests(SimpleTestCase):
    def test_weibull_exponential_case(self):
        for scale in SCALES:
            self.assertAlmostEqual(weibull_lmoments(scale, 1.0)[0], scale / 2.0, places=14)

    def test_weibull_dispersion_decreases_with_shape(self):
        values = [weibull_lmoments(1.0, shape)[0] for shape in (1, 2, 5, 10, 50)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_weibull_matches_quadrature(self):
        for scale in SCALES:
            for shape in SHAPES:
                oracle = population_lmoments_by_quadrature(
                    stats.weibull_min(c=shape, scale=scale).ppf, 4, orders=(2, 3, 4)
                )
                np.testing.assert_allclose(weibull_lmoments(scale, shape), oracle.values, rtol=1e-6, atol=1e-9)

    def test_two_sided_weibull(self):
        self.assertAlmostEqual(two_sided_weibull_lmoments(2.0, 1.0)[0], 1.5)
        for scale in SCALES:
            for shape in SHAPES:
                closed = two_sided_weibull_lmoments(scale, shape)
                self.assertEqual(closed[1], 0.0)
                oracle = population_lmoments_by_quadrature(
                    stats.dweibull(c=shape, scale=scale).ppf, 4, orders=(2, 3, 4)
                )
                np.testing.assert_allclose(closed, oracle.values, rtol=1e-6, atol=1e-8)

    def test_gaussian(self):
        l2, l3, l4 = gaussian_lmoments(1.0, 2.0)
        self.assertAlmostEqual(l2, 2.0 / math.sqrt(math.pi))
        self.assertEqual(l3, 0.0)
        oracle = population_lmoments_by_quadrature(stats.norm(loc=1.0, scale=2.0).ppf, 4, orders=(4,))
        self.assertAlmostEqual(l4, oracle[4], delta=1e-7)

    def test_exponential(self):
        component = ComponentDistribution.of("exponential", rate=2.0)
        np.testing.assert_allclose(component.lmoments((2, 3, 4)), (0.25, 1 / 12, 1 / 24))

    def test_non_positive_parameters(self):
        with self.assertRaises(ValidationError):
            weibull_lmoments(-1.0, 1.0)
        with self.assertRaises(ValidationError):
            two_sided_weibull_lmoments(1.0, 0.0)


class LognormalLMomentTests(SimpleTestCase):
    def test_location_factorises(self):
        base = lognormal_lmoments(0.0, 0.5)
        shifted = lognormal_lmoments(3.0, 0.5)
        np.testing.assert_allclose(shifted, np.exp(3.0) * np.asarray(base), rtol=1e-14)

    def test_right_skew(self):
        for mu in (-1.0, 0.0, 3.0):
            for sigma in (0.2, 0.5, 1.0):
                self.assertGreater(lognormal_lmoments(mu, sigma)[1], 0.0)

    def test_mean_row(self):
        component = ComponentDistribution.of("lognormal", mu=3.0, sigma=0.5)
        self.assertAlmostEqual(component.mean(), math.exp(3.125), places=9)

    def test_against_gauss_hermite(self):
        mu, sigma = 3.0, 0.5
        z, w = np.polynomial.hermite_e.hermegauss(100)
        w = w / math.sqrt(2 * math.pi)
        u = stats.norm.cdf(z)
        oracle = [float(np.sum(w * np.exp(mu + sigma * z) * shifted_legendre(r - 1)(u))) for r in (2, 3, 4)]
        np.testing.assert_allclose(lognormal_lmoments(mu, sigma), oracle, rtol=1e-6)


class ComponentDistributionTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(ValidationError):
            ComponentDistribution.of("weibull", scale=1.0)
        with self.assertRaises(ValidationError):
            ComponentDistribution.of("gaussian", mu=0.0, sigma=-1.0)
        with self.assertRaises(ValidationError):
            ComponentDistribution.of("cauchy", loc=0.0)
        with self.assertRaises(ValidationError):
            ComponentDistribution.of("weibull", scale=1.0, shape=1.0).with_values({"mu": 1.0})

    def test_values_and_describe(self):
        component = ComponentDistribution.of("weibull", shape=1.5, scale=1.0)
        self.assertEqual(component.values, {"scale": 1.0, "shape": 1.5})
        self.assertEqual(component["shape"], 1.5)
        self.assertEqual(component.describe(), "weibull(scale=1, shape=1.5)")
        self.assertEqual(component.with_values({"shape": 2.0})["shape"], 2.0)

    def test_tail_range(self):
        lo, hi = ComponentDistribution.of("gaussian", mu=0.0, sigma=1.0).tail_range(0.05)
        self.assertAlmostEqual(lo, -1.959963984540054, places=9)
        self.assertAlmostEqual(hi, 1.959963984540054, places=9)

    def test_cdf_gradient_closed_forms_match_differences(self):
        cases = [
            ComponentDistribution.of("weibull", scale=1.3, shape=1.7),
            ComponentDistribution.of("lognormal", mu=0.4, sigma=0.8),
            ComponentDistribution.of("gaussian", mu=-0.5, sigma=1.2),
            ComponentDistribution.of("exponential", rate=0.9),
        ]
        x = np.linspace(0.05, 4.0, 40)
        for component in cases:
            for name in component.values:
                closed = component.cdf_gradient(x, [name])[:, 0]
                numeric = component._central_difference(x, name)
                np.testing.assert_allclose(closed, numeric, rtol=1e-5, atol=1e-8, err_msg=f"{component} {name}")

    def test_cdf_gradient_shape(self):
        component = ComponentDistribution.of("two-sided-weibull", scale=1.0, shape=2.0)
        self.assertEqual(component.cdf_gradient(np.zeros((3, 4)), ["scale", "shape"]).shape, (3, 4, 2))
        self.assertEqual(component.cdf_gradient(np.zeros(5), []).shape, (5, 0))


class ConstraintModelTests(SimpleTestCase):
    def test_m_is_minus_lmoments(self):
        model = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("shape",))
        np.testing.assert_allclose(model.m([1.5]), -np.asarray(weibull_lmoments(1.0, 1.5)))
        self.assertEqual(model.dimension, 1)

    def test_gradient_is_linear_in_the_scale(self):
        model = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("scale", "shape"))
        gradient = model.gradient([1.0, 1.5])
        self.assertEqual(gradient.shape, (3, 2))
        # L-moments of order two and up scale with sigma
        np.testing.assert_allclose(gradient[:, 0], model.m([1.0, 1.5]), rtol=1e-6)

    def test_lognormal_location_gradient_is_exact(self):
        model = ConstraintModel(ComponentDistribution.of("lognormal", mu=3.0, sigma=0.5), ("mu",))
        h = 1e-5
        numeric = (model.m([3.0 + h]) - model.m([3.0 - h])) / (2 * h)
        np.testing.assert_allclose(model.gradient([3.0])[:, 0], numeric, rtol=1e-6)

    def test_rejects_bad_names_and_orders(self):
        base = ComponentDistribution.of("weibull", scale=1.0, shape=1.0)
        with self.assertRaises(ValidationError):
            ConstraintModel(base, ("mu",))
        with self.assertRaises(ValidationError):
            ConstraintModel(base, ("shape",), (1, 2))
        with self.assertRaises(ValidationError):
            ConstraintModel(base, ("shape",)).component([1.0, 2.0])


class MixtureTests(SimpleTestCase):
    def setUp(self):
        self.spec = MixtureSpec(
            0.3,
            ComponentDistribution.of("weibull", scale=1.0, shape=1.5),
            ComponentDistribution.of("lognormal", mu=3.0, sigma=0.5),
        )

    def test_cdf_limits_and_quantile(self):
        self.assertAlmostEqual(float(self.spec.cdf(-1.0)), 0.0)
        self.assertAlmostEqual(float(self.spec.cdf(1e6)), 1.0)
        u = np.array([0.01, 0.2, 0.3, 0.5, 0.99])
        np.testing.assert_allclose(self.spec.cdf(self.spec.quantile(u)), u, atol=1e-10)

    def test_mean(self):
        expected = 0.3 * math.gamma(1 + 1 / 1.5) + 0.7 * math.exp(3.125)
        self.assertAlmostEqual(self.spec.mean(), expected, places=8)

    def test_proportion_range(self):
        with self.assertRaises(ValidationError):
            MixtureSpec(1.2, self.spec.parametric, self.spec.unknown)

    def test_sampling_is_reproducible(self):
        np.testing.assert_array_equal(sample_mixture(self.spec, 500, 7), sample_mixture(self.spec, 500, 7))
        self.assertFalse(np.array_equal(sample_mixture(self.spec, 500, 7), sample_mixture(self.spec, 500, 8)))

    def test_degenerate_weights(self):
        only_parametric = MixtureSpec(1.0, self.spec.parametric, self.spec.unknown)
        data = sample_mixture(only_parametric, 10_000, 11)
        self.assertGreater(stats.kstest(data, self.spec.parametric.cdf).pvalue, 1e-3)
        only_unknown = MixtureSpec(0.0, self.spec.parametric, self.spec.unknown)
        data = sample_mixture(only_unknown, 10_000, 12)
        self.assertGreater(stats.kstest(data, self.spec.unknown.cdf).pvalue, 1e-3)

    def test_sample_size(self):
        with self.assertRaises(ValidationError):
            sample_mixture(self.spec, 0, 1)
