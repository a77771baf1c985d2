import numpy as np
from django.test import SimpleTestCase

from estimation.distributions import ComponentDistribution, ConstraintModel
from estimation.divergences import cressie_read
from estimation.dual import profiled_objective
from estimation.errors import InsufficientDataError, ValidationError
from estimation.lmoments import LMomentBasis, sample_lmoments
from estimation.mixture import ParameterSpace
from estimation.splq import spacings_integrals, spacings_problem, splq_fit

from .utils import slow


class SpacingsIntegralTests(SimpleTestCase):
    def setUp(self):
        self.data = np.random.default_rng(21).weibull(1.5, 4000)
        self.basis = LMomentBasis((2, 3, 4))

    def test_weights_are_the_spacings(self):
        integrals = spacings_integrals(self.data, self.basis)
        x = np.sort(self.data)
        np.testing.assert_allclose(integrals.weights, np.diff(x))
        self.assertEqual(integrals.k_values.shape, (3999, 3))
        self.assertTrue(integrals.converged)

    def test_b_tracks_the_sample_lmoments(self):
        integrals = spacings_integrals(self.data, self.basis)
        vector = sample_lmoments(self.data, 4)
        np.testing.assert_allclose(-integrals.b, [vector[2], vector[3], vector[4]], rtol=0.02, atol=1e-3)

    def test_own_plug_in_constraints_are_satisfied(self):
        b = spacings_integrals(self.data, self.basis).b
        state = profiled_objective(spacings_problem(self.data, self.basis, b))
        np.testing.assert_allclose(state.xi, 0.0, atol=1e-10)
        self.assertAlmostEqual(state.value, 0.0, delta=1e-14)

    def test_degenerate_samples(self):
        with self.assertRaises(InsufficientDataError):
            spacings_integrals([2.0] * 50, self.basis)
        with self.assertRaises(InsufficientDataError):
            spacings_integrals([1.0, 2.0, 3.0], self.basis)
        with self.assertRaises(ValidationError):
            spacings_integrals([1.0, 2.0, np.inf, 4.0, 5.0], self.basis)


class SplqFitTests(SimpleTestCase):
    def setUp(self):
        self.data = np.random.default_rng(8).weibull(1.5, 5000)

    def test_shape_is_recovered(self):
        constraints = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("shape",))
        fit = splq_fit(self.data, constraints, ParameterSpace((0.2,), (20.0,)), starts=[(1.0,)])
        self.assertAlmostEqual(fit.alpha["shape"], 1.5, delta=0.1)
        self.assertEqual(fit.spacings, 4999)
        self.assertEqual(len(fit.starts), 2)
        self.assertEqual(set(fit.as_dict()), {"alpha", "xi", "objective", "spacings", "divergence", "starts"})

    def test_scale_and_shape_with_another_divergence(self):
        data = 2.0 * self.data
        constraints = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("scale", "shape"))
        fit = splq_fit(
            data, constraints, ParameterSpace((0.1, 0.2), (10.0, 20.0)), cressie_read(1.0), starts=[(1.5, 1.2)]
        )
        self.assertAlmostEqual(fit.alpha["scale"], 2.0, delta=0.2)
        self.assertAlmostEqual(fit.alpha["shape"], 1.5, delta=0.15)
        self.assertEqual(fit.divergence, "kl")

    def test_box_dimension(self):
        constraints = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("shape",))
        with self.assertRaises(ValidationError):
            splq_fit(self.data, constraints, ParameterSpace((0.1, 0.2), (10.0, 20.0)))

    @slow
    def test_scale_and_shape_over_seeded_samples(self):
        constraints = ConstraintModel(ComponentDistribution.of("weibull", scale=1.0, shape=1.0), ("scale", "shape"))
        space = ParameterSpace((0.1, 0.2), (10.0, 20.0))
        hits = 0
        for seed in range(20):
            data = np.random.default_rng(seed).weibull(1.5, 10_000)
            fit = splq_fit(data, constraints, space, starts=[(1.0, 1.0)])
            if abs(fit.alpha["scale"] - 1.0) <= 0.1 and abs(fit.alpha["shape"] - 1.5) <= 0.1:
                hits += 1
        self.assertGreaterEqual(hits, 18)
