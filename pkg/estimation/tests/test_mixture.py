import math
from types import SimpleNamespace
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from estimation.errors import EstimationFailure, InsufficientDataError, NumericalError, ValidationError
from estimation.mixture import (
    ParameterSpace,
    ProfileEvaluator,
    StartTrace,
    _pick_best,
    check_phi_plus,
    estimate,
    nelder_mead_start,
    objective_trace,
    phi_plus_grid,
)
from estimation.scenarios import get_scenario

from .utils import slow


class MixtureModelTests(SimpleTestCase):
    def setUp(self):
        self.scenario = get_scenario("table1-mix1")
        self.model = self.scenario.model

    def test_names(self):
        self.assertEqual(self.model.names, ("lambda", "theta_shape", "alpha_shape"))
        self.assertEqual(self.model.dimension, 3)

    def test_unpack_and_split(self):
        lam, parametric, alpha = self.model.unpack([0.4, 2.5, 1.1])
        self.assertEqual(lam, 0.4)
        self.assertEqual(parametric["shape"], 2.5)
        self.assertEqual(parametric["scale"], 0.5)
        np.testing.assert_array_equal(alpha, [1.1])
        self.assertEqual(self.model.split([0.4, 2.5, 1.1]), (0.4, {"shape": 2.5}, {"shape": 1.1}))
        with self.assertRaises(ValidationError):
            self.model.unpack([0.4, 2.5])

    def test_truth_phi(self):
        self.assertEqual(self.scenario.truth_phi, (0.3, 2.0, 1.0))


class ParameterSpaceTests(SimpleTestCase):
    def setUp(self):
        self.space = ParameterSpace((0.005, 0.2, 0.2), (0.995, 20.0, 20.0))

    def test_project_reflects_then_clips(self):
        np.testing.assert_allclose(self.space.project([-0.1, 1.0, 1.0]), [0.11, 1.0, 1.0])
        np.testing.assert_allclose(self.space.project([0.5, 25.0, 1.0]), [0.5, 15.0, 1.0])
        np.testing.assert_allclose(self.space.project([0.5, 100.0, 1.0]), [0.5, 0.2, 1.0])
        np.testing.assert_array_equal(self.space.project([0.5, 3.0, 4.0]), [0.5, 3.0, 4.0])

    def test_centre(self):
        np.testing.assert_allclose(self.space.centre(), [0.5, 10.1, 10.1])

    def test_proportion_is_kept_inside_the_open_interval(self):
        space = ParameterSpace((0.0, 0.0), (1.0, 1.0))
        self.assertGreater(space.effective_lower[0], 0.0)
        self.assertLess(space.effective_upper[0], 1.0)
        self.assertEqual(ParameterSpace((0.0,), (1.0,), proportion_first=False).effective_lower[0], 0.0)

    def test_invalid_boxes(self):
        with self.assertRaises(ValidationError):
            ParameterSpace((0.0, 1.0), (1.0,))
        with self.assertRaises(ValidationError):
            ParameterSpace((0.0, 2.0), (1.0, 1.0))
        with self.assertRaises(ValidationError):
            ParameterSpace((0.0,), (math.inf,))


class ProfileTests(SimpleTestCase):
    def setUp(self):
        self.scenario = get_scenario("table1-mix1")
        self.evaluator = ProfileEvaluator(self.scenario.model, self.scenario.truth)

    def test_vanishes_at_the_truth_only(self):
        at_truth = self.evaluator.profile(self.scenario.truth_phi).value
        self.assertLess(abs(at_truth), 1e-12)
        self.assertGreater(self.evaluator.profile([0.5, 1.5, 1.4]).value, 1e-8)

    def test_objective_trace_marks_failures(self):
        values = objective_trace(self.evaluator, [self.scenario.truth_phi, [0.3, 2.0]])
        self.assertLess(abs(values[0]), 1e-12)
        self.assertTrue(math.isnan(values[1]))

    def test_phi_plus_grid(self):
        rows = phi_plus_grid(self.scenario.truth.parametric, "shape", self.scenario.truth, [0.3, 0.99], [2.0])
        self.assertEqual(rows, [(0.3, 2.0, True), (0.99, 2.0, False)])

    def test_check_phi_plus_uses_the_exact_density(self):
        self.assertTrue(check_phi_plus(self.scenario.model, self.scenario.truth_phi, self.scenario.truth))


class NelderMeadStartTests(SimpleTestCase):
    class Quadratic:
        def __init__(self, target, scale=1.0):
            self.target = np.asarray(target, dtype=float)
            self.scale = scale

        def profile(self, phi, xi0=None):
            return SimpleNamespace(value=self.scale * float(np.sum((phi - self.target) ** 2)), xi=np.zeros(1))

    def setUp(self):
        self.space = ParameterSpace((0.0, 0.0), (1.0, 100.0), proportion_first=False)

    def test_stops_on_the_relative_simplex_size(self):
        trace = nelder_mead_start(self.Quadratic((0.3, 40.0)), self.space, np.array([0.5, 50.0]))
        self.assertTrue(trace.converged)
        self.assertLess(trace.iterations, 500)
        self.assertAlmostEqual(trace.phi[0], 0.3, delta=1e-5)
        self.assertAlmostEqual(trace.phi[1], 40.0, delta=1e-3)

    def test_objective_scale_does_not_stop_the_search(self):
        trace = nelder_mead_start(self.Quadratic((0.3, 40.0), scale=1e-20), self.space, np.array([0.5, 50.0]))
        self.assertAlmostEqual(trace.phi[0], 0.3, delta=1e-5)
        self.assertAlmostEqual(trace.phi[1], 40.0, delta=1e-3)


class EstimateValidationTests(SimpleTestCase):
    def setUp(self):
        self.scenario = get_scenario("table1-mix1")
        self.data = np.random.default_rng(0).weibull(1.0, 200)

    def test_small_samples(self):
        with self.assertRaises(InsufficientDataError):
            estimate(self.data[:29], self.scenario.model, self.scenario.space)

    def test_box_must_match_the_parameters(self):
        with self.assertRaises(ValidationError):
            estimate(self.data, self.scenario.model, ParameterSpace((0.1, 0.1), (0.9, 5.0)))

    def test_start_must_match_the_parameters(self):
        with self.assertRaises(ValidationError):
            estimate(self.data, self.scenario.model, self.scenario.space, starts=[(0.3, 2.0)])

    def test_every_start_failing(self):
        failed = StartTrace((0.3, 2.0, 1.0), (0.3, 2.0, 1.0), math.inf, 0, 0, False, "crashed", "boom")
        with mock.patch("estimation.mixture.nelder_mead_start", return_value=failed):
            with self.assertRaises(EstimationFailure) as ctx:
                estimate(self.data, self.scenario.model, self.scenario.space, starts=[(0.3, 2.0, 1.0)] * 2)
        self.assertEqual(len(ctx.exception.traces), 2)

    def test_failing_evaluations_are_infinite(self):
        with mock.patch.object(ProfileEvaluator, "profile", side_effect=NumericalError("boom")):
            with self.assertRaises(EstimationFailure):
                estimate(self.data, self.scenario.model, self.scenario.space)

    def test_pick_best_breaks_ties_on_the_point(self):
        a = StartTrace((0,), (0.5, 1.0, 1.0), 0.1, 1, 1, True, "")
        b = StartTrace((0,), (0.4, 1.0, 1.0), 0.1, 1, 1, True, "")
        c = StartTrace((0,), (0.1, 1.0, 1.0), math.inf, 1, 1, False, "")
        self.assertIs(_pick_best([a, b, c]), b)


@slow
class EstimateRecoveryTests(SimpleTestCase):
    def test_exact_cdf_recovers_the_truth(self):
        scenario = get_scenario("table1-mix1")
        result = estimate(scenario.truth, scenario.model, scenario.space, starts=[(0.35, 1.8, 1.2)])
        np.testing.assert_allclose(result.phi, scenario.truth_phi, atol=1e-3)
        self.assertLess(result.objective, 1e-10)
        self.assertTrue(result.phi_plus)
        self.assertEqual(result.n, 0)

    def test_sample_estimate_is_close(self):
        scenario = get_scenario("table3-mix1")
        data = np.random.default_rng(42).permutation(
            np.concatenate([
                scenario.truth.parametric.sample(300, np.random.default_rng(1)),
                scenario.truth.unknown.sample(700, np.random.default_rng(2)),
            ])
        )
        result = estimate(data, scenario.model, scenario.space, starts=scenario.starts[:2])
        self.assertAlmostEqual(result.lam, 0.3, delta=0.1)
        self.assertEqual(result.names, scenario.model.names)
        self.assertEqual(len(result.starts), 2)
