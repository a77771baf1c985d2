from django.test import SimpleTestCase

from estimation.errors import NotFound, ValidationError
from estimation.scenarios import SCENARIOS, get_scenario, scenario_from_dict, scenario_names


class RegistryTests(SimpleTestCase):
    def test_alias(self):
        self.assertEqual(get_scenario("table2").name, "table2-n1000")
        self.assertIn("table2", scenario_names())

    def test_unknown_name(self):
        with self.assertRaises(NotFound) as ctx:
            get_scenario("table9")
        self.assertIn("table3-mix1", str(ctx.exception))

    def test_sample_size_override(self):
        scenario = get_scenario("table3-mix1", n=250)
        self.assertEqual(scenario.n, 250)
        self.assertEqual(SCENARIOS["table3-mix1"].n, 1000)
        with self.assertRaises(ValidationError):
            get_scenario("table3-mix1", n=0)

    def test_every_scenario_is_consistent(self):
        for scenario in SCENARIOS.values():
            dim = scenario.model.dimension
            self.assertEqual(len(scenario.truth_phi), dim, scenario.name)
            self.assertEqual(len(scenario.space.lower), dim, scenario.name)
            for start in scenario.starts:
                self.assertEqual(len(start), dim, scenario.name)
                for value, lo, hi in zip(start, scenario.space.lower, scenario.space.upper):
                    self.assertTrue(lo <= value <= hi, (scenario.name, start))

    def test_weights_follow_the_parametric_component(self):
        scenario = get_scenario("table2")
        self.assertEqual(scenario.truth.proportion, 0.7)
        self.assertEqual(scenario.truth.parametric.family, "lognormal")
        self.assertEqual(scenario.model.names, ("lambda", "theta_mu", "alpha_shape"))


class CustomScenarioTests(SimpleTestCase):
    def document(self, **extra):
        document = {
            "lambda": 0.4,
            "parametric": {"family": "exponential", "rate": 2.0},
            "unknown": {"family": "weibull", "scale": 1.0, "shape": 1.5},
            "theta": ["rate"],
            "alpha": ["shape"],
            "lower": [0.01, 0.1, 0.2],
            "upper": [0.99, 10.0, 20.0],
        }
        document.update(extra)
        return document

    def test_defaults(self):
        scenario = scenario_from_dict(self.document())
        self.assertEqual(scenario.name, "custom")
        self.assertEqual(scenario.n, 1000)
        self.assertEqual(scenario.truth_phi, (0.4, 2.0, 1.5))
        self.assertEqual(scenario.model.constraints.orders, (2, 3, 4))
        self.assertEqual(len(scenario.starts), 1)
        self.assertAlmostEqual(scenario.starts[0][1], 5.05)

    def test_explicit_values(self):
        scenario = scenario_from_dict(self.document(name="mine", n=300, starts=[[0.4, 2, 1.5]], orders=[2, 3]), n=50)
        self.assertEqual((scenario.name, scenario.n), ("mine", 50))
        self.assertEqual(scenario.starts, ((0.4, 2.0, 1.5),))
        self.assertEqual(scenario.model.constraints.orders, (2, 3))

    def test_invalid_documents(self):
        document = self.document()
        del document["unknown"]
        with self.assertRaises(ValidationError):
            scenario_from_dict(document)
        with self.assertRaises(ValidationError):
            scenario_from_dict(self.document(lower=[0.01, 0.1]))
        with self.assertRaises(ValidationError):
            scenario_from_dict(self.document(parametric={"rate": 2.0}))
        with self.assertRaises(ValidationError):
            scenario_from_dict(self.document(theta=["mu"]))
