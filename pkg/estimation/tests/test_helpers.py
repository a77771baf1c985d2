import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings

from estimation.conf import numeric_setting
from estimation.errors import ValidationError
from estimation.helpers import (
    child_seed,
    merge_options,
    parse_vector,
    read_json_config,
    read_sample_csv,
    to_json,
)

from .utils import slow


class FileTestMixin:
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.dir = Path(self._tmp.name)

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text)
        return path


class ReadSampleCsvTests(FileTestMixin, SimpleTestCase):
    def test_plain_values(self):
        np.testing.assert_allclose(read_sample_csv(self.write("a.csv", "1.5\n2\n-3e-1\n")), [1.5, 2.0, -0.3])

    def test_header_and_blank_lines(self):
        path = self.write("b.csv", "x\n1.0\n\n 2.0 \n")
        np.testing.assert_array_equal(read_sample_csv(path), [1.0, 2.0])

    def test_bad_line_is_reported(self):
        path = self.write("c.csv", "x\n1.0\nabc\n3.0\n")
        with self.assertRaises(ValidationError) as ctx:
            read_sample_csv(path)
        self.assertIn("line 3", str(ctx.exception))
        self.assertIn("abc", str(ctx.exception))

    def test_non_finite_values(self):
        with self.assertRaises(ValidationError):
            read_sample_csv(self.write("d.csv", "1.0\ninf\n"))

    def test_empty_and_missing_files(self):
        with self.assertRaises(ValidationError):
            read_sample_csv(self.write("e.csv", ""))
        with self.assertRaises(ValidationError):
            read_sample_csv(self.write("f.csv", "x\n"))
        with self.assertRaises(ValidationError):
            read_sample_csv(self.dir / "missing.csv")

    def test_several_columns(self):
        with self.assertRaises(ValidationError):
            read_sample_csv(self.write("g.csv", "1,2\n3,4\n"))


class ReadJsonConfigTests(FileTestMixin, SimpleTestCase):
    def test_object(self):
        self.assertEqual(read_json_config(self.write("a.json", '{"reps": 5}')), {"reps": 5})

    def test_syntax_error_position(self):
        path = self.write("b.json", '{\n  "reps": 5\n  "seed": 1\n}\n')
        with self.assertRaises(ValidationError) as ctx:
            read_json_config(path)
        self.assertIn("line 3", str(ctx.exception))

    def test_not_an_object(self):
        with self.assertRaises(ValidationError):
            read_json_config(self.write("c.json", "[1, 2]"))

    def test_missing(self):
        with self.assertRaises(ValidationError):
            read_json_config(self.dir / "nope.json")


class MergeOptionsTests(SimpleTestCase):
    def test_flags_override_file_values(self):
        merged = merge_options({"reps": 10, "seed": 1}, {"reps": None, "seed": 7, "jobs": None}, ["reps", "seed", "jobs"])
        self.assertEqual(merged, {"reps": 10, "seed": 7, "jobs": None})

    def test_false_flags_still_count(self):
        self.assertEqual(merge_options({"asymptotics": True}, {"asymptotics": False}, ["asymptotics"]), {"asymptotics": False})


class SerializationTests(SimpleTestCase):
    def test_non_finite_numbers_become_null(self):
        document = {
            "nan": math.nan,
            "list": [1.0, np.float64(np.inf)],
            "int": np.int64(3),
            "flag": np.bool_(True),
            "array": np.array([0.1, 0.2]),
            "tuple": (1, 2),
        }
        text = to_json(document)
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(
            json.loads(text),
            {"nan": None, "list": [1.0, None], "int": 3, "flag": True, "array": [0.1, 0.2], "tuple": [1, 2]},
        )

    def test_floats_round_trip(self):
        value = 0.1 + 0.2
        self.assertEqual(json.loads(to_json({"v": value}))["v"], value)


class SeedAndVectorTests(SimpleTestCase):
    def test_child_seed(self):
        self.assertEqual(child_seed(42, 1), 43)
        self.assertEqual([child_seed(0, k) for k in (1, 2, 3)], [1, 2, 3])

    def test_parse_vector(self):
        self.assertEqual(parse_vector("1, 2,3"), (1.0, 2.0, 3.0))
        self.assertEqual(parse_vector("0.5,"), (0.5,))
        with self.assertRaises(ValidationError):
            parse_vector("1,a")


class NumericSettingTests(SimpleTestCase):
    @override_settings(LMIX={"NM_MAXITER": 7})
    def test_overrides_fall_back_to_defaults(self):
        self.assertEqual(numeric_setting("NM_MAXITER"), 7)
        self.assertEqual(numeric_setting("QUAD_RTOL"), 1e-8)

    def test_slow_runs_follow_the_setting(self):
        def sample(self):
            pass

        with override_settings(LMIX={"SLOW_TESTS": False}):
            self.assertTrue(getattr(slow(sample), "__unittest_skip__", False))
        with override_settings(LMIX={"SLOW_TESTS": True}):
            self.assertFalse(getattr(slow(sample), "__unittest_skip__", False))
