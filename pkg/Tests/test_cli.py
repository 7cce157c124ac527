"""
Test Suite for the affine-quiver command line.
Runs main() in-process and checks report lines, JSON records and exit codes.
"""

import io
import json
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import mock

sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent))

import unittest

import cli
from cli import main
from fixtures import data_path


class CliCase(unittest.TestCase):

    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()


class TestInfo(CliCase):

    def test_kronecker(self):
        code, out, _ = self.run_cli("info", data_path("kronecker.json"))
        self.assertEqual(code, 0)
        self.assertIn("family A~(1)", out)
        self.assertIn("delta=(1,1)", out)
        self.assertIn("defect 1:1, 2:-1", out)
        self.assertIn("admissible sink sequence 2, 1", out)

    def test_cyclic(self):
        code, out, _ = self.run_cli("info", data_path("cyclic3.json"))
        self.assertEqual(code, 0)
        self.assertIn("no admissible order", out)

    def test_json_format(self):
        code, out, _ = self.run_cli("info", data_path("d4tilde.json"), "--format", "json")
        self.assertEqual(code, 0)
        record = json.loads(out.splitlines()[0])
        self.assertEqual(record["family"], "D~(4)")
        self.assertEqual(record["delta"], [2, 1, 1, 1, 1])

    def test_missing_file(self):
        code, _, err = self.run_cli("info", data_path("missing.json"))
        self.assertEqual(code, 2)
        self.assertIn("error [parse]", err)

    def test_json_error_record(self):
        code, out, _ = self.run_cli("info", data_path("missing.json"), "--format", "json")
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)["error"], "parse")

    def test_unexpected_failure_is_an_internal_error(self):
        with mock.patch.object(cli, "cmd_info", side_effect=RuntimeError("boom")):
            code, out, _ = self.run_cli("info", data_path("kronecker.json"), "--format", "json")
        self.assertEqual(code, 1)
        record = json.loads(out)
        self.assertEqual(record["error"], "internal")
        self.assertIn("boom", record["message"])


class TestFunctorCommands(CliCase):

    def test_classify(self):
        code, out, _ = self.run_cli("classify", data_path("kronecker.json"), data_path("kronecker_mixed.json"), "--verify")
        self.assertEqual(code, 0)
        self.assertIn("(1,1): regular homogeneous, defect 0", out)
        self.assertIn("(0,1): preprojective (projective), defect -1", out)
        self.assertEqual(len(out.splitlines()), 3)

    def test_reflect(self):
        code, out, _ = self.run_cli("reflect", data_path("kronecker.json"), data_path("kronecker_s1.json"), "2")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "dims (1,2)")

    def test_reflect_at_non_sink(self):
        code, _, err = self.run_cli("reflect", data_path("kronecker.json"), data_path("kronecker_s1.json"), "1")
        self.assertEqual(code, 2)
        self.assertIn("error [usage]", err)

    def test_coxeter_minus(self):
        code, out, _ = self.run_cli("coxeter", data_path("kronecker.json"), data_path("kronecker_s2.json"), "--minus")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "dims (2,3)")


class TestTubeCommands(CliCase):

    def test_one_tube(self):
        code, out, _ = self.run_cli("tubes", data_path("a2tilde.json"))
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "1 tube, period 2")
        self.assertIn("simples (0,1,0) (1,0,1)", out)

    def test_three_tubes(self):
        code, out, _ = self.run_cli("tubes", data_path("d4tilde.json"))
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "3 tubes, periods [2,2,2]")

    def test_non_prime_field(self):
        code, _, err = self.run_cli("tubes", data_path("a2tilde.json"), "--field", "4")
        self.assertEqual(code, 2)
        self.assertIn("error [usage]", err)

    def test_hall_apply(self):
        code, out, _ = self.run_cli("hall-apply", data_path("a2tilde.json"), "0:3")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "dims (1,2,1)")

    def test_hall_apply_bad_tube(self):
        code, _, _ = self.run_cli("hall-apply", data_path("a2tilde.json"), "0:1", "--tube", "2")
        self.assertEqual(code, 2)


class TestBasisCommand(CliCase):

    def test_oracle_pass(self):
        code, out, _ = self.run_cli("basis", data_path("kronecker.json"), "2,2", "--oracle", "--no-cache")
        self.assertEqual(code, 0)
        self.assertIn("|Delta| = 6", out)
        self.assertIn("oracle 6 PASS", out)

    def test_strata(self):
        code, out, _ = self.run_cli("basis", data_path("kronecker.json"), "1,1", "--strata", "--no-cache")
        self.assertEqual(code, 0)
        self.assertIn("sigma={I2.0:1, P1.0:1} lambda=(0) dim=0", out)
        self.assertIn("sigma={0} lambda=(1) dim=2", out)

    def test_cache_directory(self):
        with tempfile.TemporaryDirectory() as cache:
            code, out, _ = self.run_cli("basis", data_path("a2tilde.json"), "1,1,1", "--oracle", "--cache", cache)
            self.assertEqual(code, 0)
            self.assertIn("oracle 6 PASS", out)
            self.assertEqual(len(list(Path(cache).glob("*.json"))), 1)

    def test_cyclic_quiver(self):
        code, _, err = self.run_cli("basis", data_path("cyclic3.json"), "1,1,1", "--no-cache")
        self.assertEqual(code, 1)
        self.assertIn("error [no_admissible_order]", err)

    def test_bad_dimension_vector(self):
        code, _, _ = self.run_cli("basis", data_path("kronecker.json"), "1,x", "--no-cache")
        self.assertEqual(code, 2)


class TestHallCommands(CliCase):

    def test_serre(self):
        code, out, _ = self.run_cli("serre", data_path("a2.json"), "1", "2", "2")
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "serre 1 2 q=2 PASS")

    def test_hall_number(self):
        s1 = data_path("kronecker_s1.json")
        code, out, _ = self.run_cli("hall-num", s1, s1, data_path("kronecker_s1_squared.json"))
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "g = 3 over F_2")

    def test_hall_polynomial(self):
        s1 = data_path("kronecker_s1.json")
        code, out, _ = self.run_cli("hall-num", s1, s1, data_path("kronecker_s1_squared.json"), "--polynomial")
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "g = 3 over F_2, Hall polynomial q + 1")

    def test_cap_exceeded(self):
        s1 = data_path("kronecker_s1.json")
        code, _, err = self.run_cli("hall-num", s1, s1, data_path("kronecker_s1_squared.json"), "--cap", "1")
        self.assertEqual(code, 4)
        self.assertIn("error [explosion]", err)


class TestArgumentParsing(CliCase):

    def test_unknown_command(self):
        with self.assertRaises(SystemExit) as raised:
            self.run_cli("mutate", data_path("kronecker.json"))
        self.assertEqual(raised.exception.code, 2)

    def test_bad_format(self):
        with self.assertRaises(SystemExit):
            self.run_cli("info", data_path("kronecker.json"), "--format", "xml")


if __name__ == '__main__':
    unittest.main()
