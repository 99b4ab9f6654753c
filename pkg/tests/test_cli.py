import io
import json
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import TestCase

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

import numpy as np  # noqa: E402

from ultrawalks.cli import main  # noqa: E402
from ultrawalks.matrix_io import read_matrix  # noqa: E402


class CliTests(TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.out = Path(self.tmpdir.name) / "out"

    def tearDown(self):
        self.tmpdir.cleanup()

    def invoke(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        code = 0
        with redirect_stdout(stdout), redirect_stderr(stderr):
            try:
                main(list(argv))
            except SystemExit as exc:
                code = exc.code
        return code, stdout.getvalue(), stderr.getvalue()

    def test_spectrum_reports_multiplicities(self):
        code, out, _ = self.invoke("spectrum", "--p", "2", "--l", "5", "--alpha", "1.2")
        self.assertEqual(code, 0)
        document = json.loads(out)
        multiplicities = sorted(item["multiplicity"] for item in document["eigenspaces"])
        self.assertEqual(multiplicities, [1, 1, 2, 4, 8, 16])
        self.assertFalse(document["collapsed"])
        self.assertEqual(len(document["forecast"]), 6)

    def test_ctmc_converges_to_uniform(self):
        code, out, _ = self.invoke(
            "ctmc", "--p", "2", "--l", "5", "--alpha", "1.2", "--times", "10000", "--out", str(self.out)
        )
        self.assertEqual(code, 0)
        records = json.loads(out)
        self.assertEqual(records[0]["written"], ["ctmc/t10000.csv", "ctmc/t10000.json"])
        matrix = read_matrix(self.out / "ctmc" / "t10000.csv")
        np.testing.assert_allclose(matrix.values, 0.03125, atol=1e-10)
        self.assertEqual(matrix.header["kind"], "classical")

    def test_ctqmc_writes_requested_format(self):
        code, out, _ = self.invoke(
            "ctqmc", "--p", "2", "--l", "3", "--alpha", "2", "--times", "0", "5", "--format", "json",
            "--out", str(self.out),
        )
        self.assertEqual(code, 0)
        self.assertTrue((self.out / "ctqmc" / "t5.json").exists())
        self.assertFalse((self.out / "ctqmc" / "t5.csv").exists())

    def test_validate_passes(self):
        code, out, _ = self.invoke("validate", "--p", "2", "--l", "3", "--alpha", "2")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["passed"])

    def test_compare_reports_both_dominance_flags(self):
        code, out, _ = self.invoke("compare", "--p", "2", "--l", "5", "--alpha", "1.2")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["method"], "spectral")
        self.assertFalse(document["dominance"])
        self.assertTrue(document["diagonal_dominance"])

    def test_limiting_quadrature(self):
        code, out, _ = self.invoke(
            "limiting", "--p", "2", "--l", "2", "--alpha", "1.2", "--method", "quadrature",
            "--T", "10", "--steps", "101", "--out", str(self.out),
        )
        self.assertEqual(code, 0)
        chi = read_matrix(self.out / "limiting" / "quadrature.csv").values
        np.testing.assert_allclose(chi.sum(axis=1), 1.0, atol=1e-8)

    def test_matrix_subcommand(self):
        code, out, _ = self.invoke("matrix", "--p", "3", "--l", "2", "--alpha", "0.5", "--out", str(self.out))
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["validation"]["passed"])
        self.assertEqual(read_matrix(self.out / "generator.json").values.shape, (9, 9))

    def test_missing_required_flags_is_usage_error(self):
        code, _, err = self.invoke("spectrum", "--p", "2", "--alpha", "1.2")
        self.assertEqual(code, 2)
        self.assertIn("--l", err)
        code, _, _ = self.invoke("spectrum", "--p", "2", "--l", "3")
        self.assertEqual(code, 2)
        code, _, _ = self.invoke("spectrum", "--p", "2", "--l", "3", "--alpha", "2", "--bogus")
        self.assertEqual(code, 2)

    def test_domain_failures_exit_with_one(self):
        code, _, err = self.invoke("spectrum", "--p", "2", "--l", "3", "--alpha", "0")
        self.assertEqual(code, 1)
        self.assertIn("pole", err)
        code, _, err = self.invoke("spectrum", "--p", "4", "--l", "3", "--alpha", "2")
        self.assertEqual(code, 1)
        self.assertIn("prime", err)

    def test_config_file_with_flag_override(self):
        config = Path(self.tmpdir.name) / "run.toml"
        config.write_text('p = 2\nl = 2\ntimes = [0, 1]\n\n[kernel]\nkind = "log_bessel"\nalpha = 1.0\n')
        code, out, _ = self.invoke("spectrum", "--config", str(config), "--l", "3")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["l"], 3)
        self.assertEqual(sum(item["multiplicity"] for item in document["eigenspaces"]), 8)
