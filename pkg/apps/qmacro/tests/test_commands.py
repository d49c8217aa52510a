import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from apps.qmacro.BLL.Commands.benchmarkCommand.benchmark_commands import BenchMseCommand
from apps.qmacro.BLL.Commands.operatorCommand.operator_commands import OpsCommand
from apps.qmacro.BLL.Commands.qtildeCommand.qtilde_commands import MultiplicityCommand, QTildeCommand
from apps.qmacro.BLL.Commands.tomographyCommand.tomography_commands import ReconstructCommand
from apps.qmacro.BLL.Commands.verifyCommand.verify_commands import VerifyCommand
from utils.enums import ExitCode


class CommandClassTests(SimpleTestCase):
    def test_qtilde_full(self):
        result = QTildeCommand.Execute(2, 3, state="ghz")
        self.assertTrue(result.is_success)
        self.assertEqual(len(result.data["rows"]), 20)
        self.assertAlmostEqual(result.data["total"], 8.0)
        self.assertEqual(result.data["columns"], ["m01", "m10", "m11", "R", "qtilde"])

    def test_qtilde_analytic_needs_named_state(self):
        result = QTildeCommand.Execute(2, 3, state="dicke:1", method="analytic")
        self.assertEqual(result.exit_code, ExitCode.USAGE)
        self.assertIsNone(result.data)

    def test_qtilde_projection(self):
        result = QTildeCommand.Execute(3, 2, state="fiducial", method="symmetric", project=["m01"])
        self.assertTrue(result.is_success)
        self.assertAlmostEqual(sum(row[-1] for row in result.data["marginal"]), result.data["total"])

    def test_bad_dimension_is_usage_error(self):
        self.assertEqual(QTildeCommand.Execute(4, 1).exit_code, ExitCode.USAGE)

    def test_multiplicity(self):
        result = MultiplicityCommand.Execute(3, 2)
        self.assertTrue(result.is_success)
        self.assertEqual(result.data["totals"]["classes"], 45)
        self.assertEqual(result.data["totals"]["sum_R"], 81)
        self.assertEqual(result.data["mismatches"], 0)

    def test_multiplicity_without_closed_form(self):
        result = MultiplicityCommand.Execute(5, 1, method="orbits")
        self.assertTrue(result.is_success)
        self.assertEqual(result.data["totals"]["classes"], 25)
        self.assertTrue(all(row[-1] is None for row in result.data["rows"]))

    def test_ops(self):
        result = OpsCommand.Execute(3, labels=["0,1", "m11"])
        self.assertTrue(result.is_success)
        self.assertEqual([o["label"] for o in result.data["operators"]], ["O01", "O11"])
        for entry in result.data["operators"]:
            self.assertAlmostEqual(entry["trace_square"], 0.5)
            self.assertLess(entry["closed_form_residual"], 1e-10)
        self.assertEqual(len(result.data["commuting_sets"]), 4)

    def test_reconstruct_product_state(self):
        path = Path(tempfile.mkdtemp()) / "state.json"
        path.write_text(json.dumps({"d": 2, "N": 2, "vector": [[0, 0], [1, 0], [0, 0], [0, 0]]}))
        result = ReconstructCommand.Execute(2, 2, state=f"file:{path}")
        self.assertTrue(result.is_success)
        self.assertAlmostEqual(result.data["fidelity"], 0.5)
        self.assertAlmostEqual(result.data["pure_fidelity"], 0.5)
        self.assertLess(result.data["symmetrization_error"], 1e-9)

    def test_reconstruct_symmetric(self):
        result = ReconstructCommand.Execute(2, 3, mode="symmetric", state="ghz")
        self.assertTrue(result.is_success)
        self.assertAlmostEqual(result.data["fidelity"], 1.0)
        self.assertLess(result.data["redundancy"]["max_violation"], 1e-9)
        self.assertEqual(result.data["redundancy"]["parameters"], 15)

    def test_reconstruct_needs_one_source(self):
        self.assertEqual(ReconstructCommand.Execute(2, 2).exit_code, ExitCode.USAGE)

    def test_verify(self):
        for d in (2, 3):
            result = VerifyCommand.Execute("all", d, 2, seed=1)
            failed = [c for c in result.data["checks"] if not c["passed"]]
            self.assertEqual(failed, [])
            self.assertTrue(result.is_success)

    def test_verify_projected_expectation_is_informational_beyond_two_qubits(self):
        result = VerifyCommand.Execute("collective", 2, 3, seed=1)
        self.assertTrue(result.is_success)
        flagged = [c for c in result.data["checks"] if c["informational"]]
        self.assertEqual(len(flagged), 1)
        self.assertIn("N=3", flagged[0]["name"])

    def test_bench(self):
        result = BenchMseCommand.Execute(2, 2, protocols=("collective", "sic"), trials="50,100,200", states=2, seed=3)
        self.assertTrue(result.is_success)
        self.assertEqual(len(result.data["records"]), 6)
        self.assertEqual(set(result.data["fits"]), {"collective", "sic"})

    def test_bench_rejects_unknown_protocol(self):
        result = BenchMseCommand.Execute(2, 2, protocols=("homodyne",), trials="50,100,200", states=1)
        self.assertEqual(result.exit_code, ExitCode.USAGE)

    def test_threaded_bench_matches_sequential(self):
        kwargs = dict(trials=(50, 100, 200), states=3, seed=4)
        sequential = BenchMseCommand.Execute(2, 2, workers=1, **kwargs)
        threaded = BenchMseCommand.Execute(2, 2, workers=3, **kwargs)
        self.assertEqual(sequential.data["records"], threaded.data["records"])


class ManagementCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def call(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, output_dir=str(self.tmp), **options)
        return out.getvalue()

    def test_qtilde_writes_csv_and_manifest(self):
        output = self.call("qtilde", d=2, n=3, state="ghz", project="m01")
        self.assertIn("20 classes", output)
        with (self.tmp / "qtilde_d2_n3_ghz_full.csv").open() as fh:
            rows = list(csv.reader(fh))
        self.assertEqual(rows[0], ["m01", "m10", "m11", "R", "qtilde"])
        self.assertEqual(len(rows), 21)
        self.assertTrue((self.tmp / "qtilde_d2_n3_ghz_full_marginal.csv").exists())
        manifest = json.loads((self.tmp / "qtilde_d2_n3_ghz_full.manifest.json").read_text())
        self.assertEqual(manifest["command"], "qtilde")
        self.assertEqual(manifest["parameters"]["d"], 2)

    def test_manifest_replay(self):
        self.call("multiplicity", d=2, n=3)
        manifest = self.tmp / "multiplicity_d2_n3.manifest.json"
        replay_dir = self.tmp / "replay"
        out = StringIO()
        call_command("multiplicity", stdout=out, manifest=str(manifest), output_dir=str(replay_dir))
        self.assertIn("Replaying", out.getvalue())
        self.assertTrue((replay_dir / "multiplicity_d2_n3.csv").exists())

    def test_manifest_from_another_command(self):
        self.call("multiplicity", d=2, n=1)
        with self.assertRaises(CommandError) as ctx:
            self.call("qtilde", manifest=str(self.tmp / "multiplicity_d2_n1.manifest.json"))
        self.assertEqual(ctx.exception.returncode, ExitCode.USAGE)

    def test_missing_dimension(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("ops")
        self.assertEqual(ctx.exception.returncode, ExitCode.USAGE)

    def test_ops_prints_matrices(self):
        output = self.call("ops", d=2)
        self.assertIn("O01", output)
        self.assertIn("Commuting sets", output)

    def test_verify_suite(self):
        output = self.call("verify", d=2, suite="sic")
        self.assertIn("PASS", output)

    def test_verify_unknown_suite(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", d=2, suite="everything")
        self.assertEqual(ctx.exception.returncode, ExitCode.USAGE)

    def test_capacity_exit_code(self):
        with override_settings(QMACRO_MAX_DIM=8):
            with self.assertRaises(CommandError) as ctx:
                self.call("qtilde", d=2, n=4)
        self.assertEqual(ctx.exception.returncode, ExitCode.CAPACITY)

    def test_reconstruct_from_counts(self):
        counts = self.tmp / "counts.json"
        counts.write_text(json.dumps({"d": 2, "N": 1, "counts": {"0,0,0": 25, "0,1,1": 25, "1,0,1": 25, "1,1,0": 25}}))
        output = self.call("reconstruct", d=2, n=1, mode="symmetric", counts=str(counts))
        self.assertIn("redundancy max violation", output)
        data = json.loads((self.tmp / "reconstruct_symmetric_d2_n1_counts.json").read_text())
        self.assertAlmostEqual(data["trace"][0], 1.0)

    def test_incomplete_counts(self):
        counts = self.tmp / "partial.json"
        counts.write_text(json.dumps({"d": 2, "N": 1, "counts": {"0,0,0": 10}}))
        with self.assertRaises(CommandError) as ctx:
            self.call("reconstruct", d=2, n=1, counts=str(counts))
        self.assertEqual(ctx.exception.returncode, ExitCode.BAD_INPUT)

    def test_bench_mse(self):
        output = self.call("bench_mse", d=2, n=2, trials="50,100,200", states=2, seed=5)
        self.assertIn("collective: lambda", output)
        self.assertTrue((self.tmp / "bench_mse_d2_n2_collective_pure.json").exists())
