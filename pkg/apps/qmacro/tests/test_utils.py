import tempfile
import uuid
from pathlib import Path

import numpy as np
from django.core.cache import cache
from django.test import SimpleTestCase

from apps.qmacro.BLL.Commands.runCommand.run_manifest import RunManifest
from backend.exception_formatter import ExceptionFormatter
from backend.exceptions import CapacityError, UsageError
from utils.base_result import BaseResultWithData
from utils.cache_helper import GlobalCache
from utils.enums import ExitCode, Protocol
from utils.log_helpers import OperationLogger
from utils.serialization_helpers import complex_matrix_from_pairs, serialize_for_export, write_csv


class GlobalCacheTests(SimpleTestCase):
    def test_get_or_compute_runs_factory_once(self):
        calls = []

        def factory():
            calls.append(1)
            return np.arange(3)

        key = GlobalCache.key("test", "once", uuid.uuid4().hex)
        self.addCleanup(cache.delete, key)
        first = GlobalCache.get_or_compute(key, factory)
        second = GlobalCache.get_or_compute(key, factory)
        np.testing.assert_array_equal(first, second)
        self.assertEqual(len(calls), 1)

    def test_families_do_not_collide(self):
        a, b = GlobalCache.key("test", "a", uuid.uuid4().hex), GlobalCache.key("tested", "a", uuid.uuid4().hex)
        self.addCleanup(cache.delete_many, [a, b])
        GlobalCache.set(a, 1)
        GlobalCache.set(b, 2)
        self.assertEqual((GlobalCache.get(a), GlobalCache.get(b)), (1, 2))

    def test_key_layout(self):
        self.assertEqual(GlobalCache.key("space", "exhaustive", 2, 3), "qmacro:space:exhaustive:2:3")


class SerializationTests(SimpleTestCase):
    def test_export_types(self):
        payload = {
            (0, 1): np.array([1 + 2j, 3]),
            "count": np.int64(4),
            "flag": np.bool_(True),
            "protocol": Protocol.SIC,
        }
        self.assertEqual(serialize_for_export(payload), {
            "0,1": [[1.0, 2.0], [3.0, 0.0]],
            "count": 4,
            "flag": True,
            "protocol": "sic",
        })

    def test_complex_pairs(self):
        np.testing.assert_allclose(complex_matrix_from_pairs([[[1, 0], [0, -1]]]), [[1, -1j]])
        with self.assertRaises(ValueError):
            complex_matrix_from_pairs([[1, 2, 3]])

    def test_csv_floats_keep_precision(self):
        path = write_csv(Path(tempfile.mkdtemp()) / "t.csv", ["x"], [[1 / 3]])
        self.assertEqual(path.read_text().splitlines(), ["x", repr(1 / 3)])


class ExceptionFormatterTests(SimpleTestCase):
    def test_domain_error_keeps_message_and_code(self):
        result = ExceptionFormatter.format_error(CapacityError("too big"), "Test", with_data=True)
        self.assertIsInstance(result, BaseResultWithData)
        self.assertEqual(result.exit_code, ExitCode.CAPACITY)
        self.assertEqual(result.message, "too big")
        self.assertFalse(result.is_success)

    def test_unexpected_error_is_masked(self):
        result = ExceptionFormatter.format_error(ZeroDivisionError("boom"), "Test")
        self.assertEqual(result.exit_code, ExitCode.VERIFICATION_FAILED)
        self.assertNotIn("boom", result.message)
        self.assertEqual(result.to_dict()["exit_code"], 1)


class RunManifestTests(SimpleTestCase):
    def test_write_and_replay(self):
        options = {"d": 3, "n": 2, "state": "ghz", "output_dir": "/tmp/x", "verbosity": 1}
        manifest = RunManifest.for_options("qtilde", options, seed=7)
        self.assertNotIn("output_dir", manifest.parameters)
        path = manifest.write(tempfile.mkdtemp(), "run")
        self.assertTrue(path.name.endswith(".manifest.json"))
        loaded = RunManifest.load(path)
        self.assertEqual(loaded.replay_options("qtilde"), {"d": 3, "n": 2, "state": "ghz"})
        self.assertEqual(loaded.seed, 7)
        with self.assertRaises(UsageError):
            loaded.replay_options("verify")

    def test_unreadable_manifest(self):
        with self.assertRaises(UsageError):
            RunManifest.load(Path(tempfile.mkdtemp()) / "missing.json")


class OperationLoggerTests(SimpleTestCase):
    def test_parameter_block_and_phases(self):
        op = OperationLogger("Test", d=3, protocols=(Protocol.SIC, Protocol.COLLECTIVE), fiducial=None)
        with self.assertLogs("utils.log_helpers", level="DEBUG") as logs:
            op.start()
            with op.phase("stage", classes=np.int64(45)):
                pass
            op.fail("broken", exc=ValueError("x"), exit_code=ExitCode.BAD_INPUT)
        text = "\n".join(logs.output)
        self.assertIn("sic,collective", text)
        self.assertNotIn("Fiducial", text)
        self.assertIn("stage took", text)
        self.assertIn("classes=45", text)
        self.assertIn("(exit 4)", text)
