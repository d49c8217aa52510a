import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.qmacro.BLL.Core.fiducial import (
    FiducialState, builtin_coefficients, coherent_state, fiducial_from_config, fiducial_matrix_element,
    load_fiducial, sic_check, zeta,
)
from apps.qmacro.BLL.Core.zd_strings import DString
from backend.exceptions import DimensionError, DomainError, UnsupportedDimensionError


class BuiltinFiducialTests(SimpleTestCase):
    def test_qubit_zeta(self):
        self.assertAlmostEqual(abs(zeta()) ** 2, 2 - math.sqrt(3), places=12)
        self.assertAlmostEqual(np.linalg.norm(builtin_coefficients(2)), 1.0, places=12)

    def test_qutrit_coefficients(self):
        expected = np.array([1, np.exp(1j * np.pi / 3), 0]) / math.sqrt(2)
        assert_allclose(builtin_coefficients(3), expected, atol=1e-12)

    def test_no_builtin_for_five(self):
        with self.assertRaises(UnsupportedDimensionError):
            builtin_coefficients(5)

    def test_sic_condition_holds(self):
        for d in (2, 3):
            report = sic_check(FiducialState.builtin(d))
            self.assertTrue(report.is_sic, f"d={d} deviation {report.max_deviation}")
            off = report.overlaps[~np.eye(d * d, dtype=bool)]
            assert_allclose(off, 1.0 / (d + 1), atol=1e-10)
            assert_allclose(np.diag(report.overlaps), 1.0, atol=1e-12)

    def test_non_sic_is_reported(self):
        report = sic_check(np.array([1.0, 0.0]))
        self.assertFalse(report.is_sic)


class CoherentStateTests(SimpleTestCase):
    def setUp(self):
        self.xi = FiducialState.builtin(2)

    def test_origin_is_the_fiducial(self):
        psi = coherent_state(self.xi, DString((0,), 2), DString((0,), 2))
        assert_allclose(psi.amplitudes, builtin_coefficients(2), atol=1e-12)

    def test_shift_by_x(self):
        z = zeta()
        psi = coherent_state(self.xi, DString((0,), 2), DString((1,), 2))
        assert_allclose(psi.amplitudes, np.array([z, 1.0]) / math.sqrt(1 + abs(z) ** 2), atol=1e-12)

    def test_product_structure(self):
        xi3 = FiducialState.builtin(3, 2)
        joint = coherent_state(xi3, DString((1, 2), 3), DString((0, 1), 3))
        first = coherent_state(FiducialState.builtin(3), DString((1,), 3), DString((0,), 3))
        second = coherent_state(FiducialState.builtin(3), DString((2,), 3), DString((1,), 3))
        assert_allclose(joint.amplitudes, np.kron(first.amplitudes, second.amplitudes), atol=1e-12)


class MatrixElementTests(SimpleTestCase):
    def test_origin_is_one(self):
        xi = FiducialState.builtin(3, 2)
        self.assertAlmostEqual(fiducial_matrix_element(xi, DString.zero(3, 2), DString.zero(3, 2)), 1.0)

    def test_qubit_z_expectation(self):
        value = fiducial_matrix_element(FiducialState.builtin(2), DString((1,), 2), DString((0,), 2))
        self.assertAlmostEqual(value.real, 1 / math.sqrt(3), places=12)
        self.assertAlmostEqual(value.imag, 0.0, places=12)

    def test_qutrit_moduli_follow_sic(self):
        xi = FiducialState.builtin(3)
        for g in range(3):
            for dl in range(3):
                if (g, dl) == (0, 0):
                    continue
                value = fiducial_matrix_element(xi, DString((g,), 3), DString((dl,), 3))
                self.assertAlmostEqual(abs(value) ** 2, 0.25, places=10)


class FiducialConfigTests(SimpleTestCase):
    def test_config_round_trip(self):
        c = builtin_coefficients(3)
        config = {"d": 3, "coefficients": [[x.real, x.imag] for x in c]}
        fid = fiducial_from_config(config, N=2)
        self.assertEqual(fid.N, 2)
        assert_allclose(fid.single(1), c, atol=1e-12)

    def test_load_from_file(self):
        c = builtin_coefficients(2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "fid.json"
            path.write_text(json.dumps({"d": 2, "coefficients": [[x.real, x.imag] for x in c]}))
            fid = load_fiducial(path)
        self.assertEqual(fid.fingerprint, FiducialState.builtin(2).fingerprint)

    def test_malformed_config(self):
        with self.assertRaises(DomainError):
            fiducial_from_config({"coefficients": [[1, 0]]})
        with self.assertRaises(DomainError):
            fiducial_from_config({"d": 2, "coefficients": [1, 0, 0]})

    def test_unnormalized(self):
        with self.assertRaises(DomainError):
            FiducialState(np.array([1.0, 1.0]), 2)

    def test_particle_count_mismatch(self):
        config = {"d": 2, "coefficients": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
        with self.assertRaises(DimensionError):
            fiducial_from_config(config, N=3)

    def test_heterogeneous_cannot_be_replicated(self):
        fid = FiducialState(np.array([[1.0, 0.0], [0.0, 1.0]]), 2)
        self.assertFalse(fid.is_homogeneous)
        with self.assertRaises(DomainError):
            fid.replicate(4)
