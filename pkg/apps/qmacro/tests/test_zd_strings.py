import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_array_equal

from apps.qmacro.BLL.Core.zd_strings import (
    DString, WeightVector, add, distinct_weight_rows, ensure_capacity, enumerate_strings,
    label_names, mod_inverse, scale, weight, weight_rows_for_alpha, weight_vector,
)
from backend.exceptions import CapacityError, DimensionError, DomainError, NoInverseError


def s(digits, d):
    return DString(tuple(digits), d)


class DStringArithmeticTests(SimpleTestCase):
    def test_add_is_digitwise_mod_d(self):
        self.assertEqual(add(s((1, 2), 3), s((2, 2), 3)), s((0, 1), 3))
        self.assertEqual(add(s((1, 1), 2), s((1, 1), 2)), s((0, 0), 2))

    def test_zero_is_additive_identity(self):
        beta = s((2, 0, 1), 3)
        self.assertEqual(DString.zero(3, 3) + beta, beta)

    def test_negation_inverts_addition(self):
        alpha = s((1, 2, 0), 3)
        self.assertEqual(alpha + (-alpha), DString.zero(3, 3))

    def test_scale(self):
        self.assertEqual(scale(2, s((1, 2), 3)), s((2, 1), 3))
        self.assertEqual(scale(1, s((1, 2), 3)), s((1, 2), 3))
        self.assertEqual(scale(0, s((1, 2), 3)), DString.zero(3, 2))

    def test_weight_is_plain_digit_sum(self):
        self.assertEqual(weight(s((1, 0, 2), 3)), 3)
        self.assertEqual(weight(DString.zero(3, 4)), 0)
        self.assertEqual(weight(s((2, 2, 2, 2), 3)), 8)

    def test_mismatched_lengths_raise(self):
        with self.assertRaises(DimensionError):
            add(s((1, 0), 3), s((1,), 3))

    def test_digit_out_of_range_raises(self):
        with self.assertRaises(DomainError):
            s((3,), 3)

    def test_non_prime_dimension_raises(self):
        with self.assertRaises(DomainError):
            s((0, 1), 4)


class ModInverseTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(mod_inverse(2, 5), 3)
        self.assertEqual(mod_inverse(1, 7), 1)
        self.assertEqual(mod_inverse(2, 3), 2)

    def test_zero_has_no_inverse(self):
        with self.assertRaises(NoInverseError):
            mod_inverse(0, 5)
        with self.assertRaises(NoInverseError):
            mod_inverse(10, 5)


class WeightVectorTests(SimpleTestCase):
    def test_qubit_pair(self):
        m = weight_vector(s((0, 1), 2), s((1, 0), 2))
        self.assertEqual(m.entries, (1, 1, 2))
        self.assertEqual(m.as_dict(), {"m01": 1, "m10": 1, "m11": 2})

    def test_zero_pair(self):
        self.assertEqual(weight_vector(DString.zero(3, 2), DString.zero(3, 2)), WeightVector.zero(3, 2))

    def test_single_qutrit(self):
        m = weight_vector(s((1,), 3), s((0,), 3))
        self.assertEqual(m.entries, (0, 0, 1, 1, 1, 2, 2, 2))
        self.assertEqual(m[(1, 0)], 1)
        self.assertEqual(m[(2, 2)], 2)

    def test_label_names_are_lexicographic(self):
        self.assertEqual(label_names(2), ["m01", "m10", "m11"])
        self.assertEqual(label_names(3)[:3], ["m01", "m02", "m10"])

    def test_wrong_length_raises(self):
        with self.assertRaises(DimensionError):
            WeightVector((0, 1), 2, 1)

    def test_entry_above_maximum_raises(self):
        with self.assertRaises(DomainError):
            WeightVector((0, 0, 3), 2, 2)

    def test_distinct_rows_sort_like_vectors(self):
        alpha = np.array([1, 0])
        unique, first, counts, inverse = distinct_weight_rows(alpha, 5, 2)
        keys = [WeightVector(tuple(row), 5, 2) for row in unique.tolist()]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual(int(counts.sum()), 25)
        for pos, b_idx in enumerate(first.tolist()):
            beta = DString.from_index(b_idx, 5, 2)
            self.assertEqual(weight_vector(DString((1, 0), 5), beta), keys[pos])
        assert_array_equal(unique[inverse], weight_rows_for_alpha(alpha, 5, 2))


class EnumerationTests(SimpleTestCase):
    def test_order_last_digit_fastest(self):
        self.assertEqual([x.digits for x in enumerate_strings(2, 1)], [(0,), (1,)])
        self.assertEqual([x.digits for x in enumerate_strings(2, 2)], [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_count_and_index(self):
        strings = list(enumerate_strings(3, 2))
        self.assertEqual(len(strings), 9)
        self.assertEqual([x.index for x in strings], list(range(9)))
        self.assertEqual(DString.from_index(5, 3, 2), s((1, 2), 3))

    @override_settings(QMACRO_MAX_DIM=8)
    def test_capacity_guard(self):
        ensure_capacity(2, 3)
        with self.assertRaises(CapacityError):
            ensure_capacity(2, 4)
        with self.assertRaises(CapacityError):
            list(enumerate_strings(3, 2))
