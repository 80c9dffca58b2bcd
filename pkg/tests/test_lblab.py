import unittest
from fractions import Fraction

import numpy as np

from hadamard import lblab
from hadamard.errors import InputError, ResourceCapError
from hadamard.lblab import ExplicitParams
from hadamard.poly import CPoly, multilinear_monomial, norm_sq
from hadamard.scalar import RATIONALS, extension_field

from tests.helpers import random_int_matrix, rng_for

SMALL = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)]


def expected_sum(t, p):
    """Sum of the coefficients of F: 2^p times the tuples of t - 1 blocks with an empty block."""
    q = 2 ** p
    return q * (q ** (t - 1) - (q - 1) ** (t - 1))


class ParamsTests(unittest.TestCase):
    def test_bad_params(self):
        with self.assertRaises(InputError):
            ExplicitParams(0, 2)
        with self.assertRaises(InputError):
            ExplicitParams(2, 4)

    def test_blocks(self):
        params = ExplicitParams(3, 2)
        self.assertEqual(params.n, 6)
        self.assertEqual(list(params.block(1)), [2, 3])
        self.assertEqual(params.field.order, 4)


class ExplicitPolynomialTests(unittest.TestCase):
    def test_y_vector(self):
        params = ExplicitParams(2, 2)
        ys = lblab.y_vector((1, 0, 0, 0), params)
        self.assertTrue(ys[0])
        self.assertFalse(ys[1])
        self.assertFalse(any(lblab.y_vector((0, 0, 0, 0), params)))
        with self.assertRaises(InputError):
            lblab.y_vector((1, 0, 0), params)
        with self.assertRaises(InputError):
            lblab.y_vector((2, 0, 0, 0), params)

    def test_empty_monomial_is_plus_one(self):
        for t, p in SMALL:
            params = ExplicitParams(t, p)
            self.assertEqual(lblab.F_coeff((0,) * params.n, params), 1)

    def test_single_block_f4(self):
        F = lblab.build_F(ExplicitParams(1, 2))
        self.assertEqual(len(F), 4)
        self.assertEqual(sorted(F.terms.values()), [-1, -1, 1, 1])

    def test_coefficient_sums(self):
        for t, p in SMALL:
            params = ExplicitParams(t, p)
            F = lblab.build_F(params)
            self.assertEqual(len(F), 2 ** params.n)
            self.assertEqual(norm_sq(F), 2 ** params.n)
            self.assertEqual(lblab.sum_coeffs(F), expected_sum(t, p))
            self.assertGreaterEqual(lblab.count_plus_one(params, F), 2 ** (params.n - 1))

    def test_companion_correlation(self):
        for t, p in SMALL:
            params = ExplicitParams(t, p)
            F = lblab.build_F(params)
            F_prime = lblab.build_F_prime(params, F)
            self.assertEqual(set(F_prime.terms.values()), {1})
            value, ratio = lblab.corr_F_vs(F_prime, params, F)
            self.assertEqual(value, lblab.count_plus_one(params, F))
            self.assertGreaterEqual(value, 2 ** (params.n - 1))
            self.assertLessEqual(ratio, 1)

    def test_threads_do_not_change_F(self):
        params = ExplicitParams(2, 3)
        self.assertEqual(lblab.build_F(params, threads=1), lblab.build_F(params, threads=4))

    def test_cap(self):
        with self.assertRaises(ResourceCapError):
            lblab.build_F(ExplicitParams(2, 3), max_terms=10)

    def test_zero_correlation_ratio(self):
        params = ExplicitParams(1, 2)
        self.assertEqual(lblab.corr_F_vs(CPoly.zero(2), params), (0, 0))

    def test_sum_coeffs_keeps_fractions(self):
        self.assertEqual(lblab.sum_coeffs(CPoly(1, RATIONALS, {(1,): Fraction(1, 2)})), Fraction(1, 2))
        self.assertIsInstance(lblab.sum_coeffs(CPoly(1, RATIONALS, {(1,): 2})), int)


class ExponentialSumTests(unittest.TestCase):
    def setUp(self):
        self.f8 = extension_field(2, 3)
        self.elements = list(self.f8.elements())

    def test_zero_exponent(self):
        sets = [self.elements[:3], self.elements[2:7]]
        self.assertEqual(lblab.exp_sum(sets, self.f8.zero), 15)

    def test_full_set_cancels(self):
        self.assertEqual(lblab.exp_sum([self.elements], self.f8.one), 0)
        self.assertEqual(lblab.exp_sum([self.elements, self.elements[1:]], self.f8.one), 0)

    def test_samples_are_seeded(self):
        rows = lblab.exp_sum_samples(3, 2, 6, seed=5)
        self.assertEqual(rows, lblab.exp_sum_samples(3, 2, 6, seed=5))
        self.assertEqual([r["sample"] for r in rows], list(range(6)))
        for row in rows:
            self.assertEqual(len(row["sizes"]), 2)
            self.assertLessEqual(row["ratio"], 1)

    def test_cap(self):
        with self.assertRaises(ResourceCapError):
            lblab.exp_sum([self.elements] * 3, self.f8.one, max_terms=100)


class RestrictionTests(unittest.TestCase):
    def setUp(self):
        self.params = ExplicitParams(2, 2)

    def test_suitable(self):
        self.assertTrue(lblab.is_suitable_restriction({2, 3}, {0, 1}, {0}, self.params))
        self.assertFalse(lblab.is_suitable_restriction({2, 3}, {0, 1}, set(), self.params))
        self.assertTrue(lblab.is_suitable_restriction({0, 1, 2, 3}, set(), set(), self.params))

    def test_partition_required(self):
        with self.assertRaises(InputError):
            lblab.is_suitable_restriction({1, 2}, {0}, set(), self.params)
        with self.assertRaises(InputError):
            lblab.is_suitable_restriction({2, 3}, {0, 1}, {2}, self.params)

    def test_restrict_F(self):
        restricted = lblab.restrict_F(self.params, {2, 3}, {0})
        self.assertEqual(len(restricted), 4)
        for kept in ([], [2], [3], [2, 3]):
            m = multilinear_monomial(4, kept)
            full = multilinear_monomial(4, kept + [0])
            self.assertEqual(restricted.coefficient(m), lblab.F_coeff(full, self.params))


class ProductPolyTests(unittest.TestCase):
    def setUp(self):
        self.g = CPoly(6, RATIONALS, {multilinear_monomial(6, [0, 1]): 1})
        self.h = CPoly(6, RATIONALS, {multilinear_monomial(6, [3]): 2})

    def test_valid(self):
        f = lblab.make_product_poly({0, 1, 2}, {3, 4, 5}, self.g, self.h, Fraction(1, 3))
        self.assertEqual(f.materialize(), CPoly(6, RATIONALS, {multilinear_monomial(6, [0, 1, 3]): 2}))

    def test_errors(self):
        third = Fraction(1, 3)
        with self.assertRaises(InputError):
            lblab.make_product_poly({0, 1, 3}, {3, 4, 5}, self.g, self.h, third)
        with self.assertRaises(InputError):
            lblab.make_product_poly({0, 1}, {3}, self.g, self.h, Fraction(1, 2))
        with self.assertRaises(InputError):
            lblab.make_product_poly({0, 2}, {3, 4, 5}, self.g, self.h, third)

    def test_random_split(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            f = lblab.random_product_poly(6, rng)
            self.assertGreaterEqual(min(len(f.A), len(f.B)), 2)
            self.assertEqual(f.A | f.B, frozenset(range(6)))

    def test_battery_is_deterministic(self):
        params = ExplicitParams(2, 2)
        rows = lblab.product_battery(params, 5, seed=1, threads=1)
        self.assertEqual(rows, lblab.product_battery(params, 5, seed=1, threads=3))
        self.assertEqual([r["trial"] for r in rows], list(range(5)))
        for row in rows:
            self.assertLessEqual(row["ratio"], 1)


class PermanentTests(unittest.TestCase):
    def test_hadamard_is_permanent(self):
        for n in (1, 2, 3, 4):
            f, g = lblab.permanent_hadamard(n)
            self.assertEqual(f.hadamard(g), lblab.permanent_polynomial(n))

    def test_sizes(self):
        f, g = lblab.permanent_hadamard(3)
        self.assertEqual(len(f), 27)
        self.assertEqual(len(g), 27)
        self.assertEqual(len(lblab.permanent_polynomial(3)), 6)

    def test_ryser(self):
        self.assertEqual(lblab.ryser_permanent([[1, 2], [3, 4]]), 10)
        self.assertEqual(lblab.ryser_permanent([]), 1)
        rng = rng_for(71)
        for _ in range(5):
            rows = random_int_matrix(rng, 3)
            flat = [v for row in rows for v in row]
            self.assertEqual(lblab.permanent_polynomial(3).evaluate(flat), lblab.ryser_permanent(rows))

    def test_caps(self):
        with self.assertRaises(ResourceCapError):
            lblab.permanent_hadamard(6)
        with self.assertRaises(InputError):
            lblab.permanent_hadamard(0)
        with self.assertRaises(InputError):
            lblab.ryser_permanent([[1, 2]])


if __name__ == "__main__":
    unittest.main()
