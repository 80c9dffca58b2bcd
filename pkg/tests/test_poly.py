import unittest
from fractions import Fraction

from hadamard.errors import FieldMismatchError, InputError, ResourceCapError
from hadamard.poly import CPoly, NCPoly, corr, hadamard, multilinear_monomial, norm_sq, support_of
from hadamard.scalar import RATIONALS, PrimeField

from tests.helpers import random_ncpoly, rng_for


def nc(terms, n=2, field=RATIONALS):
    return NCPoly(n, field, terms)


class NCPolyTests(unittest.TestCase):
    def test_variables_do_not_commute(self):
        x0, x1 = NCPoly.variable(2, 0), NCPoly.variable(2, 1)
        self.assertEqual((x0 * x1).monomials(), [(0, 1)])
        self.assertNotEqual(x0 * x1, x1 * x0)

    def test_zero_terms_are_dropped(self):
        f = nc({(0,): 1}) + nc({(0,): -1})
        self.assertTrue(f.is_zero())
        self.assertEqual(len(f), 0)
        self.assertEqual(f.degree, -1)

    def test_canonical_order(self):
        f = nc({(1, 0): 1, (0,): 2, (): 3, (0, 1): 4})
        self.assertEqual(f.monomials(), [(), (0,), (0, 1), (1, 0)])

    def test_homogeneous_parts(self):
        f = nc({(1, 0): 1, (0,): 2, (): 3})
        self.assertFalse(f.is_homogeneous())
        self.assertEqual(sorted(f.homogeneous_parts()), [0, 1, 2])
        self.assertEqual(f.homogeneous_part(2), nc({(1, 0): 1}))

    def test_evaluate_respects_order(self):
        f = nc({(0, 1): 1, (1, 0): -1})
        self.assertEqual(f.evaluate([2, 3]), 0)
        self.assertEqual(nc({(0, 1): 2, (): 1}).evaluate([Fraction(1, 2), 3]), 4)

    def test_bad_variable(self):
        with self.assertRaises(InputError):
            nc({(2,): 1})

    def test_field_mismatch(self):
        with self.assertRaises(FieldMismatchError):
            nc({(0,): 1}) + nc({(0,): 1}, field=PrimeField(5))

    def test_multiply_cap(self):
        s = nc({(0,): 1, (1,): 1})
        self.assertEqual(len(s.multiply(s)), 4)
        with self.assertRaises(ResourceCapError):
            s.multiply(s, max_terms=3)

    def test_power(self):
        s = nc({(0,): 1, (1,): 1})
        self.assertEqual(len(s ** 3), 8)
        self.assertEqual(s ** 0, NCPoly.constant(2, 1))


class HadamardTests(unittest.TestCase):
    def test_coefficientwise_product(self):
        f = nc({(0, 1): 2, (1, 0): 3, (): 1})
        g = nc({(0, 1): 5, (1, 1): -1, (): 4})
        self.assertEqual(hadamard(f, g), nc({(0, 1): 10, (): 4}))

    def test_support_and_commutativity(self):
        rng = rng_for(7)
        for _ in range(20):
            f = random_ncpoly(rng, homogeneous=False)
            g = random_ncpoly(rng, homogeneous=False)
            h = hadamard(f, g)
            self.assertEqual(h, hadamard(g, f))
            self.assertLessEqual(h.mon_set(), f.mon_set() & g.mon_set())

    def test_over_prime_field(self):
        f5 = PrimeField(5)
        f = nc({(0,): 2, (1,): 3}, field=f5)
        g = nc({(0,): 3, (1,): 1}, field=f5)
        self.assertEqual(hadamard(f, g), nc({(0,): 1, (1,): 3}, field=f5))


class CPolyTests(unittest.TestCase):
    def test_variables_commute(self):
        x0, x1 = CPoly.variable(2, 0), CPoly.variable(2, 1)
        self.assertEqual(x0 * x1, x1 * x0)
        self.assertEqual((x0 * x0).monomials(), [(2, 0)])
        self.assertFalse((x0 * x0).is_multilinear())

    def test_multilinear_helpers(self):
        self.assertEqual(multilinear_monomial(4, [3, 0]), (1, 0, 0, 1))
        self.assertEqual(support_of((1, 0, 0, 1)), (0, 3))
        with self.assertRaises(InputError):
            multilinear_monomial(2, [5])

    def test_exponent_length_checked(self):
        with self.assertRaises(InputError):
            CPoly(2, RATIONALS, {(1,): 1})

    def test_correlation(self):
        x0, x1 = CPoly.variable(2, 0), CPoly.variable(2, 1)
        self.assertEqual(corr(x0 - x1, x0 + x1), 0)
        self.assertEqual(corr(x0 - x1, x0), 1)
        self.assertEqual(norm_sq(x0 - x1), 2)

    def test_correlation_needs_rationals(self):
        f5 = PrimeField(5)
        with self.assertRaises(InputError):
            corr(CPoly.variable(1, 0, f5), CPoly.variable(1, 0, f5))


if __name__ == "__main__":
    unittest.main()
