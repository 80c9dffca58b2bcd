import unittest

from hadamard import circuit as circ
from hadamard.circuit import Add, Circuit, CircuitBuilder, Const, Input, Mul
from hadamard.errors import InputError, ResourceCapError
from hadamard.poly import NCPoly
from hadamard.scalar import RATIONALS, PrimeField

from tests.helpers import random_circuit, rng_for

Q = RATIONALS


def commutator():
    """x0 x1 - x1 x0."""
    gates = (Input(0), Input(1), Mul(0, 1), Mul(1, 0), Const(Q(-1)), Mul(4, 3), Add(2, 5))
    return Circuit(2, Q, gates, 6)


class ValidationTests(unittest.TestCase):
    def test_valid(self):
        self.assertIsNone(circ.validate(commutator()))

    def test_forward_reference(self):
        bad = Circuit(1, Q, (Input(0), Add(0, 2), Input(0)), 1)
        self.assertEqual(circ.validate(bad).location, "gate 1")
        with self.assertRaises(InputError):
            circ.check_circuit(bad)

    def test_input_out_of_range(self):
        self.assertIsNotNone(circ.validate(Circuit(1, Q, (Input(1),), 0)))

    def test_missing_output(self):
        self.assertEqual(circ.validate(Circuit(1, Q, (Input(0),), 3)).location, "output")

    def test_empty(self):
        self.assertIsNotNone(circ.validate(Circuit(1, Q, (), 0)))


class ExpansionTests(unittest.TestCase):
    def test_commutator_is_not_zero(self):
        f = circ.expand(commutator())
        self.assertEqual(f, NCPoly(2, Q, {(0, 1): 1, (1, 0): -1}))
        self.assertEqual(circ.evaluate(commutator(), [3, 5]), 0)

    def test_degrees(self):
        self.assertEqual(circ.gate_degrees(commutator()), [1, 1, 2, 2, 0, 2, 2])
        self.assertEqual(circ.formal_degree(commutator()), 2)

    def test_degree_cap(self):
        with self.assertRaises(ResourceCapError):
            circ.expand(commutator(), degree_cap=1)

    def test_term_cap(self):
        gates = [Input(0), Input(1), Add(0, 1)]
        for _ in range(4):
            gates.append(Mul(len(gates) - 1, len(gates) - 1))
        square = Circuit(2, Q, tuple(gates), len(gates) - 1)
        with self.assertRaises(ResourceCapError):
            circ.expand(square, degree_cap=20, max_terms=100)

    def test_evaluate_matches_expand(self):
        rng = rng_for(31)
        for field in (Q, PrimeField(7)):
            for _ in range(40):
                c = random_circuit(rng, 2, 9, 4, field)
                point = [rng.randint(-3, 3) for _ in range(2)]
                self.assertEqual(circ.evaluate(c, point), circ.expand(c).evaluate(point))

    def test_arity(self):
        with self.assertRaises(InputError):
            circ.evaluate(commutator(), [1])


class MonotoneTests(unittest.TestCase):
    def test_commutator_not_monotone(self):
        self.assertFalse(circ.is_monotone(commutator()))
        self.assertEqual(circ.coefficient_signs(commutator()), {1, -1})

    def test_monotone_has_positive_coefficients(self):
        rng = rng_for(32)
        for _ in range(30):
            c = random_circuit(rng, 2, 8, 3, monotone=True)
            self.assertTrue(circ.is_monotone(c))
            self.assertLessEqual(circ.coefficient_signs(c), {1})

    def test_needs_rationals(self):
        f5 = PrimeField(5)
        with self.assertRaises(InputError):
            circ.is_monotone(Circuit(1, f5, (Const(f5(1)),), 0))

    def test_size(self):
        self.assertEqual(circ.size(commutator()), (7, 8))


class RewriteTests(unittest.TestCase):
    def test_builder_reuses_gates(self):
        b = CircuitBuilder(2, Q)
        x0, x1 = b.input(0), b.input(1)
        self.assertEqual(b.input(0), x0)
        p = b.mul(x0, x1)
        self.assertEqual(b.mul(x0, x1), p)
        self.assertEqual(len(b.gates), 3)
        self.assertIsNone(b.sum_of([]))
        self.assertIsNone(b.product_of([]))

    def test_builder_empty_output(self):
        c = CircuitBuilder(1, Q).build(None)
        self.assertTrue(circ.expand(c).is_zero())

    def test_builder_folds(self):
        b = CircuitBuilder(3, Q)
        xs = [b.input(v) for v in range(3)]
        c = b.build(b.product_of(xs))
        self.assertEqual(circ.expand(c), NCPoly(3, Q, {(0, 1, 2): 1}))

    def test_compact_drops_unused(self):
        c = Circuit(2, Q, (Input(0), Input(1), Mul(1, 1), Add(0, 0)), 3)
        small = circ.compact(c)
        self.assertEqual(len(small), 2)
        self.assertEqual(circ.expand(small), circ.expand(c))

    def test_zero_propagation(self):
        gates = (Input(0), Const(Q(0)), Mul(0, 1), Input(1), Add(2, 3))
        c = circ.propagate_zeros(Circuit(2, Q, gates, 4))
        self.assertFalse(any(isinstance(g, Const) for g in c.gates))
        self.assertEqual(circ.expand(c), NCPoly.variable(2, 1))

    def test_syntactic_zero(self):
        c = circ.propagate_zeros(Circuit(1, Q, (Input(0), Const(Q(0)), Mul(0, 1)), 2))
        self.assertEqual(c.gates, (Const(Q.zero),))

    def test_random_propagation_keeps_polynomial(self):
        rng = rng_for(33)
        for _ in range(40):
            c = random_circuit(rng, 2, 10, 4)
            self.assertEqual(circ.expand(circ.propagate_zeros(c)), circ.expand(c))


if __name__ == "__main__":
    unittest.main()
