import unittest

from hadamard import abp as abp_mod
from hadamard import circuit as circ
from hadamard import products
from hadamard.abp import LinearForm
from hadamard.circuit import Add, Circuit, Const, Input, Mul
from hadamard.errors import FieldMismatchError, InputError
from hadamard.poly import NCPoly, hadamard
from hadamard.scalar import RATIONALS, PrimeField

from tests.helpers import random_abp, random_circuit, rng_for

Q = RATIONALS
x = LinearForm.var


class LayerProductTests(unittest.TestCase):
    def test_layer_sizes_multiply(self):
        rng = rng_for(41)
        left = abp_mod.normalize_edges(random_abp(rng, 2, 3, 3, homogeneous=True))
        right = abp_mod.normalize_edges(random_abp(rng, 2, 3, 2, homogeneous=True))
        product = products.product_abp(left, right)
        self.assertEqual(product.layer_sizes,
                         tuple(a * b for a, b in zip(left.layer_sizes, right.layer_sizes)))
        self.assertEqual(abp_mod.expand(product), hadamard(abp_mod.expand(left), abp_mod.expand(right)))

    def test_depths_must_match(self):
        with self.assertRaises(InputError):
            products.product_abp(abp_mod.chain(1, [x(Q, 0)], Q), abp_mod.chain(1, [x(Q, 0), x(Q, 0)], Q))


class HadamardAbpTests(unittest.TestCase):
    def test_square_of_sum(self):
        s = LinearForm.make(Q, 0, {0: 1, 1: 1})
        left = abp_mod.chain(2, [s, s], Q)
        right = abp_mod.chain(2, [x(Q, 0, 2), x(Q, 1, 3)], Q)
        self.assertEqual(abp_mod.expand(products.hadamard_abp(left, right)), NCPoly(2, Q, {(0, 1): 6}))

    def test_disjoint_degrees_give_zero(self):
        left = abp_mod.chain(1, [x(Q, 0)], Q)
        right = abp_mod.chain(1, [x(Q, 0), x(Q, 0)], Q)
        self.assertTrue(abp_mod.expand(products.hadamard_abp(left, right)).is_zero())

    def test_random_pairs(self):
        rng = rng_for(42)
        for field in (Q, PrimeField(5)):
            for _ in range(100):
                n = rng.randint(1, 3)
                left = random_abp(rng, n, rng.randint(1, 4), 3, field)
                right = random_abp(rng, n, rng.randint(1, 4), 3, field)
                build = products.build_hadamard_abp(left, right)
                for part in build.parts:
                    self.assertEqual(part.product.layer_sizes,
                                     tuple(a * b for a, b in zip(part.left.layer_sizes, part.right.layer_sizes)))
                expected = hadamard(abp_mod.expand(left), abp_mod.expand(right))
                self.assertEqual(abp_mod.expand(build.result), expected)

    def test_intermediate_nodes_compute_products(self):
        rng = rng_for(47)
        for field in (Q, PrimeField(5)):
            for _ in range(10):
                left = random_abp(rng, 2, 4, 3, field)
                right = random_abp(rng, 2, 4, 3, field)
                for part in products.build_hadamard_abp(left, right).parts:
                    for i in range(1, part.product.depth):
                        s2 = part.right.layer_sizes[i]
                        for a in range(part.left.layer_sizes[i]):
                            for b in range(s2):
                                f = abp_mod.expand(abp_mod.sub_program(part.left, (0, 0), (i, a)))
                                g = abp_mod.expand(abp_mod.sub_program(part.right, (0, 0), (i, b)))
                                h = abp_mod.expand(abp_mod.sub_program(part.product, (0, 0), (i, a * s2 + b)))
                                self.assertEqual(h, hadamard(f, g))

    def test_normalized_pipeline_agrees(self):
        rng = rng_for(48)
        for _ in range(20):
            left = random_abp(rng, 2, rng.randint(1, 3), 3)
            right = random_abp(rng, 2, rng.randint(1, 3), 3)
            self.assertEqual(abp_mod.expand(products.hadamard_abp(left, right, normalize=True)),
                             abp_mod.expand(products.hadamard_abp(left, right)))

    def test_parts_have_product_widths(self):
        rng = rng_for(43)
        left = random_abp(rng, 2, 3, 3)
        right = random_abp(rng, 2, 3, 3)
        build = products.build_hadamard_abp(left, right)
        for part in build.parts:
            self.assertEqual(part.product.layer_sizes,
                             tuple(a * b for a, b in zip(part.left.layer_sizes, part.right.layer_sizes)))
        self.assertLessEqual(abp_mod.nodes(build.result), abp_mod.nodes(build.unpruned))

    def test_threads_do_not_change_result(self):
        rng = rng_for(44)
        left = random_abp(rng, 2, 4, 3)
        right = random_abp(rng, 2, 4, 3)
        self.assertEqual(products.hadamard_abp(left, right, threads=1),
                         products.hadamard_abp(left, right, threads=4))

    def test_mismatches(self):
        with self.assertRaises(InputError):
            products.hadamard_abp(abp_mod.chain(1, [x(Q, 0)], Q), abp_mod.chain(2, [x(Q, 0)], Q))
        f5 = PrimeField(5)
        with self.assertRaises(FieldMismatchError):
            products.hadamard_abp(abp_mod.chain(1, [x(Q, 0)], Q), abp_mod.chain(1, [x(f5, 0)], f5))


class CircuitAbpTests(unittest.TestCase):
    def test_commutator_against_single_word(self):
        gates = (Input(0), Input(1), Mul(0, 1), Mul(1, 0), Const(Q(-1)), Mul(4, 3), Add(2, 5))
        commutator = Circuit(2, Q, gates, 6)
        word = abp_mod.chain(2, [x(Q, 1), x(Q, 0, 5)], Q)
        result = products.hadamard_circuit_abp(commutator, word)
        self.assertEqual(circ.expand(result), NCPoly(2, Q, {(1, 0): -5}))

    def test_constant_parts(self):
        c = Circuit(1, Q, (Input(0), Const(Q(2)), Add(0, 1)), 2)
        program = abp_mod.chain(1, [x(Q, 0) + LinearForm.const(Q, 3)], Q)
        result = products.hadamard_circuit_abp(c, program)
        self.assertEqual(circ.expand(result), NCPoly(1, Q, {(): 6, (0,): 1}))

    def test_random_pairs(self):
        rng = rng_for(45)
        for field in (Q, PrimeField(5)):
            for _ in range(50):
                c = random_circuit(rng, 2, 9, 3, field)
                program = random_abp(rng, 2, rng.randint(1, 3), 2, field)
                expected = hadamard(circ.expand(c), abp_mod.expand(program))
                self.assertEqual(circ.expand(products.hadamard_circuit_abp(c, program)), expected)

    def test_gate_map_points_at_slices(self):
        rng = rng_for(46)
        c = random_circuit(rng, 2, 8, 3)
        program = random_abp(rng, 2, 2, 2, homogeneous=True)
        build = products.build_hadamard_circuit_abp(c, program)
        gate_polys = circ.expand_gates(build.circuit)
        full = circ.expand_gates(c, degree_cap=20)
        for key, gate_id in build.gate_map.items():
            if key.slice == 0:
                continue
            part = dict(build.parts)[key.part]
            sub = abp_mod.sub_program(part, key.start, key.end)
            expected = hadamard(full[key.gate].homogeneous_part(key.slice) if full[key.gate] is not None
                                else NCPoly.zero(2), abp_mod.expand(sub))
            if gate_polys[gate_id] is not None:
                self.assertEqual(gate_polys[gate_id], expected)

    def test_mismatches(self):
        c = Circuit(1, Q, (Input(0),), 0)
        with self.assertRaises(InputError):
            products.hadamard_circuit_abp(c, abp_mod.chain(2, [x(Q, 0)], Q))


if __name__ == "__main__":
    unittest.main()
