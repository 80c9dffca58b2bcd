import unittest
from fractions import Fraction

from hadamard import abp as abp_mod
from hadamard import cfg, lblab, metrics, products
from hadamard.abp import LinearForm
from hadamard.circuit import Circuit, Const, Input, Mul
from hadamard.lblab import ExplicitParams
from hadamard.poly import NCPoly
from hadamard.scalar import RATIONALS, PrimeField

from tests.helpers import random_abp, random_circuit, rng_for

Q = RATIONALS


class ProgramMetricsTests(unittest.TestCase):
    def test_abp(self):
        program = abp_mod.chain(2, [LinearForm.var(Q, 0), LinearForm.var(Q, 1)], Q)
        m = metrics.abp_metrics(program)
        self.assertEqual(m["layers"], [1, 1, 1])
        self.assertEqual(m["nodes"], 3)
        self.assertEqual(m["edges"], 2)
        self.assertTrue(m["homogeneous"])
        self.assertEqual(m["field"], {"kind": "Q"})

    def test_circuit(self):
        c = Circuit(1, Q, (Input(0), Const(Q(2)), Mul(0, 1)), 2)
        m = metrics.circuit_metrics(c)
        self.assertEqual((m["gates"], m["wires"], m["degree"]), (3, 2, 1))
        self.assertTrue(m["monotone"])
        f5 = PrimeField(5)
        self.assertNotIn("monotone", metrics.circuit_metrics(Circuit(1, f5, (Input(0),), 0)))


class ProductMetricsTests(unittest.TestCase):
    def test_hadamard_abp_within_bound(self):
        rng = rng_for(91)
        for _ in range(15):
            homogeneous = rng.random() < 0.5
            left = random_abp(rng, 2, rng.randint(1, 3), 3, homogeneous=homogeneous)
            right = random_abp(rng, 2, rng.randint(1, 3), 3, homogeneous=homogeneous)
            build = products.build_hadamard_abp(left, right)
            report = metrics.hadamard_abp_metrics(build, left, right)
            self.assertTrue(all(part["layers_match"] for part in report["parts"]))
            self.assertTrue(report["within_parts_bound"])
            if homogeneous:
                self.assertTrue(report["within_bound"])
            self.assertLessEqual(report["nodes_after_pruning"], report["nodes_before_pruning"])

    def test_size_bound_uses_input_nodes(self):
        program = abp_mod.chain(2, [LinearForm.make(Q, 0, {0: 1, 1: 1})] * 3, Q)
        build = products.build_hadamard_abp(program, program)
        report = metrics.hadamard_abp_metrics(build, program, program)
        self.assertEqual(report["size_bound"], 4 * 4 + 3 + 2)
        self.assertEqual(report["nodes_before_pruning"], 4)
        self.assertTrue(report["within_bound"])
        normalized = products.build_hadamard_abp(program, program, normalize=True)
        self.assertEqual(abp_mod.expand(normalized.result), abp_mod.expand(build.result))
        self.assertEqual(abp_mod.nodes(normalized.unpruned), 22)

    def test_circuit_product(self):
        rng = rng_for(92)
        c = random_circuit(rng, 2, 8, 3)
        program = random_abp(rng, 2, 2, 2)
        build = products.build_hadamard_circuit_abp(c, program)
        report = metrics.circuit_product_metrics(build, c, program)
        self.assertEqual(report["gates"], len(build.circuit.gates))
        self.assertEqual(report["slices"], len(build.gate_map))


class GrammarMetricsTests(unittest.TestCase):
    def test_ratio(self):
        grammar = cfg.build_L1_grammar(2)
        c = cfg.cfg_to_circuit(grammar)
        report = metrics.grammar_metrics(grammar, c)
        self.assertEqual(report["size"], cfg.size(grammar))
        self.assertEqual(report["ratio"], Fraction(report["size"], report["circuit_size"]))
        self.assertNotIn("ratio", metrics.grammar_metrics(grammar))


class NisanMetricsTests(unittest.TestCase):
    def test_complexity(self):
        f = NCPoly(2, Q, {(0, 1): 1, (1, 0): 1})
        report = metrics.nisan_metrics(f, abp_mod.nisan_ranks(f))
        self.assertEqual(report["complexity"], 4)
        self.assertEqual(report["ranks"][1], {"k": 1, "rank": 2})


class LabTableTests(unittest.TestCase):
    def test_build_f_report(self):
        params = ExplicitParams(2, 2)
        F = lblab.build_F(params)
        F_prime = lblab.build_F_prime(params, F)
        corr_prime, _ = lblab.corr_F_vs(F_prime, params, F)
        report = metrics.build_f_report(params, F, F_prime, corr_prime)
        self.assertEqual(report["monomials"], 16)
        self.assertEqual(report["sum_coeffs"], 4)
        self.assertEqual(report["sum_coeffs_prime"], 10)
        self.assertEqual(report["corr_F_F_prime"], 10)
        self.assertEqual(report["corr_floor"], 8)
        self.assertTrue(report["nonnegative_sum"])

    def test_battery_order(self):
        rows = [
            {"trial": 0, "A1": 2, "A2": 2, "terms": 3, "corr": 1, "ratio": Fraction(1, 9)},
            {"trial": 1, "A1": 2, "A2": 2, "terms": 3, "corr": 0, "ratio": Fraction(0)},
            {"trial": 2, "A1": 2, "A2": 2, "terms": 3, "corr": 2, "ratio": Fraction(1, 3)},
            {"trial": 3, "A1": 2, "A2": 2, "terms": 3, "corr": 1, "ratio": Fraction(1, 9)},
        ]
        table = metrics.battery_table(rows)
        self.assertEqual([r["trial"] for r in table["rows"]], [2, 0, 3, 1])
        self.assertEqual(table["trials"], 4)
        self.assertEqual(table["max_ratio"], Fraction(1, 3))
        self.assertEqual(table["zero_corr"], 1)

    def test_empty_tables(self):
        self.assertEqual(metrics.battery_table([])["trials"], 0)
        self.assertEqual(metrics.exp_sum_table([])["samples"], 0)

    def test_exp_sum_table(self):
        rows = lblab.exp_sum_samples(2, 2, 4, seed=1)
        table = metrics.exp_sum_table(rows)
        self.assertEqual(table["samples"], 4)
        self.assertEqual([r["sample"] for r in table["rows"]], [0, 1, 2, 3])
        self.assertEqual(table["max_ratio"], max(r["ratio"] for r in rows))


if __name__ == "__main__":
    unittest.main()
