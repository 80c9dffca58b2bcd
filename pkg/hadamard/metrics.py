import logging
from fractions import Fraction

import pandas as pd

from . import abp as abp_mod
from . import cfg as cfg_mod
from . import circuit as circuit_mod
from .lblab import sum_coeffs
from .poly import norm_sq
from .scalar import RationalField

logger = logging.getLogger(__name__)


def abp_metrics(program):
    return {
        "nvars": program.n_vars,
        "field": program.field.descriptor(),
        "depth": program.depth,
        "layers": list(program.layer_sizes),
        "nodes": abp_mod.nodes(program),
        "edges": abp_mod.edge_count(program),
        "homogeneous": abp_mod.is_homogeneous(program),
        "degree": abp_mod.degree(program),
    }


def circuit_metrics(circuit):
    gates, wires = circuit_mod.size(circuit)
    metrics = {
        "nvars": circuit.n_vars,
        "field": circuit.field.descriptor(),
        "gates": gates,
        "wires": wires,
        "degree": circuit_mod.formal_degree(circuit),
    }
    if isinstance(circuit.field, RationalField):
        metrics["monotone"] = circuit_mod.is_monotone(circuit)
    return metrics


def hadamard_abp_metrics(build, left, right):
    """Size accounting of a Hadamard ABP product.

    Every per-degree product must have exactly s1 * s2 nodes on each layer.
    ``size_bound`` is nodes(left) * nodes(right) + d + 2, checked before
    pruning; it holds whenever both inputs are homogeneous. Mixed-degree
    inputs are also checked against ``parts_bound``, the same count taken
    over the homogeneous parts that were actually multiplied.
    """
    parts = []
    parts_bound = 0
    for part in build.parts:
        expected = [s1 * s2 for s1, s2 in zip(part.left.layer_sizes, part.right.layer_sizes)]
        parts.append({
            "degree": part.degree,
            "left_layers": list(part.left.layer_sizes),
            "right_layers": list(part.right.layer_sizes),
            "product_layers": list(part.product.layer_sizes),
            "layers_match": list(part.product.layer_sizes) == expected,
        })
        parts_bound += abp_mod.nodes(part.left) * abp_mod.nodes(part.right)
    top = max((part.degree for part in build.parts), default=0)
    left_nodes, right_nodes = abp_mod.nodes(left), abp_mod.nodes(right)
    bound = left_nodes * right_nodes + top + 2
    parts_bound += top + 2
    before, after = abp_mod.nodes(build.unpruned), abp_mod.nodes(build.result)
    return {
        "left_nodes": left_nodes,
        "right_nodes": right_nodes,
        "parts": parts,
        "nodes_before_pruning": before,
        "nodes_after_pruning": after,
        "size_bound": bound,
        "within_bound": before <= bound,
        "parts_bound": parts_bound,
        "within_parts_bound": before <= parts_bound,
    }


def circuit_product_metrics(build, circuit, program):
    gates, wires = circuit_mod.size(build.circuit)
    return {
        "circuit_gates": len(circuit.gates),
        "program_nodes": abp_mod.nodes(program),
        "parts": [{"degree": k, "layers": list(part.layer_sizes)} for k, part in build.parts],
        "slices": len(build.gate_map),
        "gates": gates,
        "wires": wires,
    }


def grammar_metrics(grammar, circuit=None):
    metrics = {
        "size": cfg_mod.size(grammar),
        "nonterminals": len(grammar.nonterminals),
        "terminals": grammar.n_terminals,
        "productions": len(grammar.productions),
    }
    if circuit is not None:
        gates, wires = circuit_mod.size(circuit)
        metrics["circuit_size"] = gates + wires
        metrics["ratio"] = Fraction(metrics["size"], gates + wires)
    return metrics


def nisan_metrics(poly, ranks):
    return {
        "degree": poly.degree,
        "ranks": [{"k": k, "rank": r} for k, r in enumerate(ranks)],
        "complexity": sum(ranks),
    }


def build_f_report(params, F, F_prime, corr_prime):
    n = params.n
    total = sum_coeffs(F)
    return {
        "t": params.t,
        "p": params.p,
        "n": n,
        "monomials": len(F),
        "sum_coeffs": total,
        "sum_coeffs_prime": sum_coeffs(F_prime),
        "norm_sq": norm_sq(F),
        "corr_F_F_prime": corr_prime,
        "corr_floor": 2 ** (n - 1),
        "nonnegative_sum": total >= 0,
    }


def battery_table(rows):
    """Battery rows as records, largest normalized correlation first, plus a summary."""
    if not rows:
        return {"rows": [], "trials": 0, "max_ratio": Fraction(0), "zero_corr": 0}
    df = pd.DataFrame(rows)
    df = df.sort_values(by=["ratio", "trial"], ascending=[False, True], kind="mergesort")
    summary = {
        "rows": df.to_dict(orient="records"),
        "trials": len(df),
        "max_ratio": max(df["ratio"]),
        "zero_corr": int((df["corr"] == 0).sum()),
    }
    logger.info("battery of %d trials, max ratio %s", summary["trials"], summary["max_ratio"])
    return summary


def exp_sum_table(rows):
    if not rows:
        return {"rows": [], "samples": 0, "max_ratio": Fraction(0)}
    df = pd.DataFrame(rows).sort_values(by="sample", kind="mergesort")
    return {"rows": df.to_dict(orient="records"), "samples": len(df), "max_ratio": max(df["ratio"])}
