"""Hadamard products of programs: ABP x ABP and circuit x ABP.

Both constructions split the inputs into homogeneous parts and use
f o g = sum_k f_k o g_k, so every product is taken between programs of a
single degree.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Tuple

from . import abp as abp_mod
from . import circuit as circuit_mod
from . import config
from .abp import ABP
from .circuit import Add, CircuitBuilder, Const, Input, Mul
from .errors import FieldMismatchError, InputError, ResourceCapError

logger = logging.getLogger(__name__)


def _check_pair(left, right):
    if left.n_vars != right.n_vars:
        raise InputError(f"variable counts differ: {left.n_vars} vs {right.n_vars}")
    if left.field != right.field:
        raise FieldMismatchError(f"fields differ: {left.field} vs {right.field}")


def product_abp(left, right):
    """Layer-by-layer product of two homogeneous programs of equal depth.

    Node (i, a, b) gets index a * s2 + b, where s2 is the width of layer i of
    ``right``. The edge (i, a, b) -> (i + 1, c, e) carries the coefficient-wise
    product of the labels of (i, a) -> (i + 1, c) and (i, b) -> (i + 1, e).
    Layer i therefore has exactly s1 * s2 nodes.
    """
    _check_pair(left, right)
    if left.depth != right.depth:
        raise InputError(f"layer-wise product needs equal depths, got {left.depth} and {right.depth}")
    sizes = tuple(s1 * s2 for s1, s2 in zip(left.layer_sizes, right.layer_sizes))
    edges = {}
    for i in range(left.depth):
        s2, s2_next = right.layer_sizes[i], right.layer_sizes[i + 1]
        by_var = {}
        for b, e, label in right.layer_edges[i]:
            for var in label.variables:
                by_var.setdefault(var, []).append((b, e, label))
        constant_edges = [(b, e, label) for b, e, label in right.layer_edges[i] if label.constant]
        for a, c, label in left.layer_edges[i]:
            candidates = {}
            for var in label.variables:
                for b, e, other in by_var.get(var, ()):
                    candidates[(b, e)] = other
            if label.constant:
                for b, e, other in constant_edges:
                    candidates[(b, e)] = other
            for (b, e), other in sorted(candidates.items()):
                value = label.hadamard(other)
                if value:
                    edges[((i, a * s2 + b), (i + 1, c * s2_next + e))] = value
    return ABP(left.n_vars, left.field, sizes, edges)


@dataclass(frozen=True)
class DegreeProduct:
    degree: int
    left: ABP
    right: ABP
    product: ABP


@dataclass(frozen=True)
class HadamardBuild:
    parts: Tuple[DegreeProduct, ...]
    unpruned: ABP
    result: ABP


def build_hadamard_abp(left, right, threads=None, normalize=False):
    """Full pipeline: homogeneous parts, per-degree products, sum, pruning.

    Labels of a homogeneous part may carry several variables; the product of
    two such labels keeps alpha * beta * x_t for every shared x_t, which is the
    single-term rule applied variable by variable. With ``normalize`` the parts
    are first rewritten so every label is a single term.
    """
    _check_pair(left, right)
    threads = config.resolve(threads, config.THREADS)
    left_parts = abp_mod.degree_parts(left)
    right_parts = abp_mod.degree_parts(right)
    degrees = sorted(set(left_parts) & set(right_parts))
    logger.info("Hadamard ABP product over degrees %s", degrees)

    def one_degree(k):
        l_part, r_part = left_parts[k], right_parts[k]
        if normalize and k > 0:
            l_part, r_part = abp_mod.normalize_edges(l_part), abp_mod.normalize_edges(r_part)
        return DegreeProduct(k, l_part, r_part, product_abp(l_part, r_part))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = tuple(pool.map(one_degree, degrees))

    if parts:
        unpruned = abp_mod.abp_sum([part.product for part in parts])
    else:
        unpruned = abp_mod.zero_abp(left.n_vars, left.field)
    result = abp_mod.prune(unpruned)
    logger.debug("Hadamard ABP: %d nodes before pruning, %d after", abp_mod.nodes(unpruned), abp_mod.nodes(result))
    return HadamardBuild(parts, unpruned, result)


def hadamard_abp(left, right, threads=None, normalize=False):
    return build_hadamard_abp(left, right, threads, normalize).result


# circuit x ABP

@dataclass(frozen=True)
class ProductGate:
    """Gate <g, l, (i, a), (i + l, b)>: degree-l part of gate g against the program between two nodes."""

    part: int
    gate: int
    slice: int
    start: Tuple[int, int]
    end: Tuple[int, int]


@dataclass(frozen=True)
class CircuitProductBuild:
    circuit: Any
    gate_map: Dict[ProductGate, int]
    parts: Tuple[Tuple[int, ABP], ...]


def _slice_keys(circuit, degrees, sizes, k):
    """Keys (g, l, i, a, b) the output slice depends on, skipping slices above a gate's degree."""
    root = (circuit.output, k, 0, 0, 0)
    seen = {root}
    stack = [root]
    while stack:
        g, l, i, a, b = stack.pop()
        gate = circuit.gates[g]
        children = []
        if isinstance(gate, Add):
            children = [(gate.l, l, i, a, b), (gate.r, l, i, a, b)]
        elif isinstance(gate, Mul):
            for j in range(l + 1):
                if j > degrees[gate.l] or l - j > degrees[gate.r]:
                    continue
                for t in range(sizes[i + j]):
                    children.append((gate.l, j, i, a, t))
                    children.append((gate.r, l - j, i + j, t, b))
        for child in children:
            if child[1] <= degrees[child[0]] and child not in seen:
                seen.add(child)
                stack.append(child)
    return sorted(seen)


def _part_gates(builder, circuit, part, k, degrees):
    """Gate ids for every needed slice of one homogeneous part (None stands for zero)."""
    if k == 0:
        sizes = (1,)
    else:
        sizes = part.layer_sizes
    values = {}
    for key in _slice_keys(circuit, degrees, sizes, k):
        g, l, i, a, b = key
        gate = circuit.gates[g]
        if isinstance(gate, Input):
            value = None
            if l == 1:
                label = part.label((i, a), (i + 1, b))
                alpha = label.coefficient(gate.var) if label is not None else circuit.field.zero
                if alpha:
                    value = builder.input(gate.var)
                    if alpha != circuit.field.one:
                        value = builder.mul(builder.const(alpha), value)
        elif isinstance(gate, Const):
            value = builder.const(gate.value) if l == 0 and a == b and gate.value else None
        elif isinstance(gate, Add):
            value = builder.sum_of([v for v in (values.get((gate.l, l, i, a, b)), values.get((gate.r, l, i, a, b)))
                                    if v is not None])
        else:
            terms = []
            for j in range(l + 1):
                for t in range(sizes[i + j]):
                    lv = values.get((gate.l, j, i, a, t))
                    rv = values.get((gate.r, l - j, i + j, t, b))
                    if lv is not None and rv is not None:
                        terms.append(builder.mul(lv, rv))
            value = builder.sum_of(terms)
        if value is not None:
            values[key] = value
    return values


def build_hadamard_circuit_abp(circuit, program, degree_cap=None):
    """Circuit computing expand(circuit) o expand(program), with its gate map."""
    _check_pair(circuit, program)
    circuit_mod.check_circuit(circuit)
    abp_mod.check_abp(program)
    degree_cap = config.resolve(degree_cap, config.MAX_DEGREE)
    degrees = circuit_mod.gate_degrees(circuit)
    if program.depth > degree_cap or degrees[circuit.output] > degree_cap:
        raise ResourceCapError(f"degree exceeds the cap {degree_cap}")

    field = circuit.field
    builder = CircuitBuilder(circuit.n_vars, field)
    gate_map = {}
    outputs = []
    parts = []
    for k, part in sorted(abp_mod.degree_parts(program).items()):
        if k > degrees[circuit.output]:
            continue
        if k == 0:
            label = part.label((0, 0), (1, 0))
            scale = label.constant if label is not None else field.zero
            if not scale:
                continue
        else:
            part = abp_mod.normalize_edges(part)
        parts.append((k, part))
        values = _part_gates(builder, circuit, part, k, degrees)
        for (g, l, i, a, b), gate_id in values.items():
            gate_map[ProductGate(k, g, l, (i, a), (i + l, b))] = gate_id
        top = values.get((circuit.output, k, 0, 0, 0))
        if top is None:
            continue
        if k == 0 and scale != field.one:
            top = builder.mul(builder.const(scale), top)
        outputs.append(top)
    result = builder.build(builder.sum_of(outputs))
    logger.debug("circuit x ABP product: %d gates from %d gates and %d nodes",
                 len(result.gates), len(circuit.gates), abp_mod.nodes(program))
    return CircuitProductBuild(result, gate_map, tuple(parts))


def hadamard_circuit_abp(circuit, program, degree_cap=None):
    return build_hadamard_circuit_abp(circuit, program, degree_cap).circuit
