"""Identity testing for noncommutative ABPs, plus the two reductions to it.

Three tests decide whether an ABP computes the zero polynomial:

* ``pit_rational``: over Q, P o P has nonnegative coefficients summing to
  the sum of squares of P's coefficients, so it is zero iff its value at the
  all-ones point is zero.
* ``pit_span_basis``: over any field, the span of the products of per-layer
  coefficient matrices is computed by divide and conquer.
* ``pit_randomized``: over a finite field, every layer gets its own copy of
  the variables and the resulting commutative polynomial is evaluated at
  random points of a large enough extension.

``pit_bruteforce`` expands the polynomial and is the oracle for all three.
"""

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from . import abp as abp_mod
from . import circuit as circuit_mod
from . import config
from .abp import LinearForm
from .errors import InputError
from .linalg import EchelonBasis, Matrix, basis_of_matrix_set, matmul
from .products import hadamard_abp
from .scalar import RATIONALS, RationalField, extension_for

logger = logging.getLogger(__name__)


class PitVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_zero: bool
    method: str
    witness: Optional[Dict[str, Any]] = None
    trials: Optional[int] = None
    failure_bound: Optional[str] = None
    value: Optional[str] = None


def _word_witness(word):
    return None if word is None else {"word": list(word)}


# deterministic witness

def _column_spaces(matrices, sizes, k, n_vars, field):
    """spaces[j]: basis (list of column vectors) of all suffix products from layer j to the sink."""
    spaces = [None] * (k + 1)
    spaces[k] = [[field.one]]
    for j in range(k - 1, -1, -1):
        span = EchelonBasis(sizes[j], field)
        kept = []
        for var in range(n_vars):
            a = matrices[(var, j)]
            for col in spaces[j + 1]:
                image = [sum((a[r, c] * col[c] for c in range(a.cols) if a[r, c]), a.field.zero)
                         for r in range(a.rows)]
                if span.add(image):
                    kept.append(image)
        spaces[j] = kept
    return spaces


def _first_word(part, k):
    field = part.field
    if k == 0:
        label = part.label((0, 0), (1, 0))
        return () if label is not None and label.constant else None
    if part.n_vars == 0:
        return None
    matrices = abp_mod.coefficient_matrices(part)
    spaces = _column_spaces(matrices, part.layer_sizes, k, part.n_vars, field)

    def extends(row, j):
        return any(sum((x * y for x, y in zip(row, col) if x and y), field.zero) for col in spaces[j])

    row = [field.one]
    if not extends(row, 0):
        return None
    word = []
    for j in range(k):
        for var in range(part.n_vars):
            a = matrices[(var, j)]
            nxt = [sum((row[r] * a[r, c] for r in range(a.rows) if row[r] and a[r, c]), field.zero)
                   for c in range(a.cols)]
            if extends(nxt, j + 1):
                word.append(var)
                row = nxt
                break
        else:
            raise AssertionError("prefix lost its nonzero extension")
    return tuple(word)


def find_witness(program):
    """First nonzero monomial in (degree, lexicographic) order, or None for the zero polynomial."""
    for k, part in sorted(abp_mod.degree_parts(program).items()):
        word = _first_word(part, k)
        if word is not None:
            return word
    return None


# the three tests and the oracle

def pit_rational(program, threads=None):
    """Zero test over Q by evaluating P o P at the all-ones point."""
    if not isinstance(program.field, RationalField):
        raise InputError(f"pit_rational needs an ABP over Q, got {program.field}")
    square = hadamard_abp(program, program, threads)
    value = abp_mod.evaluate(square, [1] * program.n_vars)
    logger.info("P o P at all-ones: %s", value)
    is_zero = value == 0
    return PitVerdict(is_zero=is_zero, method="det", value=str(value),
                      witness=None if is_zero else _word_witness(find_witness(program)))


def _span_basis(matrices, n_vars, lo, hi):
    if hi - lo == 1:
        return basis_of_matrix_set([matrices[(var, lo)] for var in range(n_vars)])
    mid = (lo + hi) // 2
    left = _span_basis(matrices, n_vars, lo, mid)
    if not left:
        return []
    right = _span_basis(matrices, n_vars, mid, hi)
    return basis_of_matrix_set([matmul(x, y) for x in left for y in right])


def span_dimensions(program):
    """{degree: dimension of the span of full coefficient-matrix products} per homogeneous part."""
    dims = {}
    for k, part in sorted(abp_mod.degree_parts(program).items()):
        if k == 0:
            label = part.label((0, 0), (1, 0))
            dims[k] = 1 if label is not None and label.constant else 0
        elif part.n_vars == 0:
            dims[k] = 0
        else:
            dims[k] = len(_span_basis(abp_mod.coefficient_matrices(part), part.n_vars, 0, k))
    return dims


def pit_span_basis(program):
    """Deterministic zero test over any exact field."""
    dims = span_dimensions(program)
    logger.info("span dimensions per degree: %s", dims)
    is_zero = not any(dims.values())
    return PitVerdict(is_zero=is_zero, method="span_basis",
                      witness=None if is_zero else _word_witness(find_witness(program)))


def pit_bruteforce(source, max_terms=None, degree_cap=None):
    """Expand an ABP or circuit and inspect the coefficients."""
    if isinstance(source, abp_mod.ABP):
        poly = abp_mod.expand(source, max_terms)
    else:
        poly = circuit_mod.expand(source, degree_cap, max_terms)
    monomials = poly.monomials()
    return PitVerdict(is_zero=poly.is_zero(), method="brute",
                      witness=_word_witness(monomials[0]) if monomials else None)


@dataclass(frozen=True)
class TrialResult:
    index: int
    nonzero: bool
    points: Tuple[Tuple[int, Any], ...]


def _random_parts(program):
    parts = abp_mod.degree_parts(program)
    return {k: part for k, part in parts.items() if k > 0}


def randomized_trial(program, seed, index, target=None, parts=None):
    """One evaluation of every homogeneous part at fresh random layer points.

    The stream depends only on (seed, index), so trials can run in any order.
    """
    target = target or extension_for(program.field, 2 * program.depth)
    parts = _random_parts(program) if parts is None else parts
    rng = np.random.default_rng([seed, index])
    nonzero = False
    drawn = []
    for k, part in sorted(parts.items()):
        points = [[target.random(rng) for _ in range(program.n_vars)] for _ in range(k)]
        drawn.append((k, points))
        if abp_mod.evaluate_layered(part, points, target):
            nonzero = True
    return TrialResult(index, nonzero, tuple(drawn))


def failure_bound(program, trials, target=None):
    """(d / q')^trials, capped at 1, as an exact fraction."""
    target = target or extension_for(program.field, 2 * program.depth)
    per_trial = min(Fraction(program.depth, target.order), Fraction(1))
    return per_trial ** trials


def pit_randomized(program, trials, seed=None, threads=None):
    """Randomized zero test over a finite field; a nonzero verdict is always correct."""
    if not getattr(program.field, "is_finite", False):
        raise InputError(f"pit_randomized needs a finite field, got {program.field}")
    if not isinstance(trials, int) or trials < 1:
        raise InputError(f"trials must be a positive integer, got {trials!r}")
    seed = config.resolve(seed, config.SEED)
    threads = config.resolve(threads, config.THREADS)
    target = extension_for(program.field, 2 * program.depth)
    bound = str(failure_bound(program, trials, target))
    logger.info("randomized test over %s (%d elements), %d trials", target, target.order, trials)

    constant = abp_mod.degree_parts(program).get(0)
    if constant is not None:
        label = constant.label((0, 0), (1, 0))
        if label is not None and label.constant:
            return PitVerdict(is_zero=False, method="rand", witness={"word": []}, trials=trials, failure_bound=bound)

    parts = _random_parts(program)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda i: randomized_trial(program, seed, i, target, parts), range(trials)))
    hit = next((r for r in results if r.nonzero), None)
    witness = None
    if hit is not None:
        witness = {"trial": hit.index,
                   "points": [{"degree": k, "layers": [[target.format(v) for v in layer] for layer in points]}
                              for k, points in hit.points]}
    return PitVerdict(is_zero=hit is None, method="rand", witness=witness, trials=trials, failure_bound=bound)


def hadamard_zero_circuits(left, right, degree_cap=None, max_terms=None):
    """True iff the supports of two monotone circuits are disjoint.

    Zero constants are propagated away before the monotonicity check.
    """
    left, right = circuit_mod.monotone_form(left), circuit_mod.monotone_form(right)
    f = circuit_mod.expand(left, degree_cap, max_terms)
    g = circuit_mod.expand(right, degree_cap, max_terms)
    return not (f.mon_set() & g.mon_set())


# reductions

def det_to_abp(matrix):
    """Constant-labelled ABP whose value is det(matrix), built from clow sequences.

    A clow is a closed walk whose head (first vertex) is its smallest vertex;
    det = sum over sequences of clows with increasing heads and total length
    n of (-1)^(n + #clows) times the product of edge weights. Nodes of layer
    l are (parity of closed clows, head, current vertex) after l steps.
    """
    if isinstance(matrix, Matrix) and not isinstance(matrix.field, RationalField):
        raise InputError(f"det_to_abp needs an integer matrix, got entries over {matrix.field}")
    rows = matrix.to_rows() if isinstance(matrix, Matrix) else [list(r) for r in matrix]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InputError("det_to_abp needs a nonempty square matrix")
    if any(Fraction(v).denominator != 1 for r in rows for v in r):
        raise InputError("det_to_abp needs an integer matrix")
    a = [[RATIONALS(Fraction(v)) for v in r] for r in rows]

    states = [(par, h, u) for par in (0, 1) for h in range(n) for u in range(h, n)]
    index = {s: i for i, s in enumerate(states)}
    sizes = [1] + [len(states)] * (n - 1) + [1]

    def node(layer, state):
        return (layer, 0) if layer == 0 else (layer, index[state])

    edges = []
    for layer in range(n):
        sources = [(0, h, h) for h in range(n)] if layer == 0 else states
        for par, h, u in sources:
            start = node(layer, (par, h, u))
            if layer + 1 == n:
                weight = a[u][h]
                if weight:
                    sign = 1 if (n + par + 1) % 2 == 0 else -1
                    edges.append((start, (n, 0), LinearForm.const(RATIONALS, sign * weight)))
                continue
            for v in range(h + 1, n):
                if a[u][v]:
                    edges.append((start, node(layer + 1, (par, h, v)), LinearForm.const(RATIONALS, a[u][v])))
            if a[u][h]:
                for h2 in range(h + 1, n):
                    edges.append((start, node(layer + 1, (1 - par, h2, h2)), LinearForm.const(RATIONALS, a[u][h])))
    program = abp_mod.prune(abp_mod.from_edges(0, sizes, edges, RATIONALS))
    logger.debug("clow ABP for a %dx%d matrix: %d nodes", n, n, abp_mod.nodes(program))
    return program


def singularity_via_pit(matrix):
    """(is_singular, verdict) by running pit_rational on the clow ABP."""
    verdict = pit_rational(det_to_abp(matrix))
    return verdict.is_zero, verdict


@dataclass(frozen=True)
class Digraph:
    vertices: int
    edges: Tuple[Tuple[int, int], ...]
    s: int = 0
    t: int = 1


@dataclass(frozen=True)
class LayeredDigraph:
    layers: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Tuple[Tuple[int, int], Tuple[int, int], int], ...]
    s: int
    t: int


def _check_endpoints(graph, s, t):
    for name, v in (("s", s), ("t", t)):
        if not isinstance(v, int) or not 0 <= v < graph.vertices:
            raise InputError(f"{name}={v!r} is not a vertex of a {graph.vertices}-vertex graph")
    for u, v in graph.edges:
        if not 0 <= u < graph.vertices or not 0 <= v < graph.vertices:
            raise InputError(f"edge ({u}, {v}) leaves the vertex set")


def reachable(graph, s, t):
    """Breadth-first search."""
    _check_endpoints(graph, s, t)
    adjacent = [[] for _ in range(graph.vertices)]
    for u, v in graph.edges:
        adjacent[u].append(v)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return True
        for v in adjacent[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def layerize(graph, s, t):
    """Copies (v, l) for l = 0..L with L = max(1, N - 1); edge e gives (u, l) -> (v, l + 1) labelled by e.

    t also passes from (t, l) to (t, l + 1) through a fresh label len(edges) + l,
    so every walk from s reaching t within L steps survives to the last layer.
    """
    _check_endpoints(graph, s, t)
    length = max(1, graph.vertices - 1)
    layers = [(s,)] + [tuple(range(graph.vertices))] * (length - 1) + [(t,)]
    members = [set(layer) for layer in layers]
    edges = []
    for ell in range(length):
        for e, (u, v) in enumerate(graph.edges):
            if u in members[ell] and v in members[ell + 1]:
                edges.append(((ell, u), (ell + 1, v), e))
        if t in members[ell] and t in members[ell + 1]:
            edges.append(((ell, t), (ell + 1, t), len(graph.edges) + ell))
    return LayeredDigraph(tuple(layers), tuple(edges), s, t)


def reach_to_abp(graph, s=None, t=None):
    """ABP with one variable per edge and one pass-through variable per layer, nonzero iff t is reachable from s.

    Distinct walks give distinct words, so no two paths can cancel.
    """
    s = graph.s if s is None else s
    t = graph.t if t is None else t
    layered = layerize(graph, s, t)
    position = [{v: i for i, v in enumerate(layer)} for layer in layered.layers]
    edges = [((l1, position[l1][u]), (l2, position[l2][v]), LinearForm.var(RATIONALS, var))
             for (l1, u), (l2, v), var in layered.edges]
    sizes = [len(layer) for layer in layered.layers]
    program = abp_mod.from_edges(len(graph.edges) + len(layered.layers) - 1, sizes, edges, RATIONALS)
    return abp_mod.prune(program)


def pit_verdict(program, method, trials=20, seed=None, threads=None, max_terms=None):
    """Dispatch by CLI method name: det, span, rand or brute."""
    if method == "det":
        return pit_rational(program, threads)
    if method == "span":
        return pit_span_basis(program)
    if method == "rand":
        return pit_randomized(program, trials, seed, threads)
    if method == "brute":
        return pit_bruteforce(program, max_terms)
    raise InputError(f"unknown PIT method {method!r}")
