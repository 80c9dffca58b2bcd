"""Layered algebraic branching programs.

Nodes are addressed as ``(layer, index)``. Layer 0 holds the single source and
the last layer the single sink; every edge joins consecutive layers and carries
an affine label ``constant + sum_t coeff_t x_t``. Missing edges mean label 0.
Parallel edges are summed when a program is built, so the edge map has one
entry per node pair.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product as cartesian
from typing import Any, Mapping, Tuple

from . import config
from .errors import InputError, Violation, check_cap
from .linalg import Matrix, identity, matmul, rank
from .poly import NCPoly
from .scalar import embed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearForm:
    """Affine edge label. ``coeffs`` is a sorted tuple of (variable, nonzero coefficient)."""

    field: Any
    constant: Any
    coeffs: Tuple[Tuple[int, Any], ...] = ()

    @classmethod
    def make(cls, field, constant=0, coeffs=None):
        merged = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else (coeffs or ())
        for var, value in items:
            if not isinstance(var, int) or var < 0:
                raise InputError(f"bad variable index {var!r} in edge label")
            merged[var] = merged.get(var, field.zero) + field(value)
        return cls(field, field(constant), tuple(sorted((v, c) for v, c in merged.items() if c)))

    @classmethod
    def var(cls, field, index, coeff=1):
        return cls.make(field, 0, {index: coeff})

    @classmethod
    def const(cls, field, value):
        return cls.make(field, value)

    def __bool__(self):
        return bool(self.constant) or bool(self.coeffs)

    @property
    def variables(self):
        return tuple(v for v, _ in self.coeffs)

    def is_constant(self):
        return not self.coeffs

    def is_linear(self):
        """No constant term."""
        return not self.constant

    def coefficient(self, var):
        for v, c in self.coeffs:
            if v == var:
                return c
        return self.field.zero

    def linear_part(self):
        return LinearForm(self.field, self.field.zero, self.coeffs)

    def __add__(self, other):
        return LinearForm.make(self.field, self.constant + other.constant, list(self.coeffs) + list(other.coeffs))

    def scale(self, value):
        value = self.field(value)
        return LinearForm.make(self.field, self.constant * value, [(v, c * value) for v, c in self.coeffs])

    def hadamard(self, other):
        """Coefficient-wise product of two degree <= 1 polynomials."""
        theirs = dict(other.coeffs)
        return LinearForm.make(self.field, self.constant * other.constant,
                               [(v, c * theirs[v]) for v, c in self.coeffs if v in theirs])

    def evaluate(self, values, target=None):
        if target is None:
            total = self.constant
            for v, c in self.coeffs:
                total = total + c * values[v]
            return total
        total = embed(self.constant, target)
        for v, c in self.coeffs:
            total = total + embed(c, target) * values[v]
        return total

    def as_poly(self, n_vars):
        terms = {(): self.constant}
        terms.update({(v,): c for v, c in self.coeffs})
        return NCPoly(n_vars, self.field, terms)

    def __repr__(self):
        parts = [f"{c}*x{v}" for v, c in self.coeffs]
        if self.constant or not parts:
            parts.insert(0, str(self.constant))
        return " + ".join(parts)


@dataclass(frozen=True, eq=False)
class ABP:
    n_vars: int
    field: Any
    layer_sizes: Tuple[int, ...]
    edges: Mapping[Tuple[Tuple[int, int], Tuple[int, int]], LinearForm] = dc_field(default_factory=dict)

    @property
    def depth(self):
        return len(self.layer_sizes) - 1

    @cached_property
    def layer_edges(self):
        """Per layer i, the sorted list of (a, c, label) for edges (i, a) -> (i + 1, c)."""
        layers = [[] for _ in range(max(self.depth, 0))]
        for ((i, a), (_, c)), label in sorted(self.edges.items(), key=lambda kv: kv[0]):
            layers[i].append((a, c, label))
        return layers

    def label(self, start, end):
        return self.edges.get((tuple(start), tuple(end)))

    def labels(self):
        return list(self.edges.values())

    def __eq__(self, other):
        if not isinstance(other, ABP):
            return NotImplemented
        return (self.n_vars, self.field, self.layer_sizes) == (other.n_vars, other.field, other.layer_sizes) \
            and dict(self.edges) == dict(other.edges)

    __hash__ = None

    def __repr__(self):
        return f"ABP(n_vars={self.n_vars}, field={self.field}, layers={list(self.layer_sizes)}, edges={len(self.edges)})"


def validate(program):
    """First structural violation of ``program``, or None."""
    sizes = program.layer_sizes
    if program.depth < 1:
        return Violation("layers", f"need at least two layers, got {len(sizes)}")
    if any(not isinstance(s, int) or s < 1 for s in sizes):
        return Violation("layers", f"every layer needs at least one node: {list(sizes)}")
    if sizes[0] != 1:
        return Violation("layer 0", f"single source required, layer has {sizes[0]} nodes")
    if sizes[-1] != 1:
        return Violation(f"layer {program.depth}", f"single sink required, layer has {sizes[-1]} nodes")
    for (start, end), label in sorted(program.edges.items(), key=lambda kv: kv[0]):
        where = f"edge {start}->{end}"
        (i, a), (j, c) = start, end
        if j != i + 1:
            return Violation(where, "edges must join consecutive layers")
        if not 0 <= i < program.depth:
            return Violation(where, f"layer {i} out of range")
        if not 0 <= a < sizes[i] or not 0 <= c < sizes[j]:
            return Violation(where, "node index out of range")
        if not isinstance(label, LinearForm):
            return Violation(where, f"label is not a linear form: {label!r}")
        if label.field != program.field:
            return Violation(where, f"label over {label.field}, program over {program.field}")
        if any(v >= program.n_vars for v in label.variables):
            return Violation(where, f"label mentions a variable outside [0, {program.n_vars})")
    return None


def check_abp(program):
    violation = validate(program)
    if violation is not None:
        logger.error("invalid ABP: %s", violation)
        raise InputError(f"invalid ABP: {violation}")
    return program


def from_edges(n_vars, layer_sizes, edges, field):
    """Build and validate an ABP; parallel edges are summed and zero labels dropped."""
    merged = {}
    for start, end, label in edges:
        key = (tuple(start), tuple(end))
        merged[key] = merged[key] + label if key in merged else label
    program = ABP(n_vars, field, tuple(layer_sizes), {k: v for k, v in merged.items() if v})
    return check_abp(program)


def zero_abp(n_vars, field, depth=1):
    return ABP(n_vars, field, (1,) * (depth + 1), {})


def chain(n_vars, labels, field):
    """Single-path program whose i-th edge carries ``labels[i]``."""
    labels = list(labels)
    return from_edges(n_vars, (1,) * (len(labels) + 1),
                      [((i, 0), (i + 1, 0), label) for i, label in enumerate(labels)], field)


def nodes(program):
    return sum(program.layer_sizes)


def edge_count(program):
    return len(program.edges)


def is_homogeneous(program):
    """Every label linear (degree = depth), or a depth-1 program with constant labels."""
    labels = program.labels()
    if all(label.is_linear() for label in labels):
        return True
    return program.depth == 1 and all(label.is_constant() for label in labels)


def degree(program):
    """Largest number of variable-carrying edges on a source-sink path; -1 without paths."""
    best = {0: 0}
    for layer in program.layer_edges:
        nxt = {}
        for a, c, label in layer:
            if a in best:
                value = best[a] + (0 if label.is_constant() else 1)
                nxt[c] = max(nxt.get(c, -1), value)
        best = nxt
    return best.get(0, -1)


def _values(program, point, target=None):
    if len(point) != program.n_vars:
        raise InputError(f"point has {len(point)} coordinates, ABP has {program.n_vars} variables")
    field = target or program.field
    return [embed(v, field) if target is not None else field(v) for v in point]


def layer_matrix(program, layer, point, target=None):
    """n_layer x n_{layer+1} matrix of edge labels evaluated at ``point``."""
    field = target or program.field
    values = _values(program, point, target)
    rows = [[field.zero] * program.layer_sizes[layer + 1] for _ in range(program.layer_sizes[layer])]
    for a, c, label in program.layer_edges[layer]:
        rows[a][c] = label.evaluate(values, target)
    return Matrix.from_rows(rows, field)


def evaluate_layered(program, points, target=None):
    """Evaluate with a separate point per layer (``points[i]`` feeds layer i's labels)."""
    if len(points) != program.depth:
        raise InputError(f"need {program.depth} layer points, got {len(points)}")
    field = target or program.field
    acc = identity(1, field)
    for layer, point in enumerate(points):
        acc = matmul(acc, layer_matrix(program, layer, point, target))
    return acc[0, 0]


def evaluate(program, point, target=None):
    """Value at ``point`` as the product of the per-layer matrices."""
    return evaluate_layered(program, [point] * program.depth, target)


def path_count(program):
    counts = {0: 1}
    for layer in program.layer_edges:
        nxt = defaultdict(int)
        for a, c, _ in layer:
            if a in counts:
                nxt[c] += counts[a]
        counts = nxt
    return counts.get(0, 0)


def expand(program, max_terms=None):
    """Sum over all source-sink paths of the ordered product of labels."""
    cap = config.resolve(max_terms, config.MAX_TERMS)
    check_cap(path_count(program), cap, "path enumeration")
    field = program.field
    outgoing = [defaultdict(list) for _ in range(program.depth)]
    for i, layer in enumerate(program.layer_edges):
        for a, c, label in layer:
            outgoing[i][a].append((c, label))
    total = defaultdict(lambda: field.zero)

    def walk(layer, node, partial):
        if layer == program.depth:
            for word, coeff in partial.items():
                total[word] = total[word] + coeff
            return
        for nxt, label in outgoing[layer][node]:
            step = defaultdict(lambda: field.zero)
            for word, coeff in partial.items():
                if label.constant:
                    step[word] = step[word] + coeff * label.constant
                for var, alpha in label.coeffs:
                    step[word + (var,)] = step[word + (var,)] + coeff * alpha
            check_cap(len(step), cap, "path expansion")
            walk(layer + 1, nxt, step)

    walk(0, 0, {(): field.one})
    return NCPoly(program.n_vars, field, total)


def prune(program):
    """Drop nodes not on any source-sink path (each layer keeps at least one node)."""
    depth = program.depth
    forward = [set() for _ in range(depth + 1)]
    forward[0].add(0)
    for i, layer in enumerate(program.layer_edges):
        forward[i + 1].update(c for a, c, _ in layer if a in forward[i])
    backward = [set() for _ in range(depth + 1)]
    backward[depth].add(0)
    for i in range(depth - 1, -1, -1):
        backward[i].update(a for a, c, _ in program.layer_edges[i] if c in backward[i + 1])
    keep = [sorted(f & b) for f, b in zip(forward, backward)]
    keep = [k if k else [0] for k in keep]
    index = [{old: new for new, old in enumerate(k)} for k in keep]
    edges = {}
    for ((i, a), (j, c)), label in program.edges.items():
        if a in index[i] and c in index[j] and a in forward[i] and c in backward[j]:
            edges[((i, index[i][a]), (j, index[j][c]))] = label
    pruned = ABP(program.n_vars, program.field, tuple(len(k) for k in keep), edges)
    logger.debug("pruned ABP from %d to %d nodes", nodes(program), nodes(pruned))
    return pruned


def sub_program(program, start, end):
    """The program B(start, end): ``start`` becomes the source and ``end`` the sink."""
    (i, a), (j, c) = start, end
    if not 0 <= i < j <= program.depth:
        raise InputError(f"sub-program needs layers 0 <= i < j <= {program.depth}, got {i}, {j}")
    if not 0 <= a < program.layer_sizes[i] or not 0 <= c < program.layer_sizes[j]:
        raise InputError(f"sub-program endpoints {start}, {end} out of range")
    sizes = (1,) + tuple(program.layer_sizes[i + 1:j]) + (1,)
    edges = {}
    for ((li, u), (lj, w)), label in program.edges.items():
        if li < i or lj > j or (li == i and u != a) or (lj == j and w != c):
            continue
        edges[((li - i, 0 if li == i else u), (lj - i, 0 if lj == j else w))] = label
    return ABP(program.n_vars, program.field, sizes, edges)


def _constant_matrices(program):
    field = program.field
    mats = []
    for i, layer in enumerate(program.layer_edges):
        rows = [[field.zero] * program.layer_sizes[i + 1] for _ in range(program.layer_sizes[i])]
        for a, c, label in layer:
            rows[a][c] = label.constant
        mats.append(Matrix.from_rows(rows, field))
    return mats


def homogeneous_part(program, k):
    """ABP of depth max(k, 1) computing the degree-k part of ``program``.

    Layer j of the result holds the original nodes reached by the j-th
    variable-carrying edge of a path; constant stretches between two such edges
    are multiplied out into the edge labels.
    """
    if k < 0:
        raise InputError(f"degree must be >= 0, got {k}")
    field, depth = program.field, program.depth
    if k > depth:
        return zero_abp(program.n_vars, field, k)
    consts = _constant_matrices(program)
    memo = {}

    def const_path(i, j):
        if (i, j) not in memo:
            memo[(i, j)] = identity(program.layer_sizes[i], field) if i == j else matmul(const_path(i, j - 1), consts[j - 1])
        return memo[(i, j)]

    if k == 0:
        value = const_path(0, depth)[0, 0]
        return from_edges(program.n_vars, (1, 1), [((0, 0), (1, 0), LinearForm.const(field, value))], field)

    linear = [[(y, w, label.linear_part()) for y, w, label in layer if not label.is_constant()]
              for layer in program.layer_edges]
    layers = [[(0, 0)]]
    for j in range(1, k):
        heads = [(i, w) for i in range(j, depth - k + j + 1) for w in sorted({w for _, w, _ in linear[i - 1]})]
        layers.append(heads)
    layers.append([(depth, 0)])
    index = [{node: n for n, node in enumerate(layer)} for layer in layers]

    edges = []
    for j in range(1, k + 1):
        last = j == k
        for (i, u), src in index[j - 1].items():
            top = depth if last else depth - k + j
            for i2 in range(i + 1, top + 1):
                lead = const_path(i, i2 - 1)
                for y, w, label in linear[i2 - 1]:
                    coeff = lead[u, y]
                    if not coeff:
                        continue
                    if last:
                        coeff = coeff * const_path(i2, depth)[w, 0]
                        target = 0
                    else:
                        target = index[j].get((i2, w))
                        if target is None:
                            continue
                    if coeff:
                        edges.append(((j - 1, src), (j, target), label.scale(coeff)))
    sizes = [max(1, len(layer)) for layer in layers]
    return prune(from_edges(program.n_vars, sizes, edges, field))


def homogeneous_parts(program):
    """[program] when already homogeneous, else the parts of degree 0..depth."""
    if is_homogeneous(program):
        return [program]
    return [homogeneous_part(program, k) for k in range(program.depth + 1)]


def degree_parts(program):
    """{degree: homogeneous program}; homogeneous programs map to a single entry."""
    if is_homogeneous(program):
        if program.depth == 1 and all(label.is_constant() for label in program.labels()) and program.edges:
            return {0: program}
        return {program.depth: program}
    return {k: part for k, part in enumerate(homogeneous_parts(program))}


def normalize_edges(program):
    """Equivalent program in which every edge label is a single term alpha*x_t.

    Internal nodes are split by the variable on their incoming edge; nodes of
    the last internal layer are also split by the variable on their edge to
    the sink. Depth-1 programs have no internal layer and are returned as is.
    """
    if program.depth < 1 or not all(label.is_linear() for label in program.labels()):
        raise InputError("edge normalization needs a homogeneous ABP without constant terms")
    depth = program.depth
    if depth == 1:
        return program
    sink_vars = defaultdict(set)
    for a, _, label in program.layer_edges[depth - 1]:
        sink_vars[a].update(label.variables)

    layers = [[(0,)]]
    for ell in range(1, depth):
        tagged = sorted({(c, t) for _, c, label in program.layer_edges[ell - 1] for t in label.variables})
        if ell == depth - 1:
            tagged = [(c, t, out) for c, t in tagged for out in sorted(sink_vars[c])]
        layers.append(tagged)
    layers.append([(0,)])
    index = [{node: n for n, node in enumerate(layer)} for layer in layers]

    edges = []
    for ell in range(depth):
        by_origin = defaultdict(list)
        for node in layers[ell + 1]:
            by_origin[node[0]].append(node)
        for src_node, src in index[ell].items():
            u = src_node[0]
            if ell == depth - 1:
                label = program.label((ell, u), (ell + 1, 0))
                if label is not None:
                    t = src_node[2]
                    edges.append(((ell, src), (ell + 1, 0), LinearForm.var(program.field, t, label.coefficient(t))))
                continue
            for (_, c, label) in (e for e in program.layer_edges[ell] if e[0] == u):
                for dst_node in by_origin[c]:
                    alpha = label.coefficient(dst_node[1])
                    if alpha:
                        edges.append(((ell, src), (ell + 1, index[ell + 1][dst_node]),
                                      LinearForm.var(program.field, dst_node[1], alpha)))
    sizes = [max(1, len(layer)) for layer in layers]
    result = prune(from_edges(program.n_vars, sizes, edges, program.field))
    logger.debug("normalized ABP: %d -> %d nodes", nodes(program), nodes(result))
    return result


def abp_sum(programs):
    """Program computing the sum of ``programs``.

    Sources and sinks are shared. A program shorter than the longest one ends
    at a node of a shared chain of constant-1 edges leading to the sink.
    """
    programs = list(programs)
    if not programs:
        raise InputError("abp_sum needs at least one program")
    first = programs[0]
    for other in programs[1:]:
        if other.n_vars != first.n_vars:
            raise InputError(f"variable counts differ: {first.n_vars} vs {other.n_vars}")
        if other.field != first.field:
            raise InputError(f"fields differ: {first.field} vs {other.field}")
    field = first.field
    depth = max(p.depth for p in programs)
    chain_from = min(p.depth for p in programs)

    offsets = []
    sizes = [1] + [0] * (depth - 1) + [1]
    for p in programs:
        offs = {}
        for j in range(1, p.depth):
            offs[j] = sizes[j]
            sizes[j] += p.layer_sizes[j]
        offsets.append(offs)
    chain_node = {}
    for j in range(chain_from, depth):
        chain_node[j] = sizes[j]
        sizes[j] += 1

    def place(p_index, p, layer, node):
        if layer == 0:
            return (0, 0)
        if layer == p.depth:
            return (depth, 0) if layer == depth else (layer, chain_node[layer])
        return (layer, offsets[p_index][layer] + node)

    edges = []
    for n, p in enumerate(programs):
        for ((i, a), (j, c)), label in p.edges.items():
            edges.append((place(n, p, i, a), place(n, p, j, c), label))
    one = LinearForm.const(field, 1)
    for j in range(chain_from, depth):
        end = (depth, 0) if j + 1 == depth else (j + 1, chain_node[j + 1])
        edges.append(((j, chain_node[j]), end, one))
    return from_edges(first.n_vars, sizes, edges, field)


def coefficient_matrices(program):
    """{(variable, layer): matrix of that variable's coefficients on the layer's edges}."""
    if not all(label.is_linear() for label in program.labels()):
        raise InputError("coefficient matrices need a homogeneous ABP without constant terms")
    field = program.field
    grids = {}
    for ell, layer in enumerate(program.layer_edges):
        for var in range(program.n_vars):
            grids[(var, ell)] = [[field.zero] * program.layer_sizes[ell + 1] for _ in range(program.layer_sizes[ell])]
        for a, c, label in layer:
            for var, alpha in label.coeffs:
                grids[(var, ell)][a][c] = alpha
    return {key: Matrix.from_rows(rows, field) for key, rows in grids.items()}


def word_product(matrices, word):
    """A_{w_1,0} A_{w_2,1} ... A_{w_d,d-1} as a 1x1 entry."""
    acc = None
    for ell, var in enumerate(word):
        step = matrices[(var, ell)]
        acc = step if acc is None else matmul(acc, step)
    return acc[0, 0]


def coefficient_of(program, word):
    """Coefficient of ``word`` in the polynomial computed by ``program``."""
    word = tuple(word)
    if any(not isinstance(v, int) or not 0 <= v < program.n_vars for v in word):
        raise InputError(f"word {word!r} uses variables outside [0, {program.n_vars})")
    k = len(word)
    if is_homogeneous(program):
        part = degree_parts(program).get(k)
    else:
        part = homogeneous_part(program, k) if k <= program.depth else None
    if part is None:
        return program.field.zero
    if k == 0:
        return evaluate(part, [program.field.zero] * program.n_vars)
    return word_product(coefficient_matrices(part), word)


@dataclass(frozen=True)
class NisanMatrix:
    k: int
    matrix: Matrix


def words(n_vars, length):
    return list(cartesian(range(n_vars), repeat=length))


def nisan_matrix(poly, k, max_terms=None):
    """Rows: degree-k words (lexicographic); columns: degree-(d-k) words."""
    if not poly.is_homogeneous():
        raise InputError("Nisan matrices need a homogeneous polynomial")
    field = poly.field
    if poly.is_zero():
        return NisanMatrix(k, Matrix(1, 1, field, (field.zero,)))
    d = poly.degree
    if not 0 <= k <= d:
        raise InputError(f"split degree {k} outside [0, {d}]")
    cap = config.resolve(max_terms, config.MAX_TERMS)
    check_cap(poly.n_vars ** d, cap, "Nisan matrix")
    rows, cols = words(poly.n_vars, k), words(poly.n_vars, d - k)
    entries = tuple(poly.coefficient(r + c) for r in rows for c in cols)
    return NisanMatrix(k, Matrix(len(rows), len(cols), field, entries))


def nisan_ranks(poly, max_terms=None):
    if poly.is_zero():
        return [0]
    return [rank(nisan_matrix(poly, k, max_terms).matrix) for k in range(poly.degree + 1)]


def nisan_complexity(poly, max_terms=None):
    """Sum over k of rank M_k(poly): the size of a smallest ABP for a homogeneous polynomial."""
    return sum(nisan_ranks(poly, max_terms))
