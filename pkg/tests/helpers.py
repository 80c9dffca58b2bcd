"""Seeded random generators shared by the test modules."""

import random

from hadamard import abp as abp_mod
from hadamard.abp import LinearForm
from hadamard.cfg import AcyclicCFG, Terminal
from hadamard.circuit import Add, Circuit, Const, Input, Mul
from hadamard.pit import Digraph
from hadamard.poly import NCPoly
from hadamard.scalar import RATIONALS


def rng_for(seed):
    return random.Random(seed)


def random_label(rng, n_vars, field, constant=True, density=0.6):
    coeffs = {v: rng.randint(-2, 2) for v in range(n_vars) if rng.random() < density}
    const = rng.randint(-2, 2) if constant and rng.random() < 0.5 else 0
    return LinearForm.make(field, const, coeffs)


def random_abp(rng, n_vars=2, depth=3, width=3, field=RATIONALS, homogeneous=False, density=0.7):
    sizes = [1] + [rng.randint(1, width) for _ in range(depth - 1)] + [1]
    edges = []
    for i in range(depth):
        for a in range(sizes[i]):
            for c in range(sizes[i + 1]):
                if rng.random() < density:
                    label = random_label(rng, n_vars, field, constant=not homogeneous)
                    if label:
                        edges.append(((i, a), (i + 1, c), label))
    return abp_mod.from_edges(n_vars, sizes, edges, field)


def cancelling_abp(rng, n_vars=2, depth=3, field=RATIONALS):
    """Two copies of one random path with opposite signs: always the zero polynomial."""
    labels = [random_label(rng, n_vars, field) or LinearForm.var(field, 0) for _ in range(depth)]
    sizes = [1] + [2] * (depth - 1) + [1]
    edges = []
    for branch, sign in ((0, 1), (1, -1)):
        for i, label in enumerate(labels):
            start = (i, 0 if i == 0 else branch)
            end = (i + 1, 0 if i + 1 == depth else branch)
            edges.append((start, end, label.scale(sign) if i == 0 else label))
    return abp_mod.from_edges(n_vars, sizes, edges, field)


def random_ncpoly(rng, n_vars=2, degree=3, n_terms=4, field=RATIONALS, homogeneous=True):
    terms = {}
    for _ in range(n_terms):
        d = degree if homogeneous else rng.randint(0, degree)
        terms[tuple(rng.randrange(n_vars) for _ in range(d))] = rng.randint(-3, 3)
    return NCPoly(n_vars, field, terms)


def random_circuit(rng, n_vars=2, n_gates=8, max_degree=3, field=RATIONALS, monotone=False):
    gates = [Input(v) for v in range(n_vars)]
    gates.append(Const(field(rng.randint(1, 3) if monotone else rng.randint(-3, 3))))
    degrees = [1] * n_vars + [0]
    while len(gates) < n_gates:
        l, r = rng.randrange(len(gates)), rng.randrange(len(gates))
        if rng.random() < 0.5:
            if degrees[l] + degrees[r] > max_degree:
                continue
            gates.append(Mul(l, r))
            degrees.append(degrees[l] + degrees[r])
        else:
            gates.append(Add(l, r))
            degrees.append(max(degrees[l], degrees[r]))
    return Circuit(n_vars, field, tuple(gates), len(gates) - 1)


def random_grammar(rng, n_terminals=2, n_nonterminals=4):
    names = [f"N{i}" for i in range(n_nonterminals)]
    productions = []
    for i, name in enumerate(names):
        earlier = names[:i]
        for _ in range(rng.randint(1, 2)):
            shape = rng.choice(["t", "tt", "tn", "nt", "nn", "n", "eps"] if earlier else ["t", "tt", "eps"])
            symbols = []
            for kind in shape if shape != "eps" else "":
                symbols.append(Terminal(rng.randrange(n_terminals)) if kind == "t" else rng.choice(earlier))
            productions.append((name, tuple(symbols)))
    return AcyclicCFG.make(names, n_terminals, names[-1], productions)


def random_int_matrix(rng, n, low=-3, high=3):
    return [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]


def random_digraph(rng, vertices=10, p_edge=0.15):
    edges = tuple((u, v) for u in range(vertices) for v in range(vertices) if u != v and rng.random() < p_edge)
    return Digraph(vertices, edges, 0, 1)
