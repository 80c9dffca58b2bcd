"""Acyclic context-free grammars and their correspondence with monotone circuits.

Right-hand sides have at most two symbols; a symbol is a nonterminal name
(``str``) or a :class:`Terminal` naming a variable index. Words are tuples of
variable indices. The dependency graph A -> B (B occurs in a rule of A) must be
acyclic, so every language is finite.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Tuple, Union

from . import circuit as circuit_mod
from . import config
from .circuit import Add, CircuitBuilder, Const, Input
from .errors import InputError, Violation, check_cap
from .scalar import RATIONALS

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Terminal:
    index: int

    def __repr__(self):
        return f"x{self.index}"


Symbol = Union[str, Terminal]


@dataclass(frozen=True)
class AcyclicCFG:
    nonterminals: Tuple[str, ...]
    n_terminals: int
    start: str
    productions: Tuple[Tuple[str, Tuple[Symbol, ...]], ...]

    @classmethod
    def make(cls, nonterminals, n_terminals, start, productions):
        """Build with duplicate productions removed (first occurrence kept)."""
        seen = []
        for lhs, rhs in productions:
            rule = (lhs, tuple(rhs))
            if rule not in seen:
                seen.append(rule)
        return cls(tuple(nonterminals), n_terminals, start, tuple(seen))

    def rules(self):
        """{nonterminal: [rhs, ...]} including nonterminals without rules."""
        table = {a: [] for a in self.nonterminals}
        for lhs, rhs in self.productions:
            table.setdefault(lhs, []).append(rhs)
        return table


def _dependencies(grammar):
    deps = {a: set() for a in grammar.nonterminals}
    for lhs, rhs in grammar.productions:
        deps.setdefault(lhs, set()).update(s for s in rhs if isinstance(s, str))
    return deps


def validate(grammar):
    names = set(grammar.nonterminals)
    if len(names) != len(grammar.nonterminals):
        return Violation("nonterminals", "duplicate nonterminal names")
    if grammar.start not in names:
        return Violation("start", f"start symbol {grammar.start!r} is not a nonterminal")
    for lhs, rhs in grammar.productions:
        where = f"production {lhs} -> {' '.join(map(str, rhs)) or 'eps'}"
        if lhs not in names:
            return Violation(where, f"unknown nonterminal {lhs!r}")
        if len(rhs) > 2:
            return Violation(where, f"right-hand side has {len(rhs)} symbols, at most 2 allowed")
        for symbol in rhs:
            if isinstance(symbol, Terminal):
                if not 0 <= symbol.index < grammar.n_terminals:
                    return Violation(where, f"terminal {symbol.index} outside [0, {grammar.n_terminals})")
            elif symbol not in names:
                return Violation(where, f"unknown symbol {symbol!r}")
    try:
        tuple(TopologicalSorter(_dependencies(grammar)).static_order())
    except CycleError as e:
        return Violation("dependencies", f"cycle {' -> '.join(e.args[1])}")
    return None


def check_grammar(grammar):
    violation = validate(grammar)
    if violation is not None:
        logger.error("invalid grammar: %s", violation)
        raise InputError(f"invalid grammar: {violation}")
    return grammar


def bottom_up(grammar):
    """Nonterminals ordered so every rule only mentions earlier ones."""
    return list(TopologicalSorter(_dependencies(grammar)).static_order())


def size(grammar):
    """|V| + |T| + sum over productions of (1 + |rhs|)."""
    return len(grammar.nonterminals) + grammar.n_terminals + sum(1 + len(rhs) for _, rhs in grammar.productions)


def strip_useless(grammar):
    """Drop nonterminals that derive no word or are unreachable from the start symbol."""
    check_grammar(grammar)
    rules = grammar.rules()
    productive = set()
    for a in bottom_up(grammar):
        if any(all(isinstance(s, Terminal) or s in productive for s in rhs) for rhs in rules[a]):
            productive.add(a)
    kept_rules = [(lhs, rhs) for lhs, rhs in grammar.productions
                  if lhs in productive and all(isinstance(s, Terminal) or s in productive for s in rhs)]
    reachable = {grammar.start}
    frontier = [grammar.start]
    by_lhs = defaultdict(list)
    for lhs, rhs in kept_rules:
        by_lhs[lhs].append(rhs)
    while frontier:
        a = frontier.pop()
        for rhs in by_lhs[a]:
            for s in rhs:
                if isinstance(s, str) and s not in reachable:
                    reachable.add(s)
                    frontier.append(s)
    names = [a for a in grammar.nonterminals if a in reachable]
    return AcyclicCFG.make(names, grammar.n_terminals, grammar.start,
                           [(lhs, rhs) for lhs, rhs in kept_rules if lhs in reachable])


def languages(grammar, max_len, max_terms=None):
    """{nonterminal: set of derivable words of length <= max_len}."""
    check_grammar(grammar)
    cap = config.resolve(max_terms, config.MAX_TERMS)
    rules = grammar.rules()
    table = {}

    def words_of(symbol):
        return {(symbol.index,)} if isinstance(symbol, Terminal) else table[symbol]

    for a in bottom_up(grammar):
        found = set()
        for rhs in rules[a]:
            if not rhs:
                found.add(())
            elif len(rhs) == 1:
                found |= words_of(rhs[0])
            else:
                for u in words_of(rhs[0]):
                    for v in words_of(rhs[1]):
                        if len(u) + len(v) <= max_len:
                            found.add(u + v)
            check_cap(len(found), cap, f"language of {a}")
        table[a] = {w for w in found if len(w) <= max_len}
    return table


def language(grammar, max_len=None, max_terms=None):
    max_len = config.resolve(max_len, config.MAX_DEGREE)
    return languages(grammar, max_len, max_terms)[grammar.start]


def count_derivations(grammar, word):
    """Number of derivation trees of ``word`` from the start symbol."""
    check_grammar(grammar)
    word = tuple(word)
    n = len(word)
    rules = grammar.rules()
    counts = {}

    def count(symbol, i, j):
        if isinstance(symbol, Terminal):
            return 1 if j == i + 1 and word[i] == symbol.index else 0
        return counts[(symbol, i, j)]

    spans = [(i, j) for i in range(n + 1) for j in range(i, n + 1)]
    for a in bottom_up(grammar):
        for i, j in spans:
            total = 0
            for rhs in rules[a]:
                if not rhs:
                    total += 1 if i == j else 0
                elif len(rhs) == 1:
                    total += count(rhs[0], i, j)
                else:
                    total += sum(count(rhs[0], i, m) * count(rhs[1], m, j) for m in range(i, j + 1))
            counts[(a, i, j)] = total
    return counts[(grammar.start, 0, n)]


def is_unambiguous(grammar, max_len=None):
    """Every word of the language has exactly one derivation tree."""
    return all(count_derivations(grammar, w) == 1 for w in language(grammar, max_len))


def circuit_to_cfg(circuit):
    """Grammar whose language is the monomial set of a monotone circuit.

    Gate g becomes nonterminal A<g>: inputs give A -> x, positive constants
    A -> eps, sums A -> B | C and products A -> B C.
    """
    circuit = circuit_mod.monotone_form(circuit)
    out = f"A{circuit.output}"
    if circuit_mod.is_zero_circuit(circuit):
        return AcyclicCFG.make([out], circuit.n_vars, out, [])
    names = [f"A{g}" for g in range(len(circuit.gates))]
    productions = []
    for g, gate in enumerate(circuit.gates):
        if isinstance(gate, Input):
            productions.append((names[g], (Terminal(gate.var),)))
        elif isinstance(gate, Const):
            productions.append((names[g], ()))
        elif isinstance(gate, Add):
            productions.append((names[g], (names[gate.l],)))
            productions.append((names[g], (names[gate.r],)))
        else:
            productions.append((names[g], (names[gate.l], names[gate.r])))
    return check_grammar(AcyclicCFG.make(names, circuit.n_vars, out, productions))


def cfg_to_circuit(grammar):
    """Circuit whose coefficient of m is the number of derivation trees of m.

    A grammar with an empty language maps to the constant-zero circuit.
    """
    grammar = strip_useless(grammar)
    rules = grammar.rules()
    builder = CircuitBuilder(grammar.n_terminals, RATIONALS)
    gate_of = {}

    def symbol_gate(symbol):
        return builder.input(symbol.index) if isinstance(symbol, Terminal) else gate_of[symbol]

    for a in bottom_up(grammar):
        terms = []
        for rhs in rules[a]:
            terms.append(builder.product_of([symbol_gate(s) for s in rhs]) if rhs else builder.const(1))
        if terms:
            gate_of[a] = builder.sum_of(terms)
    result = builder.build(gate_of.get(grammar.start))
    logger.debug("grammar of size %d -> circuit of %d gates", size(grammar), len(result.gates))
    return result


def _palindromes(n, productions, names):
    """P<k> derives w w^r for |w| = k."""
    for k in range(1, n + 1):
        names.append(f"P{k}")
        for i in range(n):
            x = Terminal(i)
            if k == 1:
                productions.append((f"P{k}", (x, x)))
            else:
                names.append(f"M{k}_{i}")
                productions.append((f"P{k}", (x, f"M{k}_{i}")))
                productions.append((f"M{k}_{i}", (f"P{k - 1}", x)))


def _any_words(n, productions, names):
    """Z<k> derives every word of length k."""
    names.append("X")
    productions.extend(("X", (Terminal(i),)) for i in range(n))
    for k in range(1, n + 1):
        names.append(f"Z{k}")
        productions.append((f"Z{k}", ("X",) if k == 1 else ("X", f"Z{k - 1}")))


def _build(n, palindrome_first):
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    names, productions = ["S"], []
    _any_words(n, productions, names)
    _palindromes(n, productions, names)
    rhs = (f"P{n}", f"Z{n}") if palindrome_first else (f"Z{n}", f"P{n}")
    productions.append(("S", rhs))
    return check_grammar(AcyclicCFG.make(names, n, "S", productions))


def build_L1_grammar(n):
    """Unambiguous grammar for { z w w^r : |z| = |w| = n } over n letters."""
    return _build(n, palindrome_first=False)


def build_L2_grammar(n):
    """Unambiguous grammar for { w w^r z : |z| = |w| = n } over n letters."""
    return _build(n, palindrome_first=True)


def intersect_bruteforce(left, right, max_len=None, max_terms=None):
    if left.n_terminals != right.n_terminals:
        raise InputError(f"terminal counts differ: {left.n_terminals} vs {right.n_terminals}")
    return language(left, max_len, max_terms) & language(right, max_len, max_terms)
