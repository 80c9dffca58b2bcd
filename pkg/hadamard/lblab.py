"""Desk-scale experiments with the explicit +/-1 polynomial F.

The n = t * p variables are split into t blocks of p. A multilinear monomial
m gives one element y_i(m) of F_{2^p} per block (its characteristic bits on
the block), and F(m) = psi(y_1(m) * ... * y_t(m)). F' = (F + 1) / 2 is the
monotone 0/1 companion.

Everything here is exact; asymptotic bounds are measured and reported, never
asserted.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations, permutations, product
from math import ceil, prod
from typing import FrozenSet

import numpy as np
from sympy import isprime

from . import config
from .errors import InputError, ResourceCapError, check_cap
from .poly import CPoly, corr, multilinear_monomial, norm_sq, support_of
from .scalar import RATIONALS, encode_bits, extension_field, psi

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplicitParams:
    t: int
    p: int

    def __post_init__(self):
        if not isinstance(self.t, int) or self.t < 1:
            raise InputError(f"block count t must be >= 1, got {self.t!r}")
        if not isinstance(self.p, int) or not isprime(self.p):
            raise InputError(f"block size p must be a prime, got {self.p!r}")

    @property
    def n(self):
        return self.t * self.p

    @cached_property
    def field(self):
        return extension_field(2, self.p)

    def block(self, i):
        """Variable indices of block i (0-based)."""
        return range(i * self.p, (i + 1) * self.p)


def _exponents(m, params):
    m = tuple(m)
    if len(m) != params.n:
        raise InputError(f"monomial has {len(m)} exponents, expected {params.n}")
    if any(e not in (0, 1) for e in m):
        raise InputError(f"monomial {m!r} is not multilinear")
    return m


def y_vector(m, params):
    """(y_1(m), ..., y_t(m)); y_i(m) = 0 iff m misses block i."""
    m = _exponents(m, params)
    return tuple(encode_bits(m[i * params.p:(i + 1) * params.p], params.field) for i in range(params.t))


def F_coeff(m, params):
    ys = y_vector(m, params)
    return psi(reduce(lambda a, b: a * b, ys))


def _monomials(n):
    return product((0, 1), repeat=n)


def build_F(params, threads=None, max_terms=None):
    """Dense multilinear F with +/-1 coefficients on all 2^n monomials."""
    check_cap(2 ** params.n, config.resolve(max_terms, config.MAX_TERMS), "explicit polynomial")
    threads = config.resolve(threads, config.THREADS)
    monomials = list(_monomials(params.n))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        coeffs = list(pool.map(lambda m: F_coeff(m, params), monomials, chunksize=256))
    logger.info("built F for t=%d, p=%d (%d monomials)", params.t, params.p, len(monomials))
    return CPoly(params.n, RATIONALS, dict(zip(monomials, coeffs)))


def build_F_prime(params, F=None, threads=None, max_terms=None):
    """F' = (F + 1) / 2, coefficients in {0, 1}."""
    F = F if F is not None else build_F(params, threads, max_terms)
    return CPoly(params.n, RATIONALS, {m: 1 for m, c in F.terms.items() if c == 1})


def sum_coeffs(poly):
    total = sum(poly.terms.values(), Fraction(0))
    return int(total) if total.denominator == 1 else total


def count_plus_one(params, F=None):
    """#{m : F(m) = 1}, which equals Corr(F, F')."""
    F = F if F is not None else build_F(params)
    return sum(1 for c in F.terms.values() if c == 1)


@dataclass(frozen=True)
class ProductPoly:
    A: FrozenSet[int]
    B: FrozenSet[int]
    g: CPoly
    h: CPoly
    eps: Fraction

    def materialize(self):
        return self.g.multiply(self.h)


def make_product_poly(A, B, g, h, eps):
    """An eps-product polynomial g * h with g over A and h over B."""
    A, B, eps = frozenset(A), frozenset(B), Fraction(eps)
    if g.n_vars != h.n_vars:
        raise InputError(f"variable counts differ: {g.n_vars} vs {h.n_vars}")
    n = g.n_vars
    if A & B:
        raise InputError(f"variable sets overlap in {sorted(A & B)}")
    if any(not 0 <= v < n for v in A | B):
        raise InputError(f"variable sets leave [0, {n})")
    need = ceil(eps * n)
    if len(A) < need or len(B) < need:
        raise InputError(f"|A| = {len(A)} and |B| = {len(B)} must both be >= ceil({eps} * {n}) = {need}")
    for name, poly, allowed in (("g", g, A), ("h", h, B)):
        stray = {v for m in poly.terms for v in support_of(m)} - allowed
        if stray:
            raise InputError(f"{name} mentions variables {sorted(stray)} outside its set")
    return ProductPoly(A, B, g, h, eps)


def corr_F_vs(f, params, F=None):
    """(Corr(F, f), Corr(F, f)^2 / (|F|^2 |f|^2)); the ratio is 0 for f = 0."""
    F = F if F is not None else build_F(params)
    value = corr(F, f)
    denominator = norm_sq(F) * norm_sq(f)
    return value, (value * value / denominator if denominator else Fraction(0))


def exp_sum(sets, z, max_terms=None):
    """sum over y_1 in A_1, ..., y_s in A_s of psi(z * y_1 * ... * y_s)."""
    sets = [list(s) for s in sets]
    check_cap(prod(len(s) for s in sets), config.resolve(max_terms, config.MAX_TERMS), "exponential sum")
    total = 0
    for ys in product(*sets):
        total += psi(reduce(lambda a, b: a * b, ys, z))
    return total


def exp_sum_samples(p, s, samples, seed=None):
    """Exponential sums over seeded random subsets; rows of sizes, value and |value| / prod |A_i|."""
    seed = config.resolve(seed, config.SEED)
    field = extension_field(2, p)
    elements = list(field.elements())
    rows = []
    for index in range(samples):
        rng = np.random.default_rng([seed, index])
        sets = []
        for _ in range(s):
            mask = rng.integers(2, size=len(elements))
            chosen = [e for e, keep in zip(elements, mask) if keep] or [elements[int(rng.integers(1, len(elements)))]]
            sets.append(chosen)
        z = elements[int(rng.integers(1, len(elements)))]
        value = exp_sum(sets, z)
        size = prod(len(a) for a in sets)
        rows.append({"sample": index, "sizes": [len(a) for a in sets], "z": field.format(z),
                     "value": value, "ratio": Fraction(abs(value), size)})
    return rows


def is_suitable_restriction(x_kept, x_fixed, m_fixed, params):
    """Every block with at least half its variables fixed meets the fixed monomial."""
    x_kept, x_fixed, m_fixed = set(x_kept), set(x_fixed), set(m_fixed)
    if x_kept & x_fixed or x_kept | x_fixed != set(range(params.n)):
        raise InputError("the two variable sets must partition the variables")
    if not m_fixed <= x_fixed:
        raise InputError("the fixed monomial must use fixed variables only")
    for i in range(params.t):
        block = set(params.block(i))
        if 2 * len(block & x_fixed) >= params.p and not block & m_fixed:
            return False
    return True


def restrict_F(params, x_kept, m_fixed):
    """The polynomial m' -> F(m' m'') over the kept variables."""
    x_kept, m_fixed = sorted(set(x_kept)), set(m_fixed)
    if m_fixed & set(x_kept):
        raise InputError("the fixed monomial must avoid the kept variables")
    check_cap(2 ** len(x_kept), config.resolve(None, config.MAX_TERMS), "restricted polynomial")
    terms = {}
    for r in range(len(x_kept) + 1):
        for chosen in combinations(x_kept, r):
            m = multilinear_monomial(params.n, set(chosen) | m_fixed)
            terms[multilinear_monomial(params.n, chosen)] = F_coeff(m, params)
    return CPoly(params.n, RATIONALS, terms)


def _random_multilinear(n, variables, rng):
    terms = {}
    for r in range(len(variables) + 1):
        for chosen in combinations(sorted(variables), r):
            c = int(rng.integers(-1, 2))
            if c:
                terms[multilinear_monomial(n, chosen)] = c
    return CPoly(n, RATIONALS, terms)


def random_product_poly(n, rng, eps=Fraction(1, 3)):
    need = ceil(Fraction(eps) * n)
    if 2 * need > n:
        raise InputError(f"no {eps}-product split of {n} variables")
    order = [int(v) for v in rng.permutation(n)]
    cut = int(rng.integers(need, n - need + 1))
    A, B = order[:cut], order[cut:]
    return make_product_poly(A, B, _random_multilinear(n, A, rng), _random_multilinear(n, B, rng), eps)


def product_battery(params, trials, seed=None, eps=Fraction(1, 3), F=None, threads=None):
    """Correlations of F against f1 o f2 for seeded random eps-product polynomials f1, f2."""
    seed = config.resolve(seed, config.SEED)
    threads = config.resolve(threads, config.THREADS)
    F = F if F is not None else build_F(params, threads)

    def one(index):
        rng = np.random.default_rng([seed, index])
        f1 = random_product_poly(params.n, rng, eps)
        f2 = random_product_poly(params.n, rng, eps)
        target = f1.materialize().hadamard(f2.materialize())
        value, ratio = corr_F_vs(target, params, F)
        return {"trial": index, "A1": len(f1.A), "A2": len(f2.A), "terms": len(target),
                "corr": value, "ratio": ratio}

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(one, range(trials)))


def _variable(n, i, j):
    return i * n + j


def permanent_hadamard(n, max_n=None):
    """(f, g) with f = prod_i sum_j x_ij and g = prod_j sum_i x_ij; f o g is the permanent."""
    max_n = config.resolve(max_n, config.PERM_MAX_N)
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    if n > max_n:
        raise ResourceCapError(f"permanent construction capped at n = {max_n}, got {n}")
    size = n * n
    one = CPoly.constant(size, 1)
    f, g = one, one
    for i in range(n):
        f = f * CPoly(size, RATIONALS, {multilinear_monomial(size, [_variable(n, i, j)]): 1 for j in range(n)})
    for j in range(n):
        g = g * CPoly(size, RATIONALS, {multilinear_monomial(size, [_variable(n, i, j)]): 1 for i in range(n)})
    return f, g


def permanent_polynomial(n):
    """sum over permutations s of prod_i x_{i s(i)}."""
    size = n * n
    return CPoly(size, RATIONALS, {multilinear_monomial(size, [_variable(n, i, s[i]) for i in range(n)]): 1
                                   for s in permutations(range(n))})


def ryser_permanent(matrix):
    """Exact permanent by Ryser's inclusion-exclusion formula."""
    rows = [[Fraction(v) for v in r] for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("the permanent needs a square matrix")
    total = Fraction(0)
    for r in range(1, n + 1):
        for cols in combinations(range(n), r):
            total += (-1) ** (n - r) * prod(sum(row[j] for j in cols) for row in rows)
    return total if n else Fraction(1)
