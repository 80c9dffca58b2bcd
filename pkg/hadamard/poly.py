"""Sparse polynomials: noncommutative (words) and commutative (exponent vectors).

Both kinds store a finite map monomial -> nonzero coefficient and never keep
explicit zeros. Terms are listed in a canonical order (degree first, then
lexicographic) so printing, serialization and witnesses are deterministic.
"""

import logging
from fractions import Fraction
from types import MappingProxyType

from . import config
from .errors import FieldMismatchError, InputError, ResourceCapError
from .scalar import RATIONALS, RationalField

logger = logging.getLogger(__name__)


class _SparsePoly:
    """Shared machinery; subclasses fix the monomial type."""

    __slots__ = ("n_vars", "field", "_terms")

    def __init__(self, n_vars, field=RATIONALS, terms=None):
        if not isinstance(n_vars, int) or n_vars < 0:
            raise InputError(f"variable count must be a nonnegative integer, got {n_vars!r}")
        self.n_vars = n_vars
        self.field = field
        clean = {}
        for monomial, coeff in (terms or {}).items():
            monomial = self._check_monomial(monomial)
            value = field(coeff)
            if monomial in clean:
                value = clean[monomial] + value
            if value:
                clean[monomial] = value
            else:
                clean.pop(monomial, None)
        self._terms = clean

    @classmethod
    def _from_clean(cls, n_vars, field, terms):
        poly = cls.__new__(cls)
        poly.n_vars = n_vars
        poly.field = field
        poly._terms = terms
        return poly

    # constructors

    @classmethod
    def zero(cls, n_vars, field=RATIONALS):
        return cls._from_clean(n_vars, field, {})

    @classmethod
    def constant(cls, n_vars, value, field=RATIONALS):
        return cls(n_vars, field, {cls._unit(n_vars): value})

    # structure

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def items(self):
        """(monomial, coefficient) pairs in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: self._order_key(kv[0]))

    def monomials(self):
        return [m for m, _ in self.items()]

    def coefficient(self, monomial):
        return self._terms.get(self._check_monomial(monomial), self.field.zero)

    def mon_set(self):
        return frozenset(self._terms)

    @property
    def degree(self):
        """Largest monomial degree; -1 for the zero polynomial."""
        return max((self._degree(m) for m in self._terms), default=-1)

    def is_homogeneous(self):
        return len({self._degree(m) for m in self._terms}) <= 1

    def homogeneous_part(self, k):
        if k < 0:
            raise InputError(f"degree must be >= 0, got {k}")
        return self._from_clean(self.n_vars, self.field,
                                {m: c for m, c in self._terms.items() if self._degree(m) == k})

    def homogeneous_parts(self):
        """{degree: part} for every degree that occurs."""
        parts = {}
        for m, c in self._terms.items():
            parts.setdefault(self._degree(m), {})[m] = c
        return {k: self._from_clean(self.n_vars, self.field, t) for k, t in sorted(parts.items())}

    # arithmetic

    def _compatible(self, other):
        if type(other) is not type(self):
            raise InputError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n_vars != self.n_vars:
            raise InputError(f"variable counts differ: {self.n_vars} vs {other.n_vars}")
        if other.field != self.field:
            raise FieldMismatchError(f"fields differ: {self.field} vs {other.field}")

    def __add__(self, other):
        self._compatible(other)
        terms = dict(self._terms)
        for m, c in other._terms.items():
            value = terms[m] + c if m in terms else c
            if value:
                terms[m] = value
            else:
                terms.pop(m, None)
        return self._from_clean(self.n_vars, self.field, terms)

    def __neg__(self):
        return self._from_clean(self.n_vars, self.field, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value):
        value = self.field(value)
        if not value:
            return self.zero(self.n_vars, self.field)
        return self._from_clean(self.n_vars, self.field, {m: c * value for m, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, _SparsePoly):
            return self.scale(other)
        return self.multiply(other)

    def __rmul__(self, other):
        return self.scale(other)

    def multiply(self, other, max_terms=None):
        self._compatible(other)
        cap = config.resolve(max_terms, config.MAX_TERMS)
        terms = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = self._concat(m1, m2)
                value = terms[m] + c1 * c2 if m in terms else c1 * c2
                if value:
                    terms[m] = value
                else:
                    del terms[m]
            if len(terms) > cap:
                raise ResourceCapError(f"product has more than {cap} terms")
        return self._from_clean(self.n_vars, self.field, terms)

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise InputError(f"exponent must be a nonnegative integer, got {exponent!r}")
        result = self.constant(self.n_vars, self.field.one, self.field)
        for _ in range(exponent):
            result = result.multiply(self)
        return result

    def hadamard(self, other):
        """Coefficient-wise product: (f o g)(m) = f(m) g(m)."""
        self._compatible(other)
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        terms = {}
        for m, c in small._terms.items():
            if m in large._terms:
                value = c * large._terms[m] if small is self else large._terms[m] * c
                if value:
                    terms[m] = value
        return self._from_clean(self.n_vars, self.field, terms)

    def evaluate(self, point):
        if len(point) != self.n_vars:
            raise InputError(f"point has {len(point)} coordinates, polynomial has {self.n_vars} variables")
        values = [self.field(v) for v in point]
        total = self.field.zero
        for m, c in self._terms.items():
            total = total + c * self._evaluate_monomial(m, values)
        return total

    # comparison / display

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.n_vars == other.n_vars and self.field == other.field and self._terms == other._terms

    def __hash__(self):
        return hash((type(self).__name__, self.n_vars, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{self._show(m)}" for m, c in self.items())


class NCPoly(_SparsePoly):
    """Polynomial in noncommuting variables; monomials are words (tuples of indices)."""

    __slots__ = ()

    @staticmethod
    def _unit(n_vars):
        return ()

    def _check_monomial(self, word):
        word = tuple(word)
        for i in word:
            if not isinstance(i, int) or not 0 <= i < self.n_vars:
                raise InputError(f"variable index {i!r} outside [0, {self.n_vars})")
        return word

    @staticmethod
    def _degree(word):
        return len(word)

    @staticmethod
    def _order_key(word):
        return (len(word), word)

    @staticmethod
    def _concat(w1, w2):
        return w1 + w2

    def _evaluate_monomial(self, word, values):
        result = self.field.one
        for i in word:
            result = result * values[i]
        return result

    @staticmethod
    def _show(word):
        return "".join(f"x{i}" for i in word) or "1"

    @classmethod
    def variable(cls, n_vars, index, field=RATIONALS):
        return cls(n_vars, field, {(index,): 1})

    @classmethod
    def monomial(cls, n_vars, word, coeff=1, field=RATIONALS):
        return cls(n_vars, field, {tuple(word): coeff})


class CPoly(_SparsePoly):
    """Commutative polynomial; monomials are exponent vectors of length n_vars."""

    __slots__ = ()

    @staticmethod
    def _unit(n_vars):
        return (0,) * n_vars

    def _check_monomial(self, exponents):
        exponents = tuple(exponents)
        if len(exponents) != self.n_vars:
            raise InputError(f"exponent vector {exponents!r} has length {len(exponents)}, expected {self.n_vars}")
        if any(not isinstance(e, int) or e < 0 for e in exponents):
            raise InputError(f"exponents must be nonnegative integers: {exponents!r}")
        return exponents

    @staticmethod
    def _degree(exponents):
        return sum(exponents)

    @staticmethod
    def _order_key(exponents):
        return (sum(exponents), tuple(-e for e in exponents))

    @staticmethod
    def _concat(e1, e2):
        return tuple(a + b for a, b in zip(e1, e2))

    def _evaluate_monomial(self, exponents, values):
        result = self.field.one
        for v, e in zip(values, exponents):
            if e:
                result = result * v ** e
        return result

    @staticmethod
    def _show(exponents):
        parts = [f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exponents) if e]
        return "".join(parts) or "1"

    def is_multilinear(self):
        return all(e <= 1 for m in self._terms for e in m)

    @classmethod
    def variable(cls, n_vars, index, field=RATIONALS):
        return cls.multilinear(n_vars, (index,), 1, field)

    @classmethod
    def monomial(cls, n_vars, exponents, coeff=1, field=RATIONALS):
        return cls(n_vars, field, {tuple(exponents): coeff})

    @classmethod
    def multilinear(cls, n_vars, support, coeff=1, field=RATIONALS):
        return cls(n_vars, field, {multilinear_monomial(n_vars, support): coeff})


def multilinear_monomial(n_vars, support):
    """Exponent vector with a 1 at each index of ``support``."""
    support = set(support)
    if any(not isinstance(i, int) or not 0 <= i < n_vars for i in support):
        raise InputError(f"support {sorted(support)!r} outside [0, {n_vars})")
    return tuple(1 if i in support else 0 for i in range(n_vars))


def support_of(exponents):
    return tuple(i for i, e in enumerate(exponents) if e)


def hadamard(f, g):
    return f.hadamard(g)


def mon_set(f):
    return f.mon_set()


def homogeneous_part(f, k):
    return f.homogeneous_part(k)


def evaluate(f, point):
    return f.evaluate(point)


def corr(f, g):
    """|sum_m f(m) g(m)| for rational polynomials (conjugation is the identity on Q)."""
    f._compatible(g)
    if not isinstance(f.field, RationalField):
        raise InputError(f"correlation is defined for rational coefficients, got {f.field}")
    small, large = (f, g) if len(f) <= len(g) else (g, f)
    total = Fraction(0)
    for m, c in small.terms.items():
        other = large.terms.get(m)
        if other is not None:
            total += c * other
    return abs(total)


def norm_sq(f):
    return corr(f, f)
