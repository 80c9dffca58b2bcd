"""Exact scalar fields: the rationals, prime fields F_p and extension fields F_{p^k}.

Rationals are plain :class:`fractions.Fraction` values. Prime field and
extension field elements are small immutable objects that remember the field
they belong to, so mixing operands from different fields fails loudly instead
of silently reducing modulo the wrong prime.

Extension fields use the polynomial basis over the smallest irreducible monic
modulus (read as a base-p integer, low degree coefficient least significant).
Polynomial arithmetic in F_p[x] is delegated to ``sympy.polys.galoistools``,
which works on dense coefficient lists, high degree first.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import ClassVar, Tuple

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcdex, gf_mul, gf_rem, gf_strip

from .errors import FieldMismatchError, InputError

logger = logging.getLogger(__name__)


def _plain_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_fraction(text):
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not an exact scalar: {text!r}") from e


@dataclass(frozen=True)
class RationalField:
    """The field Q. Elements are ``Fraction`` instances (ints are accepted)."""

    kind: ClassVar[str] = "Q"
    is_finite: ClassVar[bool] = False
    order: ClassVar[None] = None
    characteristic: ClassVar[int] = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if _plain_int(value):
            return Fraction(value)
        if isinstance(value, str):
            return _parse_fraction(value)
        raise FieldMismatchError(f"{value!r} is not an element of Q")

    def parse(self, text):
        return self(_parse_fraction(text))

    def format(self, value):
        return str(self(value))

    def descriptor(self):
        return {"kind": "Q"}

    def __str__(self):
        return "Q"


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int
    kind: ClassVar[str] = "Fp"
    is_finite: ClassVar[bool] = True

    def __post_init__(self):
        if not _plain_int(self.p) or not isprime(self.p):
            raise InputError(f"F_p needs a prime modulus, got {self.p!r}")

    @property
    def characteristic(self):
        return self.p

    @property
    def order(self):
        return self.p

    @property
    def zero(self):
        return PrimeFieldElement(0, self)

    @property
    def one(self):
        return PrimeFieldElement(1, self)

    def __call__(self, value):
        if isinstance(value, PrimeFieldElement):
            if value.field != self:
                raise FieldMismatchError(f"{value!r} does not belong to {self}")
            return value
        if _plain_int(value):
            return PrimeFieldElement(value % self.p, self)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"{value} has no image in {self}")
            return PrimeFieldElement(value.numerator * pow(value.denominator, -1, self.p) % self.p, self)
        if isinstance(value, str):
            return self(_parse_fraction(value))
        raise FieldMismatchError(f"{value!r} is not an element of {self}")

    def parse(self, text):
        return self(_parse_fraction(text))

    def format(self, value):
        return str(self(value).value)

    def elements(self):
        return (PrimeFieldElement(v, self) for v in range(self.p))

    def random(self, rng):
        return PrimeFieldElement(int(rng.integers(self.p)), self)

    def descriptor(self):
        return {"kind": "Fp", "p": self.p}

    def __str__(self):
        return f"F_{self.p}"


@dataclass(frozen=True, eq=False)
class PrimeFieldElement:
    value: int
    field: PrimeField

    def _lift(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if _plain_int(other):
            return other % self.field.p
        raise FieldMismatchError(f"cannot combine {self.field} element with {other!r}")

    def _new(self, value):
        return PrimeFieldElement(value % self.field.p, self.field)

    def __add__(self, other):
        return self._new(self.value + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.value - self._lift(other))

    def __rsub__(self, other):
        return self._new(self._lift(other) - self.value)

    def __mul__(self, other):
        return self._new(self.value * self._lift(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        return self._new(pow(self.value, -1, self.field.p))

    def __truediv__(self, other):
        return self * self.field(other).inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** -exponent
        return self._new(pow(self.value, exponent, self.field.p))

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.field == other.field and self.value == other.value
        if _plain_int(other):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"

    __str__ = __repr__


def _dense(coeffs):
    """Low-degree-first tuple -> stripped galoistools list (high degree first)."""
    return gf_strip([int(c) for c in reversed(coeffs)])


def _sparse(dense, k):
    """galoistools list -> low-degree-first tuple padded to length k."""
    low = [int(c) for c in reversed(dense)]
    return tuple(low + [0] * (k - len(low)))


def is_irreducible(coeffs, p):
    """Exhaustive trial division of a polynomial over F_p (low degree first).

    Tries every monic divisor of degree 1..deg/2; a polynomial of degree <= 0
    is not irreducible.
    """
    f = _dense([c % p for c in coeffs])
    degree = len(f) - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for tail in product(range(p), repeat=d):
            divisor = [1] + list(reversed(tail))
            if not gf_rem(f, divisor, p, ZZ):
                return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(p, k):
    """Smallest monic irreducible polynomial of degree k over F_p.

    Candidates x^k + c_{k-1}x^{k-1} + ... + c_0 are scanned in increasing order
    of the base-p integer c_{k-1}...c_1c_0, so (2, 1) gives x, (2, 2) gives
    x^2+x+1, (2, 3) gives x^3+x+1 and (3, 2) gives x^2+1. Returned as a
    coefficient tuple, low degree first, including the leading 1.
    """
    if not _plain_int(p) or not isprime(p):
        raise InputError(f"p must be prime, got {p!r}")
    if not _plain_int(k) or k < 1:
        raise InputError(f"degree must be >= 1, got {k!r}")
    for index in range(p ** k):
        digits = [(index // p ** j) % p for j in range(k)]
        candidate = tuple(digits) + (1,)
        if is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")


@dataclass(frozen=True)
class ExtensionField:
    """F_{p^k} = F_p[x]/(modulus), modulus given low degree first and monic."""

    p: int
    k: int
    modulus: Tuple[int, ...]
    kind: ClassVar[str] = "Fpk"
    is_finite: ClassVar[bool] = True

    def __post_init__(self):
        if not _plain_int(self.p) or not isprime(self.p):
            raise InputError(f"F_(p^k) needs a prime p, got {self.p!r}")
        if not _plain_int(self.k) or self.k < 1:
            raise InputError(f"extension degree must be >= 1, got {self.k!r}")
        modulus = tuple(int(c) for c in self.modulus)
        object.__setattr__(self, "modulus", modulus)
        if len(modulus) != self.k + 1 or modulus[-1] != 1:
            raise InputError(f"modulus must be monic of degree {self.k}: {list(modulus)}")
        if any(not 0 <= c < self.p for c in modulus):
            raise InputError(f"modulus coefficients must lie in [0, {self.p}): {list(modulus)}")
        if not is_irreducible(modulus, self.p):
            raise InputError(f"modulus {list(modulus)} is reducible over F_{self.p}")

    @property
    def characteristic(self):
        return self.p

    @property
    def order(self):
        return self.p ** self.k

    @property
    def base(self):
        return PrimeField(self.p)

    @property
    def zero(self):
        return ExtFieldElement((0,) * self.k, self)

    @property
    def one(self):
        return ExtFieldElement((1,) + (0,) * (self.k - 1), self)

    def _dense_modulus(self):
        return _dense(self.modulus)

    def __call__(self, value):
        if isinstance(value, ExtFieldElement):
            if value.field != self:
                raise FieldMismatchError(f"{value!r} does not belong to {self}")
            return value
        if isinstance(value, PrimeFieldElement):
            if value.field.p != self.p:
                raise FieldMismatchError(f"cannot embed {value.field} into {self}")
            return self(value.value)
        if _plain_int(value):
            return ExtFieldElement((value % self.p,) + (0,) * (self.k - 1), self)
        if isinstance(value, Fraction):
            return self(self.base(value))
        if isinstance(value, (list, tuple)):
            if len(value) != self.k or not all(_plain_int(c) for c in value):
                raise InputError(f"{self} elements are {self.k} integer coefficients, got {value!r}")
            return ExtFieldElement(tuple(c % self.p for c in value), self)
        if isinstance(value, str):
            return self(_parse_fraction(value))
        raise FieldMismatchError(f"{value!r} is not an element of {self}")

    def parse(self, value):
        return self(value)

    def format(self, value):
        return list(self(value).coeffs)

    def elements(self):
        return (ExtFieldElement(c, self) for c in product(range(self.p), repeat=self.k))

    def random(self, rng):
        return ExtFieldElement(tuple(int(v) for v in rng.integers(self.p, size=self.k)), self)

    def descriptor(self):
        return {"kind": "Fpk", "p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __str__(self):
        return f"F_{self.p}^{self.k}"


@dataclass(frozen=True, eq=False)
class ExtFieldElement:
    coeffs: Tuple[int, ...]
    field: ExtensionField

    def _lift(self, other):
        if isinstance(other, ExtFieldElement) and other.field is self.field:
            return other
        return self.field(other)

    @property
    def components(self):
        """Coefficients as elements of the prime subfield, low degree first."""
        base = self.field.base
        return tuple(base(c) for c in self.coeffs)

    def __add__(self, other):
        other = self._lift(other)
        p = self.field.p
        return ExtFieldElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return ExtFieldElement(tuple(-a % p for a in self.coeffs), self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        field = self.field
        prod_ = gf_mul(_dense(self.coeffs), _dense(other.coeffs), field.p, ZZ)
        return ExtFieldElement(_sparse(gf_rem(prod_, field._dense_modulus(), field.p, ZZ), field.k), field)

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError(f"0 has no inverse in {self.field}")
        field = self.field
        s, _, _ = gf_gcdex(_dense(self.coeffs), field._dense_modulus(), field.p, ZZ)
        return ExtFieldElement(_sparse(s, field.k), field)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** -exponent
        result, base = self.field.one, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, ExtFieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        if _plain_int(other) or isinstance(other, PrimeFieldElement):
            try:
                return self == self.field(other)
            except FieldMismatchError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.coeffs))

    def __repr__(self):
        terms = [f"{c}x^{j}" if j else str(c) for j, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"

    __str__ = __repr__


@lru_cache(maxsize=None)
def extension_field(p, k):
    """F_{p^k} over the smallest irreducible modulus."""
    return ExtensionField(p, k, find_irreducible(p, k))


def trace(a):
    """Absolute trace a + a^p + ... + a^{p^{k-1}}, an element of F_p."""
    if isinstance(a, PrimeFieldElement):
        return a
    if not isinstance(a, ExtFieldElement):
        raise InputError(f"trace needs a finite field element, got {a!r}")
    field = a.field
    total, conjugate = a, a
    for _ in range(field.k - 1):
        conjugate = conjugate ** field.p
        total = total + conjugate
    if any(total.coeffs[1:]):
        raise AssertionError(f"trace of {a!r} left the prime field: {total!r}")
    return field.base(total.coeffs[0])


def psi(a):
    """The trace character (-1)^Tr(a) of a characteristic-2 field."""
    field = getattr(a, "field", None)
    if field is None or field.characteristic != 2:
        raise InputError(f"psi is defined on fields of characteristic 2, got {a!r}")
    return -1 if trace(a).value else 1


def encode_bits(bits, field):
    """Bit vector of length k -> element of F_{2^k} with those coefficients."""
    if not isinstance(field, ExtensionField) or field.p != 2:
        raise InputError(f"encode_bits needs a field F_2^k, got {field}")
    bits = tuple(bits)
    if len(bits) != field.k:
        raise InputError(f"expected {field.k} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise InputError(f"not a bit vector: {bits!r}")
    return ExtFieldElement(tuple(int(b) for b in bits), field)


def decode_bits(a):
    if not isinstance(a, ExtFieldElement) or a.field.p != 2:
        raise InputError(f"decode_bits needs an element of F_2^k, got {a!r}")
    return tuple(a.coeffs)


RATIONALS = RationalField()


def field_from_descriptor(descriptor):
    """``{"kind": "Q"}``, ``{"kind": "Fp", "p": 5}`` or ``{"kind": "Fpk", ...}``."""
    if not isinstance(descriptor, dict):
        raise InputError(f"field descriptor must be an object, got {descriptor!r}")
    kind = descriptor.get("kind")
    try:
        if kind == "Q":
            return RATIONALS
        if kind == "Fp":
            return PrimeField(int(descriptor["p"]))
        if kind == "Fpk":
            p, k = int(descriptor["p"]), int(descriptor["k"])
            if descriptor.get("modulus") is None:
                return extension_field(p, k)
            return ExtensionField(p, k, tuple(descriptor["modulus"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad field descriptor {descriptor!r}: {e}") from e
    raise InputError(f"unknown field kind {kind!r}")


def parse_field_spec(text):
    """CLI form of a field: ``q``, ``fp:<p>`` or ``fpk:<p>:<k>``."""
    parts = text.strip().lower().split(":")
    try:
        if parts == ["q"]:
            return RATIONALS
        if parts[0] == "fp" and len(parts) == 2:
            return PrimeField(int(parts[1]))
        if parts[0] == "fpk" and len(parts) == 3:
            return extension_field(int(parts[1]), int(parts[2]))
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad field spec {text!r}") from e
    raise InputError(f"bad field spec {text!r}; use q, fp:<p> or fpk:<p>:<k>")


def extension_for(field, min_size):
    """Smallest field F_{q^k} (k >= 1) over a prime field with q^k >= min_size.

    Extension fields are returned unchanged: embedding one extension into a
    larger one is not supported, so their own size is used.
    """
    if isinstance(field, PrimeField):
        k = 1
        while field.p ** k < min_size:
            k += 1
        return field if k == 1 else extension_field(field.p, k)
    if isinstance(field, ExtensionField):
        if field.order < min_size:
            logger.warning("%s has %d elements, fewer than the %d requested", field, field.order, min_size)
        return field
    raise InputError(f"{field} is not a finite field")


def embed(value, target):
    """Image of a scalar in ``target`` (F_p -> F_{p^k} embedding, or identity)."""
    if isinstance(value, PrimeFieldElement) and isinstance(target, ExtensionField):
        return target(value.value)
    return target(value)
