"""Dense exact matrices over a single field."""

import logging
from dataclasses import dataclass
from typing import Any, Tuple

from .errors import FieldMismatchError, InputError
from .scalar import RationalField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    field: Any
    entries: Tuple[Any, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError(f"bad shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise InputError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows, field):
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise InputError("ragged matrix rows")
        return cls(len(rows), n_cols, field, tuple(field(v) for r in rows for v in r))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, index):
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self):
        return not any(self.entries)

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        return add(self, other)


def _same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"matrix fields differ: {a.field} vs {b.field}")


def identity(n, field):
    one, zero = field.one, field.zero
    return Matrix(n, n, field, tuple(one if i == j else zero for i in range(n) for j in range(n)))


def zeros(rows, cols, field):
    return Matrix(rows, cols, field, (field.zero,) * (rows * cols))


def transpose(a):
    return Matrix(a.cols, a.rows, a.field, tuple(a[i, j] for j in range(a.cols) for i in range(a.rows)))


def add(a, b):
    _same_field(a, b)
    if a.shape != b.shape:
        raise InputError(f"cannot add {a.rows}x{a.cols} and {b.rows}x{b.cols}")
    return Matrix(a.rows, a.cols, a.field, tuple(x + y for x, y in zip(a.entries, b.entries)))


def scale(a, value):
    value = a.field(value)
    return Matrix(a.rows, a.cols, a.field, tuple(x * value for x in a.entries))


def matmul(a, b):
    _same_field(a, b)
    if a.cols != b.rows:
        raise InputError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    zero = a.field.zero
    out = []
    b_cols = [b.entries[j::b.cols] for j in range(b.cols)] if b.cols else []
    for i in range(a.rows):
        row = a.row(i)
        for col in b_cols:
            total = zero
            for x, y in zip(row, col):
                if x and y:
                    total = total + x * y
            out.append(total)
    return Matrix(a.rows, b.cols, a.field, tuple(out))


def hadamard_matrix(a, b):
    """Entrywise product."""
    _same_field(a, b)
    if a.shape != b.shape:
        raise InputError(f"Hadamard product needs equal shapes, got {a.shape} and {b.shape}")
    return Matrix(a.rows, a.cols, a.field, tuple(x * y for x, y in zip(a.entries, b.entries)))


def kron(a, b):
    _same_field(a, b)
    entries = []
    for i in range(a.rows):
        for k in range(b.rows):
            for j in range(a.cols):
                x = a[i, j]
                entries.extend(x * b[k, l] for l in range(b.cols))
    return Matrix(a.rows * b.rows, a.cols * b.cols, a.field, tuple(entries))


def _echelon(rows):
    """Row-reduce a list of lists in place; return the pivot columns."""
    pivots = []
    r = 0
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return pivots


def rank(a):
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(_echelon(a.to_rows()))


def _bareiss(rows, field):
    n = len(rows)
    sign = 1
    prev = field.one
    for k in range(n - 1):
        if not rows[k][k]:
            swap = next((i for i in range(k + 1, n) if rows[i][k]), None)
            if swap is None:
                return field.zero
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) / prev
        prev = rows[k][k]
    return rows[n - 1][n - 1] if sign > 0 else -rows[n - 1][n - 1]


def _gauss_det(rows, field):
    n = len(rows)
    result = field.one
    for k in range(n):
        pivot = next((i for i in range(k, n) if rows[i][k]), None)
        if pivot is None:
            return field.zero
        if pivot != k:
            rows[k], rows[pivot] = rows[pivot], rows[k]
            result = -result
        result = result * rows[k][k]
        inv = 1 / rows[k][k]
        for i in range(k + 1, n):
            if rows[i][k]:
                factor = rows[i][k] * inv
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[k])]
    return result


def det(a):
    """Exact determinant: fraction-free elimination over Q, plain Gauss otherwise."""
    if a.rows != a.cols:
        raise InputError(f"determinant of a non-square {a.rows}x{a.cols} matrix")
    if a.rows == 0:
        return a.field.one
    if isinstance(a.field, RationalField):
        return _bareiss(a.to_rows(), a.field)
    return _gauss_det(a.to_rows(), a.field)


class EchelonBasis:
    """Incrementally maintained basis of a span of vectors.

    Each stored vector has a distinct leading position and is zero at the
    leading positions of vectors stored before it, so reducing a new vector
    in insertion order leaves exactly its residue modulo the span.
    """

    def __init__(self, length, field):
        self.length = length
        self.field = field
        self._rows = []

    def __len__(self):
        return len(self._rows)

    def reduce(self, vector):
        vector = list(vector)
        if len(vector) != self.length:
            raise InputError(f"vector of length {len(vector)} in a span of length-{self.length} vectors")
        for lead, row in self._rows:
            factor = vector[lead]
            if factor:
                vector = [x - factor * y for x, y in zip(vector, row)]
        return vector

    def contains(self, vector):
        return not any(self.reduce(vector))

    def add(self, vector):
        """Add ``vector``; return False when it already lies in the span."""
        residue = self.reduce(vector)
        lead = next((i for i, v in enumerate(residue) if v), None)
        if lead is None:
            return False
        inv = 1 / residue[lead]
        self._rows.append((lead, [v * inv for v in residue]))
        return True


def _check_uniform(matrices):
    first = matrices[0]
    for m in matrices[1:]:
        _same_field(first, m)
        if m.shape != first.shape:
            raise InputError(f"matrix set mixes shapes {first.shape} and {m.shape}")


def basis_of_matrix_set(matrices):
    """Maximal linearly independent subsequence, first come first kept."""
    matrices = list(matrices)
    if not matrices:
        return []
    _check_uniform(matrices)
    first = matrices[0]
    span = EchelonBasis(first.rows * first.cols, first.field)
    return [m for m in matrices if span.add(m.entries)]


def solve_in_span(basis, target):
    """Coefficients c with sum_i c_i basis[i] == target, or None if target is outside the span."""
    basis = list(basis)
    field = target.field
    if not basis:
        return [] if target.is_zero() else None
    _check_uniform(basis + [target])
    size = target.rows * target.cols
    # augmented system: one row per entry position, one column per basis element
    system = [[b.entries[pos] for b in basis] + [target.entries[pos]] for pos in range(size)]
    pivots = _echelon(system)
    if len(basis) in pivots:
        return None
    solution = [field.zero] * len(basis)
    for r, c in enumerate(pivots):
        solution[c] = system[r][-1]
    return solution
