"""Exact rational matrices and subspaces.

Every routine here works over :class:`fractions.Fraction`; nothing is ever
rounded.  Subspaces are stored canonically as the reduced row echelon form
of a spanning set, so two equal subspaces compare equal with ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Vector = tuple[Fraction, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings or floats to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are taken at face value of their shortest repr, so 0.36 -> 9/25
        return Fraction(repr(value))
    return Fraction(value)


def as_vector(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix of Fractions with an explicit shape.

    The shape is kept even when there are no rows, which is what lets the
    zero subspace keep its ambient dimension.
    """

    rows: int
    cols: int
    entries: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "Matrix":
        data = tuple(as_vector(r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("cols must be given for a matrix without rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable], rows: int) -> "Matrix":
        return cls.from_rows(columns, cols=rows).T

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                      tuple(() for _ in range(self.cols)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.T.entries
            return Matrix(self.rows, other.cols,
                          tuple(tuple(dot(r, c) for c in cols) for r in self.entries))
        vec = as_vector(other)
        if len(vec) != self.cols:
            raise ValueError(f"shape mismatch {self.shape} @ ({len(vec)},)")
        return tuple(dot(r, vec) for r in self.entries)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ValueError("column counts differ")
        return Matrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def select_rows(self, indices: Iterable[int]) -> "Matrix":
        picked = tuple(self.entries[i] for i in indices)
        return Matrix(len(picked), self.cols, picked)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries], dtype=float).reshape(self.rows, self.cols)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns, by exact Gauss-Jordan elimination."""
    work = [list(r) for r in m.entries]
    pivots: list[int] = []
    lead = 0
    for col in range(m.cols):
        if lead >= m.rows:
            break
        pivot_row = next((i for i in range(lead, m.rows) if work[i][col] != 0), None)
        if pivot_row is None:
            continue
        work[lead], work[pivot_row] = work[pivot_row], work[lead]
        p = work[lead][col]
        if p != 1:
            work[lead] = [v / p for v in work[lead]]
        prow = work[lead]
        for i in range(m.rows):
            if i != lead:
                factor = work[i][col]
                if factor != 0:
                    work[i] = [a - factor * b for a, b in zip(work[i], prow)]
        pivots.append(col)
        lead += 1
    return Matrix(m.rows, m.cols, tuple(tuple(r) for r in work)), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^n held as the RREF of its row span.

    Construct through :meth:`span`; the raw constructor assumes ``basis`` is
    already canonical.
    """

    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Iterable], ambient_dim: int) -> "Subspace":
        m = Matrix.from_rows(vectors, cols=ambient_dim)
        reduced, pivots = rref(m)
        return cls(ambient_dim, reduced.select_rows(range(len(pivots))))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix(0, ambient_dim, ()))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def vectors(self) -> tuple[Vector, ...]:
        return self.basis.entries

    def contains(self, v: Iterable) -> bool:
        vec = as_vector(v)
        if len(vec) != self.ambient_dim:
            raise ValueError("vector has wrong length")
        return rank(self.basis.vstack(Matrix.from_rows([vec]))) == self.dim

    def __repr__(self) -> str:
        rows = ", ".join("(" + ", ".join(str(x) for x in r) + ")" for r in self.vectors)
        return f"Subspace(dim={self.dim}/{self.ambient_dim}, [{rows}])"


def kernel_basis(m: Matrix) -> Subspace:
    """Null space {x : m x = 0}."""
    reduced, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    vectors = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -reduced[row, f]
        vectors.append(v)
    return Subspace.span(vectors, m.cols)


def image_basis(m: Matrix) -> Subspace:
    """Column space of ``m``."""
    return Subspace.span(m.T.entries, m.rows)


def _check_dims(parts: Sequence[Subspace]) -> int:
    dims = {p.ambient_dim for p in parts}
    if len(dims) != 1:
        raise ValueError(f"mismatched ambient dimensions: {sorted(dims)}")
    return dims.pop()


def orthogonal_complement(s: Subspace) -> Subspace:
    return kernel_basis(s.basis)


def subspace_sum(parts: Sequence[Subspace]) -> Subspace:
    if not parts:
        raise ValueError("need at least one subspace")
    n = _check_dims(parts)
    return Subspace.span((v for p in parts for v in p.vectors), n)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    _check_dims([a, b])
    return orthogonal_complement(subspace_sum([orthogonal_complement(a), orthogonal_complement(b)]))


def is_subspace_of(a: Subspace, b: Subspace) -> bool:
    _check_dims([a, b])
    if a.dim > b.dim:
        return False
    return rank(b.basis.vstack(a.basis)) == b.dim


def is_direct_sum(parts: Sequence[Subspace]) -> bool:
    return subspace_sum(parts).dim == sum(p.dim for p in parts)


def species_hyperplane(ambient_dim: int, index: int) -> Subspace:
    """{x : x_index = 0}."""
    if not 0 <= index < ambient_dim:
        raise IndexError(f"species index {index} out of range for dimension {ambient_dim}")
    return Subspace.span((_unit(ambient_dim, k) for k in range(ambient_dim) if k != index), ambient_dim)


def _unit(n: int, k: int) -> Vector:
    return tuple(Fraction(int(i == k)) for i in range(n))


def positive_vector_in_subspace(s: Subspace) -> Vector | None:
    """A vector of ``s`` with every coordinate >= 1, or None if none exists.

    Writes v = 1 + w with w >= 0 and requires C v = 0 for a basis C of the
    orthogonal complement, then runs exact phase-one simplex on C w = -C 1.
    """
    from .simplex import phase_one

    n = s.ambient_dim
    if n == 0:
        return ()
    comp = orthogonal_complement(s)
    ones = (Fraction(1),) * n
    if comp.dim == 0:
        return ones
    rhs = tuple(-x for x in comp.basis @ ones)
    w = phase_one(comp.basis, rhs)
    if w is None:
        return None
    v = tuple(Fraction(1) + x for x in w)
    if not (s.contains(v) and all(x >= 1 for x in v)):
        raise AssertionError("phase-one witness failed exact verification")
    return v
