"""Exact linear algebra over Q and prime fields.

Matrices are python-flint ``fmpq_mat`` (rationals) or ``nmod_mat`` (residues
mod p).  Every routine is deterministic: pivots are chosen leftmost-first, so
bases produced here are reproducible bit for bit.

Vectors are rows.  A subspace is stored as a matrix whose rows form a basis,
and a linear map ``V -> W`` is a ``dim V x dim W`` matrix acting by ``v * M``.
The one exception is :func:`solve`, which follows the usual column convention
``a * x = b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

DEFAULT_PRIME = 32003


class NoSolution(ValueError):
    """Raised when a linear system is inconsistent."""


class CharacteristicTooSmall(ArithmeticError):
    """The ground field's characteristic is too small for a trace-form computation."""


class Field:
    """The ground field: Q (``p == 0``) or F_p."""

    def __init__(self, p: int = 0):
        if p < 0 or (p and not _is_prime(p)):
            raise ValueError(f"not a prime: {p}")
        self.p = p

    @classmethod
    def rational(cls) -> "Field":
        return cls(0)

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "Field":
        return cls(p)

    @classmethod
    def parse(cls, spec: str) -> "Field":
        """Parse ``"q"`` or ``"fp:<p>"``."""
        spec = spec.strip().lower()
        if spec in ("q", "qq", "rational"):
            return cls(0)
        if spec.startswith("fp:"):
            return cls(int(spec[3:]))
        if spec == "fp":
            return cls(DEFAULT_PRIME)
        raise ValueError(f"unknown field {spec!r}")

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"F_{self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.name})"

    # scalars -------------------------------------------------------------
    def __call__(self, x):
        if self.p:
            if isinstance(x, Fraction):
                return flint.nmod(x.numerator, self.p) / flint.nmod(x.denominator, self.p)
            return flint.nmod(int(x), self.p)
        if isinstance(x, Fraction):
            return flint.fmpq(x.numerator, x.denominator)
        if isinstance(x, flint.fmpq):
            return x
        return flint.fmpq(int(x))

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    # matrices ------------------------------------------------------------
    def matrix(self, rows: int, cols: int, entries: Sequence | None = None):
        """Matrix from a flat row-major entry list (zeros when omitted)."""
        if entries is None:
            entries = [0] * (rows * cols)
        if self.p:
            return flint.nmod_mat(rows, cols, [int(e) if not isinstance(e, flint.nmod) else int(e) for e in entries], self.p)
        return flint.fmpq_mat(rows, cols, list(entries))

    def from_rows(self, rows: Sequence[Sequence], cols: int | None = None):
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat = [x for r in rows for x in r]
        return self.matrix(len(rows), cols, flat)

    def zeros(self, rows: int, cols: int):
        return self.matrix(rows, cols)

    def eye(self, n: int):
        m = self.matrix(n, n)
        for i in range(n):
            m[i, i] = 1
        return m

    def from_dict(self, rows: int, cols: int, entries: dict):
        """Matrix from a sparse ``{(i, j): value}`` dictionary."""
        flat = [0] * (rows * cols)
        for (i, j), v in entries.items():
            flat[i * cols + j] = v
        if self.p:
            flat = [int(v) % self.p for v in flat]
        return self.matrix(rows, cols, flat)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def field_of(m) -> Field:
    if isinstance(m, flint.nmod_mat):
        return Field(int(m.modulus()))
    return Field(0)


# --------------------------------------------------------------------------
# basic shape helpers


def hstack(mats: Sequence, field: Field | None = None):
    mats = list(mats)
    if not mats:
        raise ValueError("nothing to stack")
    field = field or field_of(mats[0])
    rows = mats[0].nrows()
    if any(m.nrows() != rows for m in mats):
        raise ValueError("row counts differ")
    cols = sum(m.ncols() for m in mats)
    out = field.zeros(rows, cols)
    off = 0
    for m in mats:
        for i in range(rows):
            for j in range(m.ncols()):
                v = m[i, j]
                if v != 0:
                    out[i, off + j] = v
        off += m.ncols()
    return out


def vstack(mats: Sequence, cols: int | None = None, field: Field | None = None):
    mats = [m for m in mats]
    if not mats:
        if cols is None or field is None:
            raise ValueError("nothing to stack")
        return field.zeros(0, cols)
    field = field or field_of(mats[0])
    cols = mats[0].ncols() if cols is None else cols
    if any(m.ncols() != cols for m in mats):
        raise ValueError("column counts differ")
    rows = sum(m.nrows() for m in mats)
    entries = []
    for m in mats:
        entries.extend(m.entries())
    return field.matrix(rows, cols, entries)


def submatrix(m, rows: Iterable[int] | None = None, cols: Iterable[int] | None = None):
    field = field_of(m)
    rows = list(range(m.nrows())) if rows is None else list(rows)
    cols = list(range(m.ncols())) if cols is None else list(cols)
    out = field.zeros(len(rows), len(cols))
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            v = m[i, j]
            if v != 0:
                out[a, b] = v
    return out


def is_zero(m) -> bool:
    return all(e == 0 for e in m.entries())


def row(m, i):
    return submatrix(m, [i])


# --------------------------------------------------------------------------
# elimination


def pivots(reduced) -> list[int]:
    """Pivot columns of a matrix already in reduced row-echelon form."""
    piv = []
    cols = reduced.ncols()
    for i in range(reduced.nrows()):
        j = len(piv) and piv[-1] + 1
        while j < cols and reduced[i, j] == 0:
            j += 1
        if j == cols:
            break
        piv.append(j)
    return piv


def _rref(m):
    out = m.rref()
    return out[0], out[-1]


def rref(m):
    """Return ``(rank, reduced, transform)`` with ``transform * m == reduced``.

    ``transform`` is invertible.  Pivoting is leftmost, so ``reduced`` is the
    unique reduced row-echelon form of ``m``.
    """
    field = field_of(m)
    r, c = m.nrows(), m.ncols()
    aug = hstack([m, field.eye(r)], field) if c else field.eye(r)
    red, _ = _rref(aug)
    rank = sum(1 for p in pivots(red) if p < c)
    reduced = submatrix(red, None, range(c))
    transform = submatrix(red, None, range(c, c + r))
    return rank, reduced, transform


def rank(m) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return _rref(m)[1]


def row_basis(m):
    """Canonical basis of the row space: the nonzero rows of the RREF."""
    field = field_of(m)
    if m.nrows() == 0:
        return field.zeros(0, m.ncols())
    red, r = _rref(m)
    return submatrix(red, range(r))


def nullspace(m):
    """Rows spanning ``{x : m * x^T = 0}`` (right kernel), one per free column."""
    field = field_of(m)
    cols = m.ncols()
    if m.nrows() == 0:
        return field.eye(cols)
    red, r = _rref(m)
    piv = pivots(red)
    pivset = set(piv)
    free = [j for j in range(cols) if j not in pivset]
    out = field.zeros(len(free), cols)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, p in enumerate(piv):
            v = red[i, f]
            if v != 0:
                out[k, p] = -v
    return out


def left_nullspace(m):
    """Rows spanning ``{x : x * m = 0}``."""
    return nullspace(m.transpose())


@dataclass(frozen=True)
class SolutionSet:
    """All solutions of ``a * x = b``: ``particular + span(kernel rows)``.

    ``particular`` has one column per column of ``b``; ``kernel`` rows are
    vectors ``k`` with ``a * k^T = 0``.
    """

    particular: object
    kernel: object


def solve(a, b) -> SolutionSet:
    """Solve ``a * x = b`` exactly; free variables of the particular solution are 0.

    Raises :class:`NoSolution` when ``b`` is not in the column span of ``a``.
    """
    if a.nrows() != b.nrows():
        raise ValueError("a and b must have the same number of rows")
    field = field_of(a)
    n, k = a.ncols(), b.ncols()
    kernel = nullspace(a) if a.nrows() else field.eye(n)
    if a.nrows() == 0:
        return SolutionSet(field.zeros(n, k), kernel)
    red, _ = _rref(hstack([a, b], field))
    piv = pivots(red)
    if any(p >= n for p in piv):
        raise NoSolution("right-hand side not in the column span")
    x = field.zeros(n, k)
    for i, p in enumerate(piv):
        for j in range(k):
            v = red[i, n + j]
            if v != 0:
                x[p, j] = v
    return SolutionSet(x, kernel)


def solve_left(a, b):
    """A particular ``x`` with ``x * a == b`` (rows of ``b`` solved independently)."""
    return solve(a.transpose(), b.transpose()).particular.transpose()


# --------------------------------------------------------------------------
# subspaces


class Coordinates:
    """Coordinates with respect to a fixed list of independent row vectors."""

    def __init__(self, basis):
        self.basis = basis
        self.field = field_of(basis)
        self.dim = basis.nrows()
        self.ambient = basis.ncols()
        if self.dim:
            red, r = _rref(basis)
            if r != self.dim:
                raise ValueError("basis rows are linearly dependent")
            self.cols = pivots(red)
            square = submatrix(basis, None, self.cols)
            self._inv = square.inv()
        else:
            self.cols = []
            self._inv = None

    def __call__(self, vectors, check: bool = True):
        """Coordinates of each row of ``vectors``; raises NoSolution if outside the span."""
        n = vectors.nrows()
        if self.dim == 0:
            if check and not is_zero(vectors):
                raise NoSolution("vector outside the span")
            return self.field.zeros(n, 0)
        c = submatrix(vectors, None, self.cols) * self._inv
        if check and c * self.basis != vectors:
            raise NoSolution("vector outside the span")
        return c

    def contains(self, vectors) -> bool:
        try:
            self(vectors)
        except NoSolution:
            return False
        return True


def span_sum(u, v):
    return row_basis(vstack([u, v]))


def intersection(u, v):
    """Canonical basis of ``rowspace(u) & rowspace(v)``."""
    if u.ncols() != v.ncols():
        raise ValueError("ambient dimensions differ")
    field = field_of(u)
    if u.nrows() == 0 or v.nrows() == 0:
        return field.zeros(0, u.ncols())
    u = row_basis(u)
    v = row_basis(v)
    rel = left_nullspace(vstack([u, v]))
    if rel.nrows() == 0:
        return field.zeros(0, u.ncols())
    a = submatrix(rel, None, range(u.nrows()))
    return row_basis(a * u)


def complement(sub, whole):
    """Rows of ``whole`` (in order) extending a basis of ``sub`` to one of ``sub + whole``.

    Deterministic: a row is kept iff it is independent of ``sub`` and of the
    rows kept before it.
    """
    field = field_of(whole)
    kept = []
    current = row_basis(sub) if sub.nrows() else field.zeros(0, whole.ncols())
    r = current.nrows()
    for i in range(whole.nrows()):
        cand = vstack([current, row(whole, i)])
        if rank(cand) > r:
            kept.append(i)
            current = cand
            r += 1
    return submatrix(whole, kept) if kept else field.zeros(0, whole.ncols())


def standard_complement(sub, ambient: int, field: Field):
    """Unit vectors at the non-pivot columns of ``rref(sub)``: a canonical complement."""
    if sub.nrows():
        piv = set(pivots(row_basis(sub)))
    else:
        piv = set()
    free = [j for j in range(ambient) if j not in piv]
    out = field.zeros(len(free), ambient)
    for k, j in enumerate(free):
        out[k, j] = 1
    return out


@dataclass
class SubspaceOps:
    intersection: object
    sum: object
    quotient: object  # complement of u & v inside u, rows
    projection: object  # dim u x dim quotient: coordinates of u's rows modulo u & v


def subspace_ops(u, v) -> SubspaceOps:
    """Intersection, sum and the quotient ``u / (u & v)`` of two row spaces.

    The Grassmann identity ``dim(u&v) + dim(u+v) == dim u + dim v`` is checked.
    """
    if u.ncols() != v.ncols():
        raise ValueError("ambient dimensions differ")
    field = field_of(u)
    ub, vb = row_basis(u), row_basis(v)
    inter = intersection(ub, vb)
    total = span_sum(ub, vb)
    if inter.nrows() + total.nrows() != ub.nrows() + vb.nrows():
        raise ArithmeticError("Grassmann identity violated")
    quot = complement(inter, ub)
    coords = Coordinates(vstack([inter, quot], cols=u.ncols(), field=field))
    proj = submatrix(coords(ub), None, range(inter.nrows(), inter.nrows() + quot.nrows())) if ub.nrows() else field.zeros(0, quot.nrows())
    return SubspaceOps(inter, total, quot, proj)


# --------------------------------------------------------------------------
# sparse assembly


class SparseBuilder:
    """Accumulates entries of a matrix before converting it to flint."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.data: dict = {}

    def add(self, i: int, j: int, v):
        if v == 0:
            return
        key = (i, j)
        w = self.data.get(key)
        self.data[key] = v if w is None else w + v

    def add_block(self, r0: int, c0: int, block):
        for i in range(block.nrows()):
            for j in range(block.ncols()):
                v = block[i, j]
                if v != 0:
                    self.add(r0 + i, c0 + j, v)

    def to_mat(self, field: Field):
        flat = [0] * (self.rows * self.cols)
        for (i, j), v in self.data.items():
            flat[i * self.cols + j] = v
        if field.p:
            flat = [int(x) for x in flat]
        return field.matrix(self.rows, self.cols, flat)
