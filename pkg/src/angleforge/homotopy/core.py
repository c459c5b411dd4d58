"""Complexes of projective modules in matrix form and their homotopy category.

A complex is a list of indecomposable projectives ``B e_s`` per degree (the
``terms``) together with block matrices whose entries lie in
``Hom(B e_s, B e_t) = e_s B e_t``.  Composition is the algebra product, in
diagrammatic order: ``f.then(g)`` is "f, then g".

Sign conventions: ``X[j]^i = X^{i+j}`` with differential ``(-1)^j d``; chain
maps shift without signs.  For ``f: X -> Y`` the cone has terms
``X^{i+1} + Y^i`` and differential ``(x, y) -> (-x d_X, x f + y d_Y)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..exactlin import (
    Coordinates,
    NoSolution,
    SparseBuilder,
    left_nullspace,
    pivots,
    rank,
    row_basis,
    solve_left,
    submatrix,
    vstack,
)
from ..quiveralg import AlgebraData


class NotNullHomotopic(ValueError):
    """Raised when a chain map admits no null-homotopy."""


class ProjCategory:
    """The additive category of the projectives ``B e_s`` for an algebra ``B``.

    Objects are idempotent positions ``0 .. m-1``.  ``Hom(s, t)`` has the basis
    ``corner_basis(s, t)`` of ``B``.
    """

    def __init__(self, algebra: AlgebraData):
        self.algebra = algebra
        self.field = algebra.field
        self._tables: dict = {}
        self._bases = {}
        self._hom_cache: dict = {}

    def basis(self, s: int, t: int) -> list[int]:
        key = (s, t)
        b = self._bases.get(key)
        if b is None:
            b = self._bases[key] = self.algebra.corner_basis(s, t)
        return b

    def hom_dim(self, s: int, t: int) -> int:
        return len(self.basis(s, t))

    @property
    def n_objects(self) -> int:
        return self.algebra.n_idem

    def table(self, s: int, t: int, u: int) -> list:
        """``tab[i][j]`` lists ``(k, c)`` with ``b_i b_j = sum c b_k`` in local indices."""
        key = (s, t, u)
        tab = self._tables.get(key)
        if tab is None:
            bst, btu, bsu = self.basis(s, t), self.basis(t, u), self.basis(s, u)
            pos = {b: k for k, b in enumerate(bsu)}
            alg = self.algebra
            tab = []
            for bi in bst:
                row = []
                for bj in btu:
                    row.append([(pos[k], c) for k, c in alg.product_basis(bi, bj).items()])
                tab.append(row)
            self._tables[key] = tab
        return tab

    def compose(self, x: tuple, y: tuple, s: int, t: int, u: int) -> tuple:
        tab = self.table(s, t, u)
        out = [self.field.zero] * self.hom_dim(s, u)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = tab[i]
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                p = xi * yj
                for k, c in row[j]:
                    out[k] += p * c
        return tuple(out)

    def left_mult(self, x: tuple, s: int, t: int, u: int) -> dict:
        """Sparse matrix of ``y -> x y`` from ``Hom(t, u)`` to ``Hom(s, u)``."""
        tab = self.table(s, t, u)
        out: dict = {}
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, terms in enumerate(tab[i]):
                for k, c in terms:
                    out[(j, k)] = out.get((j, k), 0) + xi * c
        return out

    def right_mult(self, y: tuple, s: int, t: int, u: int) -> dict:
        """Sparse matrix of ``x -> x y`` from ``Hom(s, t)`` to ``Hom(s, u)``."""
        tab = self.table(s, t, u)
        out: dict = {}
        for i, row in enumerate(tab):
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                for k, c in row[j]:
                    out[(i, k)] = out.get((i, k), 0) + yj * c
        return out

    def identity(self, s: int) -> tuple:
        e = self.algebra.idempotents[s]
        return tuple(self.field.one if b == e else self.field.zero for b in self.basis(s, s))

    def zero(self, s: int, t: int) -> tuple:
        return tuple([self.field.zero] * self.hom_dim(s, t))

    def element(self, s: int, t: int, coeffs: dict) -> tuple:
        """Hom element from a sparse dict over algebra basis indices."""
        basis = self.basis(s, t)
        return tuple(self.field(coeffs.get(b, 0)) if not hasattr(coeffs.get(b, 0), "p") else coeffs.get(b) for b in basis)


class Layout:
    """Offsets of the nonzero Hom blocks of a map between two lists of objects."""

    __slots__ = ("cat", "src", "tgt", "offsets", "size")

    def __init__(self, cat: ProjCategory, src: Sequence[int], tgt: Sequence[int]):
        self.cat = cat
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.offsets = {}
        off = 0
        for a, s in enumerate(self.src):
            for b, t in enumerate(self.tgt):
                d = cat.hom_dim(s, t)
                if d:
                    self.offsets[(a, b)] = (off, d)
                    off += d
        self.size = off

    def to_list(self, m: "BlockMap") -> list:
        out = [self.cat.field.zero] * self.size
        for key, x in m.blocks.items():
            off, d = self.offsets[key]
            out[off:off + d] = x
        return out

    def from_row(self, row, start: int = 0) -> "BlockMap":
        blocks = {}
        for key, (off, d) in self.offsets.items():
            x = tuple(row[start + off + k] for k in range(d))
            if any(v != 0 for v in x):
                blocks[key] = x
        return BlockMap(self.cat, self.src, self.tgt, blocks)


class BlockMap:
    """A map ``sum_a B e_{src[a]} -> sum_b B e_{tgt[b]}`` stored by nonzero blocks."""

    __slots__ = ("cat", "src", "tgt", "blocks")

    def __init__(self, cat: ProjCategory, src: Sequence[int], tgt: Sequence[int], blocks: dict | None = None):
        self.cat = cat
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        clean = {}
        for key, x in (blocks or {}).items():
            x = tuple(x)
            if any(v != 0 for v in x):
                clean[key] = x
        self.blocks = clean

    @classmethod
    def identity(cls, cat, objs):
        return cls(cat, objs, objs, {(a, a): cat.identity(s) for a, s in enumerate(objs)})

    def then(self, other: "BlockMap") -> "BlockMap":
        if self.tgt != other.tgt and self.tgt != other.src:
            raise ValueError("maps are not composable")
        if self.tgt != other.src:
            raise ValueError("maps are not composable")
        cat = self.cat
        out: dict = {}
        by_src: dict = {}
        for (b, c), y in other.blocks.items():
            by_src.setdefault(b, []).append((c, y))
        for (a, b), x in self.blocks.items():
            for c, y in by_src.get(b, ()):
                z = cat.compose(x, y, self.src[a], self.tgt[b], other.tgt[c])
                prev = out.get((a, c))
                out[(a, c)] = z if prev is None else tuple(p + q for p, q in zip(prev, z))
        return BlockMap(cat, self.src, other.tgt, out)

    def __add__(self, other: "BlockMap") -> "BlockMap":
        if (self.src, self.tgt) != (other.src, other.tgt):
            raise ValueError("shape mismatch")
        out = dict(self.blocks)
        for k, y in other.blocks.items():
            x = out.get(k)
            out[k] = y if x is None else tuple(p + q for p, q in zip(x, y))
        return BlockMap(self.cat, self.src, self.tgt, out)

    def scale(self, c) -> "BlockMap":
        c = self.cat.field(c) if isinstance(c, int) else c
        return BlockMap(self.cat, self.src, self.tgt, {k: tuple(c * v for v in x) for k, x in self.blocks.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other):
        return isinstance(other, BlockMap) and (self.src, self.tgt, self.blocks) == (other.src, other.tgt, other.blocks)

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return (self.src, self.tgt, tuple(sorted(self.blocks.items())))

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "BlockMap":
        """Sub-block on the given source and target positions (in that order)."""
        rpos = {a: i for i, a in enumerate(rows)}
        cpos = {b: j for j, b in enumerate(cols)}
        blocks = {(rpos[a], cpos[b]): x for (a, b), x in self.blocks.items() if a in rpos and b in cpos}
        return BlockMap(self.cat, [self.src[a] for a in rows], [self.tgt[b] for b in cols], blocks)

    def transpose(self, cat: ProjCategory) -> "BlockMap":
        """Same entries read in the opposite category (reverses direction)."""
        return BlockMap(cat, self.tgt, self.src, {(b, a): x for (a, b), x in self.blocks.items()})


def block_matrix(cat, rows: Sequence[Sequence[BlockMap]]) -> BlockMap:
    """Assemble ``[[m_00, m_01, ...], ...]``; row ``r`` holds maps out of the r-th source group."""
    src, tgt = [], []
    for r in rows:
        src.extend(r[0].src)
    for m in rows[0]:
        tgt.extend(m.tgt)
    blocks = {}
    ro = 0
    for r in rows:
        co = 0
        for m in r:
            for (a, b), x in m.blocks.items():
                blocks[(ro + a, co + b)] = x
            co += len(m.tgt)
        ro += len(r[0].src)
    return BlockMap(cat, src, tgt, blocks)


def zero_map(cat, src, tgt) -> BlockMap:
    return BlockMap(cat, src, tgt, {})


# ---------------------------------------------------------------------------
# complexes


class ProjComplex:
    """A bounded complex of projectives.

    Args:
        cat: the ambient :class:`ProjCategory`.
        terms: ``{degree: tuple of objects}``; empty degrees may be omitted.
        diffs: ``{degree: BlockMap}`` for ``d^i: X^i -> X^{i+1}``.
    """

    def __init__(self, cat: ProjCategory, terms: dict, diffs: dict | None = None, check: bool = True, name: str = ""):
        self.cat = cat
        self.terms = {i: tuple(t) for i, t in terms.items() if len(t)}
        self.diffs = {}
        for i, d in (diffs or {}).items():
            if i in self.terms and i + 1 in self.terms and not d.is_zero():
                if d.src != self.terms[i] or d.tgt != self.terms[i + 1]:
                    raise ValueError(f"differential {i} has the wrong shape")
                self.diffs[i] = d
        self.name = name
        self._key = None
        if check:
            self.check()

    @classmethod
    def stalk(cls, cat, objs: Sequence[int], degree: int = 0, name: str = "") -> "ProjComplex":
        return cls(cat, {degree: tuple(objs)}, {}, name=name)

    @classmethod
    def zero(cls, cat) -> "ProjComplex":
        return cls(cat, {}, {})

    def term(self, i: int) -> tuple:
        return self.terms.get(i, ())

    def diff(self, i: int) -> BlockMap:
        d = self.diffs.get(i)
        return d if d is not None else BlockMap(self.cat, self.term(i), self.term(i + 1))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    @property
    def lo(self):
        return min(self.terms) if self.terms else 0

    @property
    def hi(self):
        return max(self.terms) if self.terms else -1

    def is_zero(self) -> bool:
        return not self.terms

    def size(self) -> int:
        return sum(len(t) for t in self.terms.values())

    def check(self):
        for i in self.terms:
            if i in self.diffs and i + 1 in self.diffs:
                if not self.diffs[i].then(self.diffs[i + 1]).is_zero():
                    raise ValueError(f"d^{i+1} d^{i} != 0")

    def key(self):
        if self._key is None:
            self._key = (
                tuple(sorted(self.terms.items())),
                tuple(sorted((i, d.key()) for i, d in self.diffs.items())),
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, ProjComplex) and other.cat is self.cat and other.key() == self.key()

    def __hash__(self):
        return hash(self.key())

    def shift(self, j: int) -> "ProjComplex":
        if j == 0:
            return self
        sign = -1 if j % 2 else 1
        terms = {i - j: t for i, t in self.terms.items()}
        diffs = {i - j: (d.scale(sign) if sign < 0 else d) for i, d in self.diffs.items()}
        return ProjComplex(self.cat, terms, diffs, check=False, name=f"{self.name}[{j}]" if self.name else "")

    def __repr__(self):
        parts = [f"{i}:{list(t)}" for i, t in sorted(self.terms.items())]
        return f"ProjComplex({self.name or ''} {' '.join(parts)})"

    def describe(self) -> dict:
        return {str(i): list(t) for i, t in sorted(self.terms.items())}


class ProjChainMap:
    """A degreewise map of complexes ``comps[i]: X^i -> Y^i``."""

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: dict, check: bool = True):
        self.source = source
        self.target = target
        cat = source.cat
        self.comps = {}
        for i, m in comps.items():
            if i in source.terms and i in target.terms and not m.is_zero():
                if m.src != source.term(i) or m.tgt != target.term(i):
                    raise ValueError(f"component {i} has the wrong shape")
                self.comps[i] = m
        if check:
            self.check()

    @classmethod
    def identity(cls, x: ProjComplex) -> "ProjChainMap":
        return cls(x, x, {i: BlockMap.identity(x.cat, t) for i, t in x.terms.items()}, check=False)

    @classmethod
    def zero(cls, x: ProjComplex, y: ProjComplex) -> "ProjChainMap":
        return cls(x, y, {}, check=False)

    def comp(self, i: int) -> BlockMap:
        m = self.comps.get(i)
        return m if m is not None else BlockMap(self.source.cat, self.source.term(i), self.target.term(i))

    def is_chain_map(self) -> bool:
        x, y = self.source, self.target
        for i in set(x.terms) | set(y.terms):
            lhs = x.diff(i).then(self.comp(i + 1))
            rhs = self.comp(i).then(y.diff(i))
            if lhs != rhs:
                return False
        return True

    def check(self):
        if not self.is_chain_map():
            raise ValueError("not a chain map")

    def then(self, other: "ProjChainMap") -> "ProjChainMap":
        if self.target.key() != other.source.key():
            raise ValueError("chain maps are not composable")
        comps = {}
        for i in self.comps:
            if i in other.comps:
                comps[i] = self.comps[i].then(other.comps[i])
        return ProjChainMap(self.source, other.target, comps, check=False)

    def __add__(self, other):
        comps = dict(self.comps)
        for i, m in other.comps.items():
            comps[i] = comps[i] + m if i in comps else m
        return ProjChainMap(self.source, self.target, comps, check=False)

    def scale(self, c):
        return ProjChainMap(self.source, self.target, {i: m.scale(c) for i, m in self.comps.items()}, check=False)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.comps.values())

    def shift(self, j: int) -> "ProjChainMap":
        if j == 0:
            return self
        return ProjChainMap(self.source.shift(j), self.target.shift(j), {i - j: m for i, m in self.comps.items()}, check=False)

    def key(self):
        return (self.source.key(), self.target.key(), tuple(sorted((i, m.key()) for i, m in self.comps.items())))

    def __eq__(self, other):
        return isinstance(other, ProjChainMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def retarget(self, source: ProjComplex | None = None, target: ProjComplex | None = None) -> "ProjChainMap":
        """Same components viewed between equal-content complexes."""
        return ProjChainMap(source or self.source, target or self.target, self.comps, check=False)


class HomotopyWitness:
    """Degreewise maps ``h^i: X^i -> Y^{i-1}`` with ``f^i = d h^{i+1} + h^i d``."""

    def __init__(self, source: ProjComplex, target: ProjComplex, comps: dict):
        self.source = source
        self.target = target
        self.comps = comps

    def comp(self, i):
        m = self.comps.get(i)
        return m if m is not None else BlockMap(self.source.cat, self.source.term(i), self.target.term(i - 1))

    def boundary(self) -> ProjChainMap:
        x, y = self.source, self.target
        comps = {}
        for i in x.terms:
            if i in y.terms:
                comps[i] = x.diff(i).then(self.comp(i + 1)) + self.comp(i).then(y.diff(i - 1))
        return ProjChainMap(x, y, comps, check=False)

    def verify(self, f: ProjChainMap) -> bool:
        return self.boundary() == f


# ---------------------------------------------------------------------------
# linear maps on Hom spaces


def _add_premul(sb: SparseBuilder, d: BlockMap, lay_in: Layout, lay_out: Layout, row0: int, col0: int, sign=1):
    """Rows ``lay_in`` (maps out of ``d.tgt``) to columns ``lay_out``: ``x -> d x``."""
    cat = d.cat
    for (a, b), x in d.blocks.items():
        s, t = d.src[a], d.tgt[b]
        for c, u in enumerate(lay_in.tgt):
            kin = lay_in.offsets.get((b, c))
            kout = lay_out.offsets.get((a, c))
            if kin is None or kout is None:
                continue
            for (j, k), v in cat.left_mult(x, s, t, u).items():
                sb.add(row0 + kin[0] + j, col0 + kout[0] + k, v if sign == 1 else -v)


def _add_postmul(sb: SparseBuilder, d: BlockMap, lay_in: Layout, lay_out: Layout, row0: int, col0: int, sign=1):
    """Rows ``lay_in`` (maps into ``d.src``) to columns ``lay_out``: ``x -> x d``."""
    cat = d.cat
    for (b, c), y in d.blocks.items():
        t, u = d.src[b], d.tgt[c]
        for a, s in enumerate(lay_in.src):
            kin = lay_in.offsets.get((a, b))
            kout = lay_out.offsets.get((a, c))
            if kin is None or kout is None:
                continue
            for (i, k), v in cat.right_mult(y, s, t, u).items():
                sb.add(row0 + kin[0] + i, col0 + kout[0] + k, v if sign == 1 else -v)


class GradedLayout:
    """Concatenated layouts of degree-k maps ``X^i -> Y^{i+k}``."""

    def __init__(self, x: ProjComplex, y: ProjComplex, k: int = 0):
        self.x, self.y, self.k = x, y, k
        self.parts = {}
        off = 0
        for i in x.degrees:
            if i + k in y.terms:
                lay = Layout(x.cat, x.term(i), y.term(i + k))
                if lay.size:
                    self.parts[i] = (off, lay)
                    off += lay.size
        self.size = off

    def vector(self, comps) -> list:
        out = [self.x.cat.field.zero] * self.size
        for i, (off, lay) in self.parts.items():
            m = comps.get(i)
            if m is not None:
                out[off:off + lay.size] = lay.to_list(m)
        return out

    def maps(self, row) -> dict:
        return {i: lay.from_row(row, off) for i, (off, lay) in self.parts.items()}


def _row_list(m, r):
    return [m[r, j] for j in range(m.ncols())]


class HomKb:
    """``Hom_{K^b}(X, Y)``: chain maps modulo null-homotopic maps.

    The chain-map space is the left kernel of one constraint matrix; the
    null-homotopic subspace is the image of one homotopy matrix.  Basis
    representatives are the chain-space basis vectors (in order) that are
    independent modulo homotopy.
    """

    def __init__(self, x: ProjComplex, y: ProjComplex):
        if x.cat is not y.cat:
            raise ValueError("complexes live in different categories")
        self.x, self.y = x, y
        cat = x.cat
        f = cat.field
        self.field = f
        self.maps0 = GradedLayout(x, y, 0)
        self.maps1 = GradedLayout(x, y, 1)  # constraint space X^i -> Y^{i+1}
        self.htpy = GradedLayout(x, y, -1)
        n0 = self.maps0.size
        # chain condition: d_X f^{i+1} - f^i d_Y
        sb = SparseBuilder(n0, self.maps1.size)
        for i, (off1, lay1) in self.maps1.parts.items():
            if i + 1 in self.maps0.parts:
                off0, lay0 = self.maps0.parts[i + 1]
                _add_premul(sb, x.diff(i), lay0, lay1, off0, off1)
            if i in self.maps0.parts:
                off0, lay0 = self.maps0.parts[i]
                _add_postmul(sb, y.diff(i), lay0, lay1, off0, off1, sign=-1)
        z = sb.to_mat(f)
        if n0 == 0:
            self.chain_basis = f.zeros(0, 0)
        elif self.maps1.size == 0:
            self.chain_basis = f.eye(n0)
        else:
            self.chain_basis = row_basis(left_nullspace(z))
        # homotopy image: d_X h^{i+1} + h^i d_Y
        hb = SparseBuilder(self.htpy.size, n0)
        for i, (off0, lay0) in self.maps0.parts.items():
            if i + 1 in self.htpy.parts:
                offh, layh = self.htpy.parts[i + 1]
                _add_premul(hb, x.diff(i), layh, lay0, offh, off0)
            if i in self.htpy.parts:
                offh, layh = self.htpy.parts[i]
                _add_postmul(hb, y.diff(i - 1), layh, lay0, offh, off0)
        self.homotopy_matrix = hb.to_mat(f)
        if self.htpy.size and n0:
            self.null_basis = row_basis(self.homotopy_matrix)
        else:
            self.null_basis = f.zeros(0, n0)
        self.reps = _complement_rows(self.null_basis, self.chain_basis)
        self.dim = self.reps.nrows()
        self._coords = None

    @property
    def chain_dim(self) -> int:
        return self.chain_basis.nrows()

    @property
    def null_dim(self) -> int:
        return self.null_basis.nrows()

    def basis(self) -> list[ProjChainMap]:
        return [self.rep_row(r) for r in range(self.dim)]

    def rep_row(self, r: int) -> ProjChainMap:
        return ProjChainMap(self.x, self.y, self.maps0.maps(_row_list(self.reps, r)), check=False)

    def element(self, coeffs: Sequence) -> ProjChainMap:
        """Representative of ``sum coeffs[r] * basis[r]``."""
        f = self.field
        if self.dim == 0:
            return ProjChainMap.zero(self.x, self.y)
        v = f.zeros(1, self.dim)
        for r, c in enumerate(coeffs):
            v[0, r] = c
        row = v * self.reps
        return ProjChainMap(self.x, self.y, self.maps0.maps(_row_list(row, 0)), check=False)

    def coords(self, g: ProjChainMap) -> list:
        """Coordinates of the homotopy class of ``g``; raises if ``g`` is not a chain map."""
        f = self.field
        if self.dim == 0:
            if not self.is_chain(g):
                raise NoSolution("not a chain map")
            return []
        if self._coords is None:
            self._coords = Coordinates(vstack([self.reps, self.null_basis], cols=self.maps0.size, field=f))
        v = self.vector(g)
        c = self._coords(v)
        return [c[0, r] for r in range(self.dim)]

    def coords_matrix(self, maps: Sequence[ProjChainMap]):
        """Coordinates of several maps at once, one row each."""
        f = self.field
        if not maps:
            return f.zeros(0, self.dim)
        if self.dim == 0:
            return f.zeros(len(maps), 0)
        if self._coords is None:
            self._coords = Coordinates(vstack([self.reps, self.null_basis], cols=self.maps0.size, field=f))
        vs = vstack([self.vector(g) for g in maps], cols=self.maps0.size, field=f)
        c = self._coords(vs)
        return submatrix(c, None, range(self.dim))

    def vector(self, g: ProjChainMap):
        f = self.field
        vals = self.maps0.vector(g.comps)
        m = f.zeros(1, self.maps0.size)
        for j, v in enumerate(vals):
            if v != 0:
                m[0, j] = v
        return m

    def is_chain(self, g: ProjChainMap) -> bool:
        return g.is_chain_map()

    def is_null(self, g: ProjChainMap) -> bool:
        if self.maps0.size == 0:
            return True
        if self.null_basis.nrows() == 0:
            return g.is_zero()
        return Coordinates(self.null_basis).contains(self.vector(g))

    def null_homotopy(self, g: ProjChainMap) -> HomotopyWitness:
        if self.maps0.size == 0 or g.is_zero():
            return HomotopyWitness(self.x, self.y, {})
        if self.htpy.size == 0:
            raise NotNullHomotopic("no homotopies available")
        try:
            h = solve_left(self.homotopy_matrix, self.vector(g))
        except NoSolution as exc:
            raise NotNullHomotopic(str(exc)) from None
        w = HomotopyWitness(self.x, self.y, self.htpy.maps(_row_list(h, 0)))
        if not w.verify(g):
            raise ArithmeticError("homotopy witness failed verification")
        return w


def _complement_rows(sub, rows):
    """Rows of ``rows`` independent modulo ``sub``, chosen greedily in order (one elimination)."""
    f_rows = rows.nrows()
    if f_rows == 0:
        return rows
    k = sub.nrows()
    stacked = vstack([sub, rows], cols=rows.ncols()) if k else rows
    red = row_basis(stacked.transpose()) if stacked.ncols() else stacked
    piv = pivots(red)
    keep = [p - k for p in piv if p >= k]
    return submatrix(rows, keep)


def hom_kb(x: ProjComplex, y: ProjComplex) -> HomKb:
    """Cached ``Hom_{K^b}(x, y)``."""
    cache = x.cat._hom_cache
    key = (x.key(), y.key())
    h = cache.get(key)
    if h is None:
        h = cache[key] = HomKb(x, y)
    return h


def null_homotopy(f: ProjChainMap) -> HomotopyWitness:
    """A witness ``h`` with ``f = d h + h d``; raises :class:`NotNullHomotopic`."""
    return hom_kb(f.source, f.target).null_homotopy(f)


def is_null_homotopic(f: ProjChainMap) -> bool:
    return hom_kb(f.source, f.target).is_null(f)


def homotopic(f: ProjChainMap, g: ProjChainMap) -> bool:
    return is_null_homotopic(f - g.retarget(f.source, f.target))


# ---------------------------------------------------------------------------
# constructions


def shift(x, j: int):
    """Shift a complex or chain map by ``j``."""
    return x.shift(j)


def direct_sum(complexes: Sequence[ProjComplex], cat: ProjCategory | None = None):
    """Direct sum with canonical injections and projections.

    Returns ``(S, injections, projections)``.  Terms are concatenated in the
    given order.
    """
    cat = cat or complexes[0].cat
    degrees = sorted(set().union(*[set(c.terms) for c in complexes])) if complexes else []
    terms, diffs = {}, {}
    offsets = {i: [] for i in degrees}
    for i in degrees:
        t = []
        for c in complexes:
            offsets[i].append(len(t))
            t.extend(c.term(i))
        terms[i] = tuple(t)
    for i in degrees:
        blocks = {}
        for n, c in enumerate(complexes):
            for (a, b), x in c.diff(i).blocks.items():
                blocks[(offsets[i][n] + a, offsets[i + 1][n] + b)] = x
        if i + 1 in terms:
            diffs[i] = BlockMap(cat, terms[i], terms[i + 1], blocks)
    s = ProjComplex(cat, terms, diffs, check=False)
    inj, proj = [], []
    for n, c in enumerate(complexes):
        ic, pc = {}, {}
        for i in c.terms:
            o = offsets[i][n]
            ic[i] = BlockMap(cat, c.term(i), s.term(i), {(a, o + a): cat.identity(obj) for a, obj in enumerate(c.term(i))})
            pc[i] = BlockMap(cat, s.term(i), c.term(i), {(o + a, a): cat.identity(obj) for a, obj in enumerate(c.term(i))})
        inj.append(ProjChainMap(c, s, ic, check=False))
        proj.append(ProjChainMap(s, c, pc, check=False))
    return s, inj, proj


def cone(f: ProjChainMap):
    """Mapping cone with its canonical maps ``Y -> C(f) -> X[1]``.

    Returns ``(C, incl, proj)``.
    """
    x, y = f.source, f.target
    cat = x.cat
    degrees = sorted({i - 1 for i in x.terms} | set(y.terms))
    terms, diffs = {}, {}
    for i in degrees:
        terms[i] = x.term(i + 1) + y.term(i)
    for i in degrees:
        if i + 1 not in terms:
            continue
        nx, ny = len(x.term(i + 1)), len(y.term(i))
        blocks = {}
        for (a, b), v in x.diff(i + 1).blocks.items():
            blocks[(a, b)] = tuple(-c for c in v)
        nx2 = len(x.term(i + 2))
        for (a, b), v in f.comp(i + 1).blocks.items():
            blocks[(a, nx2 + b)] = v
        for (a, b), v in y.diff(i).blocks.items():
            blocks[(nx + a, nx2 + b)] = v
        diffs[i] = BlockMap(cat, terms[i], terms[i + 1], blocks)
    c = ProjComplex(cat, terms, diffs)
    incl = {}
    proj = {}
    for i in degrees:
        nx = len(x.term(i + 1))
        if y.term(i):
            incl[i] = BlockMap(cat, y.term(i), terms[i], {(a, nx + a): cat.identity(o) for a, o in enumerate(y.term(i))})
        if x.term(i + 1):
            proj[i] = BlockMap(cat, terms[i], x.term(i + 1), {(a, a): cat.identity(o) for a, o in enumerate(x.term(i + 1))})
    return c, ProjChainMap(y, c, incl), ProjChainMap(c, x.shift(1), proj)


def cone_map(f: ProjChainMap, f2: ProjChainMap, a: ProjChainMap, b: ProjChainMap, h: HomotopyWitness | None = None):
    """Induced map ``C(f) -> C(f2)`` from a square ``a f2 ~ f b``.

    ``h`` is a homotopy with ``f b - a f2 = d h + h d``; when omitted the square
    must commute strictly.  On the cone the map is ``(x, y) -> (x a, x h + y b)``.
    """
    c1, _, _ = cone(f)
    c2, _, _ = cone(f2)
    x1, y1 = f.source, f.target
    x2, y2 = f2.source, f2.target
    cat = x1.cat
    comps = {}
    for i in c1.terms:
        rows = []
        na, nb = len(x2.term(i + 1)), len(y2.term(i))
        blocks = {}
        for (p, q), v in a.comp(i + 1).blocks.items():
            blocks[(p, q)] = v
        if h is not None:
            for (p, q), v in h.comp(i + 1).blocks.items():
                blocks[(p, na + q)] = v
        off = len(x1.term(i + 1))
        for (p, q), v in b.comp(i).blocks.items():
            blocks[(off + p, na + q)] = v
        comps[i] = BlockMap(cat, c1.term(i), c2.term(i), blocks)
    g = ProjChainMap(c1, c2, comps, check=False)
    if not g.is_chain_map():
        raise ValueError("square data does not induce a chain map on cones")
    return g


def minimize(x: ProjComplex):
    """Cancel invertible scalar entries of the differential (Gaussian elimination).

    Returns ``(X', iota, pi)`` with ``iota: X' -> X`` and ``pi: X -> X'``
    mutually inverse homotopy equivalences and ``pi iota = id``.
    """
    cur = x
    iota = ProjChainMap.identity(x)
    pi = ProjChainMap.identity(x)
    while True:
        step = _eliminate_once(cur)
        if step is None:
            break
        nxt, i_step, p_step = step
        iota = i_step.then(iota)
        pi = pi.then(p_step)
        cur = nxt
    return cur, iota, pi


def _eliminate_once(x: ProjComplex):
    cat = x.cat
    alg = cat.algebra
    for i in x.degrees:
        d = x.diffs.get(i)
        if d is None:
            continue
        for (a, b), v in sorted(d.blocks.items()):
            s, t = d.src[a], d.tgt[b]
            if s != t:
                continue
            e = alg.idempotents[s]
            basis = cat.basis(s, s)
            # invertible scalar multiple of the identity
            nz = [k for k, c in enumerate(v) if c != 0]
            if len(nz) != 1 or basis[nz[0]] != e:
                continue
            return _eliminate(x, i, a, b, v[nz[0]], nz[0])
    return None


def _eliminate(x: ProjComplex, i: int, a: int, b: int, alpha, pos):
    cat = x.cat
    f = cat.field
    d = x.diff(i)
    src, tgt = x.term(i), x.term(i + 1)
    drest = [r for r in range(len(src)) if r != a]
    erest = [c for c in range(len(tgt)) if c != b]
    inv = f.one / alpha
    delta = d.restrict([a], erest)  # b1 -> E
    beta = d.restrict(drest, [b])  # D -> b2
    gamma = d.restrict(drest, erest)
    s = src[a]
    ainv = BlockMap(cat, [s], [s], {(0, 0): cat.identity(s)}).scale(inv)
    new_d = gamma - beta.then(ainv).then(delta)
    terms = dict(x.terms)
    terms[i] = tuple(src[r] for r in drest)
    terms[i + 1] = tuple(tgt[c] for c in erest)
    diffs = dict(x.diffs)
    diffs[i] = new_d
    if i - 1 in x.terms:
        diffs[i - 1] = x.diff(i - 1).restrict(range(len(x.term(i - 1))), drest)
    if i + 2 in x.terms:
        diffs[i + 1] = x.diff(i + 1).restrict(erest, range(len(x.term(i + 2))))
    y = ProjComplex(cat, terms, diffs, check=False)
    # iota: Y -> X ; pi: X -> Y
    ic, pc = {}, {}
    for j in x.terms:
        if j in (i, i + 1):
            continue
        ic[j] = BlockMap.identity(cat, x.term(j))
        pc[j] = BlockMap.identity(cat, x.term(j))
    # degree i: iota(x) = (-x beta alpha^{-1}, x) ; pi = projection
    blocks = {}
    for (r, _), v in beta.then(ainv).blocks.items():
        blocks[(r, a)] = tuple(-c for c in v)
    for k, r in enumerate(drest):
        blocks[(k, r)] = cat.identity(src[r])
    ic[i] = BlockMap(cat, terms[i], src, blocks)
    pc[i] = BlockMap(cat, src, terms[i], {(r, k): cat.identity(src[r]) for k, r in enumerate(drest)})
    # degree i+1: iota = inclusion of E ; pi(c, y) = c t + y with t = -alpha^{-1} delta
    ic[i + 1] = BlockMap(cat, terms[i + 1], tgt, {(k, c): cat.identity(tgt[c]) for k, c in enumerate(erest)})
    blocks = {}
    for (_, k), v in ainv.then(delta).blocks.items():
        blocks[(b, k)] = tuple(-c for c in v)
    for k, c in enumerate(erest):
        blocks[(c, k)] = cat.identity(tgt[c])
    pc[i + 1] = BlockMap(cat, tgt, terms[i + 1], blocks)
    iota = ProjChainMap(y, x, ic)
    pi = ProjChainMap(x, y, pc)
    return y, iota, pi
