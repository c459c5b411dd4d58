"""Admissible sets, perforated Yoneda algebras ``E(U)`` and the factorization ideals.

For a finite set ``Φ`` containing 0 and a functor ``F`` on ``K^b(proj A)``,
``E(X, Y) = ⊕_{i in Φ} Hom(X, F^i Y)``.  The product of ``x`` in degree ``i``
and ``y`` in degree ``j`` is ``x`` followed by ``F^i(y)`` placed in degree
``i + j``, and zero when ``i + j`` is not in ``Φ``.  Products are written
diagrammatically everywhere ("x, then y").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

from .exactlin import (
    Coordinates,
    NoSolution,
    complement,
    intersection,
    rank,
    row_basis,
    subspace_ops,
    vstack,
)
from .homotopy import FunctorData, ProjChainMap, ProjComplex, hom_kb
from .nangle import Decomposed, NAngleInstance, pad_angle, postcomposition_matrix, precomposition_matrix
from .quiveralg import AlgebraData, ModuleMap, Representation, hom_modules


class ZeroMissing(ValueError):
    pass


class NonAdmissiblePhi(ValueError):
    pass


class NotInAddU(ValueError):
    pass


class HypothesisFailed(ArithmeticError):
    """A hypothesis of the equivalence theorem does not hold; ``clause`` names it."""

    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"{clause}: {detail}" if detail else clause)
        self.clause = clause
        self.detail = detail


# ---------------------------------------------------------------------------
# admissible sets


def admissibility_counterexample(phi) -> tuple | None:
    """A triple ``(i, j, k)`` violating admissibility, or ``None``.

    Raises:
        ZeroMissing: when ``0`` is not in ``phi``.
    """
    s = set(int(x) for x in phi)
    if 0 not in s:
        raise ZeroMissing("0 must belong to Φ")
    for i, j, k in iproduct(sorted(s), repeat=3):
        if i + j + k in s and ((i + j in s) != (j + k in s)):
            return (i, j, k)
    return None


def is_admissible(phi) -> bool:
    return admissibility_counterexample(phi) is None


class PhiSet:
    """A finite admissible subset of the integers containing 0."""

    def __init__(self, elements, check: bool = True):
        self.elements = tuple(sorted(set(int(x) for x in elements)))
        if 0 not in self.elements:
            raise ZeroMissing("0 must belong to Φ")
        if check:
            bad = admissibility_counterexample(self.elements)
            if bad is not None:
                raise NonAdmissiblePhi(f"{list(self.elements)} is not admissible: triple {bad}")

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    @property
    def nonzero(self) -> tuple:
        return tuple(x for x in self.elements if x != 0)

    def negated(self) -> "PhiSet":
        return PhiSet([-x for x in self.elements], check=False)

    def __repr__(self):
        return "{" + ",".join(str(x) for x in self.elements) + "}"


def as_phi(phi) -> PhiSet:
    return phi if isinstance(phi, PhiSet) else PhiSet(phi)


def _check_functor(phi: PhiSet, fd: FunctorData):
    if any(x < 0 for x in phi) and not fd.strictly_invertible:
        raise ValueError(f"negative degrees in Φ need a strictly invertible functor, not {fd.name}")


# ---------------------------------------------------------------------------
# graded Hom spaces


class OrbitHom:
    """``⊕_{i in Φ} Hom_{K^b}(x, F^i y)`` with one :class:`HomKb` per degree."""

    def __init__(self, x: ProjComplex, y: ProjComplex, phi: PhiSet, fd: FunctorData):
        self.x, self.y, self.phi, self.fd = x, y, phi, fd
        self.targets = {i: fd.obj(y, i) for i in phi}
        self.components = {i: hom_kb(x, self.targets[i]) for i in phi}

    @property
    def dims(self) -> dict:
        return {i: h.dim for i, h in self.components.items()}

    @property
    def dim(self) -> int:
        return sum(self.dims.values())


@dataclass
class BasisElement:
    source: int
    target: int
    degree: int
    coords: tuple  # in hom_kb(U_source, F^degree U_target) coordinates


class PerforatedYonedaData:
    """``E(U)`` for ``U`` an ordered direct sum of named complexes.

    The basis of each corner ``(a, b)`` lists degree 0 first; in a diagonal
    corner the identity of ``U_a`` is the first basis element, so the
    idempotents are basis elements.

    Attributes:
        algebra: the :class:`AlgebraData` export.
        elements: the :class:`BasisElement` behind each basis index.
    """

    def __init__(self, parts: Decomposed, phi: PhiSet, fd: FunctorData, check_phi: bool = True, name: str = "E"):
        if check_phi:
            phi = as_phi(phi)
        _check_functor(phi, fd)
        self.parts = parts
        self.phi = phi
        self.fd = fd
        self.cat = parts.cat
        self.field = self.cat.field
        self.objects = parts.objects
        m = len(self.objects)
        self.blocks: dict = {}  # (a, b, i) -> (first index, basis matrix in hom_kb coords, Coordinates)
        self.elements: list[BasisElement] = []
        tags, corners, idempotents = [], [], [None] * m
        f = self.field
        for a in range(m):
            for b in range(m):
                for i in sorted(phi, key=lambda d: (d != 0, abs(d), d)):
                    h = hom_kb(self.objects[a], fd.obj(self.objects[b], i))
                    if h.dim == 0:
                        continue
                    eye = f.eye(h.dim)
                    if a == b and i == 0:
                        ident = h.coords_matrix([ProjChainMap.identity(self.objects[a])])
                        rest = complement(ident, eye)
                        basis = vstack([ident, rest], cols=h.dim, field=f)
                    else:
                        basis = eye
                    start = len(self.elements)
                    self.blocks[(a, b, i)] = (start, basis, Coordinates(basis))
                    for r in range(h.dim):
                        self.elements.append(BasisElement(a, b, i, tuple(basis[r, k] for k in range(h.dim))))
                        tags.append(f"{parts.names[a]}>{parts.names[b]}@{i}#{r}")
                        corners.append((a, b))
                    if a == b and i == 0:
                        idempotents[a] = start
        if any(e is None for e in idempotents):
            raise ValueError("a summand has zero endomorphism ring")
        self._maps: dict = {}
        mult = {}
        for x, ex in enumerate(self.elements):
            for y, ey in enumerate(self.elements):
                if ex.target != ey.source:
                    continue
                k = ex.degree + ey.degree
                if k not in phi:
                    continue
                prod = self.multiply_maps(x, y)
                vec = self.coords_of(prod, ex.source, ey.target, k)
                if vec:
                    mult[(x, y)] = vec
        self.algebra = AlgebraData(f, tags, mult, idempotents, corners, name=name)

    # element access ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.elements)

    def chain_map(self, k: int) -> ProjChainMap:
        """Representative ``U_a -> F^i U_b`` of basis element ``k``."""
        g = self._maps.get(k)
        if g is None:
            e = self.elements[k]
            h = hom_kb(self.objects[e.source], self.fd.obj(self.objects[e.target], e.degree))
            g = self._maps[k] = h.element(list(e.coords))
        return g

    def multiply_maps(self, x: int, y: int) -> ProjChainMap:
        ex = self.elements[x]
        ey = self.elements[y]
        gx = self.chain_map(x)
        gy = self.fd.mor(self.chain_map(y), ex.degree)
        target = self.fd.obj(self.objects[ey.target], ex.degree + ey.degree)
        if gy.target.key() != target.key():
            raise ValueError("F^i F^j and F^(i+j) differ on the nose; use a strict functor")
        return gx.then(gy.retarget(gx.target, target))

    def coords_of(self, g: ProjChainMap, a: int, b: int, i: int) -> dict:
        """Sparse coordinates of a map ``U_a -> F^i U_b`` in the basis of ``E``."""
        blk = self.blocks.get((a, b, i))
        if blk is None:
            return {}
        start, basis, coords = blk
        h = hom_kb(self.objects[a], self.fd.obj(self.objects[b], i))
        c = coords(h.coords_matrix([g]))
        return {start + r: c[0, r] for r in range(basis.nrows()) if c[0, r] != 0}

    def block_range(self, a: int, b: int, i: int) -> range:
        blk = self.blocks.get((a, b, i))
        if blk is None:
            return range(0)
        return range(blk[0], blk[0] + blk[1].nrows())

    def degree0_coords(self, g: ProjChainMap, src: Sequence[int] | None = None, tgt: Sequence[int] | None = None) -> dict:
        """Coordinates of a degree-0 map between partial sums ``⊕ U_src -> ⊕ U_tgt``."""
        src = list(range(len(self.objects))) if src is None else list(src)
        tgt = list(range(len(self.objects))) if tgt is None else list(tgt)
        s = Decomposed([self.parts.parts[a] for a in src], self.cat)
        t = Decomposed([self.parts.parts[b] for b in tgt], self.cat)
        out: dict = {}
        for p, a in enumerate(src):
            for q, b in enumerate(tgt):
                for k, c in self.coords_of(s.component(g, t, p, q), a, b, 0).items():
                    out[k] = out.get(k, 0) + c
        return {k: c for k, c in out.items() if c != 0}

    def element_map(self, vec: dict, a: int, b: int, i: int) -> ProjChainMap:
        """The map ``U_a -> F^i U_b`` with sparse coordinates ``vec``."""
        h = hom_kb(self.objects[a], self.fd.obj(self.objects[b], i))
        out = ProjChainMap.zero(h.x, h.y)
        for k, c in vec.items():
            e = self.elements[k]
            if (e.source, e.target, e.degree) == (a, b, i):
                out = out + self.chain_map(k).scale(c)
        return out

    # checks ------------------------------------------------------------------
    def check_associativity(self) -> bool:
        return self.algebra.check_associativity()

    def associativity_counterexample(self) -> tuple | None:
        return self.algebra.associativity_counterexample()

    def degree_zero_indices(self) -> list[int]:
        return [k for k, e in enumerate(self.elements) if e.degree == 0]

    def describe(self) -> dict:
        return {
            "summands": self.parts.names,
            "phi": list(self.phi),
            "functor": self.fd.name,
            "dim": self.dim,
            "degree_dims": {str(i): sum(1 for e in self.elements if e.degree == i) for i in self.phi},
        }


def e_algebra(parts: Decomposed, phi, fd: FunctorData, name: str = "E") -> PerforatedYonedaData:
    """The n-perforated Yoneda algebra of ``parts``; raises :class:`NonAdmissiblePhi`."""
    return PerforatedYonedaData(parts, as_phi(phi), fd, name=name)


# ---------------------------------------------------------------------------
# E(U, U1) as a module and the map mu


def _indices(e: PerforatedYonedaData, u) -> list[int]:
    names = e.parts.names
    out = []
    for x in u:
        if isinstance(x, str):
            if x not in names:
                raise NotInAddU(f"{x!r} is not a summand of U")
            out.append(names.index(x))
        else:
            if not 0 <= int(x) < len(names):
                raise NotInAddU(f"no summand {x}")
            out.append(int(x))
    return out


class HomModule:
    """``E(U, U1) = ⊕_i Hom(U, F^i U1)`` as a left ``E(U)``-module.

    The space at idempotent ``a`` is ``⊕_i Hom(U_a, F^i U1)`` with the
    basis of each :class:`HomKb` in turn.
    """

    def __init__(self, e: PerforatedYonedaData, u1: Decomposed):
        self.e = e
        self.u1 = u1
        self.spaces = [OrbitHom(x, u1.total, e.phi, e.fd) for x in e.objects]
        self.offsets = []
        for sp in self.spaces:
            offs, tot = {}, 0
            for i in e.phi:
                offs[i] = tot
                tot += sp.components[i].dim
            self.offsets.append(offs)
        self.dims = [sp.dim for sp in self.spaces]
        f = e.field
        acts = {}
        for k, el in enumerate(e.elements):
            s, t, j = el.source, el.target, el.degree
            m = f.zeros(self.dims[t], self.dims[s])
            g = e.chain_map(k)
            for i in e.phi:
                if i + j not in e.phi:
                    continue
                h = self.spaces[t].components[i]
                hout = self.spaces[s].components[i + j]
                if h.dim == 0 or hout.dim == 0:
                    continue
                imgs = [g.then(e.fd.mor(y, j).retarget(g.target, _target(e, u1.total, i + j))) for y in h.basis()]
                c = hout.coords_matrix(imgs)
                for r in range(h.dim):
                    for q in range(hout.dim):
                        if c[r, q] != 0:
                            m[self.offsets[t][i] + r, self.offsets[s][i + j] + q] = c[r, q]
            acts[k] = m
        self.module = Representation(e.algebra, self.dims, actions=acts, check=False)

    def vector_of(self, a: int, i: int, g: ProjChainMap):
        """Row vector at idempotent ``a`` of a map ``U_a -> F^i U1``."""
        f = self.e.field
        out = f.zeros(1, self.dims[a])
        h = self.spaces[a].components[i]
        if h.dim:
            c = h.coords_matrix([g])
            for r in range(h.dim):
                out[0, self.offsets[a][i] + r] = c[0, r]
        return out


def _target(e: PerforatedYonedaData, y: ProjComplex, k: int) -> ProjComplex:
    t = e.fd.obj(y, k)
    return t


def hom_module(e: PerforatedYonedaData, u1) -> HomModule:
    idx = _indices(e, u1) if not isinstance(u1, Decomposed) else None
    d = u1 if idx is None else Decomposed([e.parts.parts[a] for a in idx], e.cat)
    return HomModule(e, d)


@dataclass
class MuData:
    """``mu: E(U1, U2) -> Hom_{E(U)}(E(U, U1), E(U, U2))`` on bases."""

    source_dim: int
    hom_dim: int
    rank: int
    degree0_rank: int
    degree0_dim: int
    maps: list
    valid: bool

    @property
    def bijective(self) -> bool:
        return self.valid and self.rank == self.source_dim == self.hom_dim

    @property
    def faithful(self) -> bool:
        return self.degree0_rank == self.degree0_dim


def mu(u1, u2, e: PerforatedYonedaData) -> MuData:
    """``x -> (y -> y x)`` for ``x in E(U1, U2)``, checked against ``hom_modules``."""
    m1, m2 = hom_module(e, u1), hom_module(e, u2)
    src = OrbitHom(m1.u1.total, m2.u1.total, e.phi, e.fd)
    f = e.field
    maps, flat, deg0 = [], [], []
    valid = True
    for k in e.phi:
        hk = src.components[k]
        for x in hk.basis():
            mats = []
            for a in range(len(e.objects)):
                mat = f.zeros(m1.dims[a], m2.dims[a])
                for i in e.phi:
                    if i + k not in e.phi:
                        continue
                    h = m1.spaces[a].components[i]
                    fx = e.fd.mor(x, i)
                    for r, y in enumerate(h.basis()):
                        img = y.then(fx.retarget(y.target, _target(e, m2.u1.total, i + k)))
                        v = m2.vector_of(a, i + k, img)
                        for q in range(m2.dims[a]):
                            if v[0, q] != 0:
                                mat[m1.offsets[a][i] + r, q] = v[0, q]
                mats.append(mat)
            g = ModuleMap(m1.module, m2.module, mats, check=False)
            try:
                g.validate()
            except ValueError:
                valid = False
            maps.append(g)
            row = [c for mat in mats for rr in range(mat.nrows()) for c in (mat[rr, q] for q in range(mat.ncols()))]
            flat.append(row)
            if k == 0:
                deg0.append(row)
    width = sum(m1.dims[a] * m2.dims[a] for a in range(len(e.objects)))
    r = rank(f.from_rows(flat, width)) if flat and width else 0
    r0 = rank(f.from_rows(deg0, width)) if deg0 and width else 0
    hdim = len(hom_modules(m1.module, m2.module))
    return MuData(src.dim, hdim, r, r0, len(deg0), maps, valid)


def mu_multiplicative(u1, u2, u3, e: PerforatedYonedaData) -> bool:
    """``mu(x y) = mu(x) mu(y)`` for all basis pairs ``x in E(U1,U2)``, ``y in E(U2,U3)``."""
    d1, d2, d3 = (hom_module(e, u) for u in (u1, u2, u3))
    a12 = OrbitHom(d1.u1.total, d2.u1.total, e.phi, e.fd)
    a23 = OrbitHom(d2.u1.total, d3.u1.total, e.phi, e.fd)
    a13 = OrbitHom(d1.u1.total, d3.u1.total, e.phi, e.fd)
    m12 = mu(u1, u2, e).maps
    m23 = mu(u2, u3, e).maps
    m13 = mu(u1, u3, e)
    # index the mu images by (degree, basis position)
    idx12 = [(k, r) for k in e.phi for r in range(a12.components[k].dim)]
    idx23 = [(k, r) for k in e.phi for r in range(a23.components[k].dim)]
    pos13 = {}
    for n, (k, r) in enumerate((k, r) for k in e.phi for r in range(a13.components[k].dim)):
        pos13[(k, r)] = n
    for p, (i, r) in enumerate(idx12):
        x = a12.components[i].basis()[r]
        for q, (j, s) in enumerate(idx23):
            lhs = m12[p].then(m23[q])
            if i + j not in e.phi:
                if not lhs.is_zero():
                    return False
                continue
            y = a23.components[j].basis()[s]
            xy = x.then(e.fd.mor(y, i).retarget(x.target, a13.targets[i + j]))
            coords = a13.components[i + j].coords(xy)
            rhs = None
            for t, c in enumerate(coords):
                if c == 0:
                    continue
                term = m13.maps[pos13[(i + j, t)]].scale(c)
                rhs = term if rhs is None else rhs + term
            if rhs is None:
                if not lhs.is_zero():
                    return False
            elif not lhs == rhs:
                return False
    return True


@dataclass
class OrthogonalityReport:
    hypothesis: bool
    isomorphism: bool | None
    degree0_dim: int
    hom_dim: int

    def to_dict(self) -> dict:
        return {"hypothesis": self.hypothesis, "isomorphism": self.isomorphism,
                "degree0_dim": self.degree0_dim, "hom_dim": self.hom_dim}


def orthogonality_iso_check(u1, u2, e: PerforatedYonedaData) -> OrthogonalityReport:
    """When ``Hom(U1, F^i U2) = 0`` for ``i != 0``, ``Hom(U1, U2) -> Hom_E(E(U,U1), E(U,U2))`` is bijective.

    With the vanishing hypothesis false, ``isomorphism`` is ``None``.
    """
    d = mu(u1, u2, e)
    m1, m2 = hom_module(e, u1), hom_module(e, u2)
    src = OrbitHom(m1.u1.total, m2.u1.total, e.phi, e.fd)
    vanish = all(src.components[i].dim == 0 for i in e.phi.nonzero)
    if not vanish:
        return OrthogonalityReport(False, None, d.degree0_dim, d.hom_dim)
    return OrthogonalityReport(True, d.valid and d.degree0_rank == d.degree0_dim == d.hom_dim, d.degree0_dim, d.hom_dim)


# ---------------------------------------------------------------------------
# approximations and orthogonality classes


def _summands(m) -> list:
    if isinstance(m, Decomposed):
        return m.parts
    if isinstance(m, ProjComplex):
        return [("M", m)]
    return list(m)


def is_left_approximation(alpha: ProjChainMap, m, phi, fd: FunctorData) -> bool:
    """Every ``X -> F^i M'`` (``i in Φ``, ``M'`` a summand of ``M``) factors through ``alpha``."""
    phi = as_phi(phi)
    for _, mp in _summands(m):
        for i in phi:
            y = fd.obj(mp, i)
            d = hom_kb(alpha.source, y).dim
            if d and rank(precomposition_matrix(alpha, y)) != d:
                return False
    return True


def is_right_approximation(alpha: ProjChainMap, m, minus_phi, fd: FunctorData) -> bool:
    """Every ``F^i M' -> Y`` (``i in minus_phi``) factors through ``alpha``."""
    for _, mp in _summands(m):
        for i in minus_phi:
            y = fd.obj(mp, i)
            d = hom_kb(y, alpha.target).dim
            if d and rank(postcomposition_matrix(y, alpha)) != d:
                return False
    return True


def script_membership(obj: ProjComplex, m, phi, fd: FunctorData, side: str) -> bool:
    """``side="X"``: ``Hom(obj, F^i M) = 0``; ``side="Y"``: ``Hom(M, F^i obj) = 0``; for ``i in Φ \\ 0``."""
    phi = as_phi(phi)
    for _, mp in _summands(m):
        for i in phi.nonzero:
            if side == "X":
                d = hom_kb(obj, fd.obj(mp, i)).dim
            elif side == "Y":
                d = hom_kb(mp, fd.obj(obj, i)).dim
            else:
                raise ValueError("side must be 'X' or 'Y'")
            if d:
                return False
    return True


# ---------------------------------------------------------------------------
# factorization subspaces and ideals


@dataclass
class FactorSpaces:
    """Degree-0 subspaces of ``E(V)`` (rows in algebra coordinates)."""

    through_add: object
    through_map: object


def _rows(field, vecs: list, n: int):
    if not vecs:
        return field.zeros(0, n)
    m = field.zeros(len(vecs), n)
    for r, v in enumerate(vecs):
        for k, c in v.items():
            m[r, k] = c
    return row_basis(m)


def factor_subspaces(e: PerforatedYonedaData, through_add: Decomposed, g: ProjChainMap | None, g_side: str = "into",
                     g_parts: Decomposed | None = None) -> FactorSpaces:
    """``A = span{u v : U_a -> M' -> U_b}`` and ``B`` = maps factoring through ``g``.

    Args:
        e: the algebra ``E(V)``.
        through_add: the summands ``M'`` spanning ``add(M)``.
        g: a map ``D -> V`` (``g_side="into"``, ``B = {s g}``) or ``V -> D``
            (``g_side="out"``, ``B = {g t}``), where ``V`` is ``e.parts.total``.
        g_parts: the decomposition of ``D`` (a single summand by default).
    """
    f = e.field
    n = e.dim
    objs = e.objects
    a_vecs = []
    for a, u in enumerate(objs):
        for b, v in enumerate(objs):
            for _, mp in through_add.parts:
                left = hom_kb(u, mp).basis()
                right = hom_kb(mp, v).basis()
                for x in left:
                    for y in right:
                        vec = e.coords_of(x.then(y), a, b, 0)
                        if vec:
                            a_vecs.append(vec)
    b_vecs = []
    if g is not None:
        vparts = e.parts
        if g_side == "into":
            d = g_parts or Decomposed.single("D", g.source)
            for q, (_, dq) in enumerate(d.parts):
                for b in range(len(objs)):
                    gb = d.component(g, vparts, q, b)
                    if gb.is_zero():
                        continue
                    for a, u in enumerate(objs):
                        for s in hom_kb(u, dq).basis():
                            vec = e.coords_of(s.then(gb), a, b, 0)
                            if vec:
                                b_vecs.append(vec)
        elif g_side == "out":
            d = g_parts or Decomposed.single("D", g.target)
            for q, (_, dq) in enumerate(d.parts):
                for a in range(len(objs)):
                    ga = vparts.component(g, d, a, q)
                    if ga.is_zero():
                        continue
                    for b, v in enumerate(objs):
                        for t in hom_kb(dq, v).basis():
                            vec = e.coords_of(ga.then(t), a, b, 0)
                            if vec:
                                b_vecs.append(vec)
        else:
            raise ValueError("g_side must be 'into' or 'out'")
    return FactorSpaces(_rows(f, a_vecs, n), _rows(f, b_vecs, n))


@dataclass
class IdealData:
    """A two-sided ideal of an E-algebra given by basis rows."""

    e: PerforatedYonedaData
    basis: object
    spaces: FactorSpaces
    closed: bool = False

    @property
    def dim(self) -> int:
        return self.basis.nrows()

    def contains(self, vec: dict) -> bool:
        if not vec:
            return True
        if self.dim == 0:
            return False
        row = _rows(self.e.field, [vec], self.e.dim)
        return rank(vstack([self.basis, row])) == self.dim

    def check_closure(self) -> bool:
        """Left and right products with every basis element stay inside."""
        alg = self.e.algebra
        for r in range(self.dim):
            v = {k: self.basis[r, k] for k in range(alg.dim) if self.basis[r, k] != 0}
            for k in range(alg.dim):
                if not self.contains(alg.multiply(v, {k: 1})) or not self.contains(alg.multiply({k: 1}, v)):
                    return False
        return True

    def vectors(self) -> list[dict]:
        return [{k: self.basis[r, k] for k in range(self.e.dim) if self.basis[r, k] != 0} for r in range(self.dim)]


def ideal_from_spaces(e: PerforatedYonedaData, spaces: FactorSpaces) -> IdealData:
    inter = intersection(spaces.through_add, spaces.through_map)
    ops = subspace_ops(spaces.through_add, spaces.through_map) if spaces.through_add.nrows() and spaces.through_map.nrows() else None
    if ops is not None and ops.intersection.nrows() != inter.nrows():
        raise ArithmeticError("intersection dimension mismatch")
    ideal = IdealData(e, inter, spaces)
    ideal.closed = ideal.check_closure()
    return ideal


@dataclass
class HypothesisReport:
    left_approximation: bool
    right_approximation: bool
    x_in_y_class: bool
    y_in_x_class: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def failed(self) -> list[str]:
        return [k for k, v in self.__dict__.items() if not v]


@dataclass
class TheoremSetup:
    """Everything derived from one angle: ``V``, ``W``, ``M``, padded angles and ``E`` algebras."""

    inst: NAngleInstance
    phi: PhiSet
    fd: FunctorData
    x: Decomposed
    y: Decomposed
    m: Decomposed
    v: Decomposed
    w: Decomposed
    bar: NAngleInstance
    tilde: NAngleInstance
    lam: PerforatedYonedaData | None = None
    gam: PerforatedYonedaData | None = None


def theorem_setup(inst: NAngleInstance, phi, fd: FunctorData) -> TheoremSetup:
    phi = as_phi(phi)
    summ = inst.summands
    x, y = summ[0], summ[-1]
    m = inst.m_parts()
    return TheoremSetup(inst, phi, fd, x, y, m, x + m, m + y, pad_angle(inst, "bar"), pad_angle(inst, "tilde"))


def check_hypotheses(setup: TheoremSetup) -> HypothesisReport:
    seq = setup.inst.sequence
    n = seq.n
    phi, fd = setup.phi, setup.fd
    left = is_left_approximation(seq.maps[0], setup.m, phi, fd)
    right = is_right_approximation(seq.maps[n - 2], setup.m, setup.phi.negated(), fd)
    xy = script_membership(setup.x.total, setup.m, phi, fd, "Y")
    yx = script_membership(setup.y.total, setup.m, phi, fd, "X")
    return HypothesisReport(left, right, xy, yx)


def require_hypotheses(setup: TheoremSetup) -> HypothesisReport:
    rep = check_hypotheses(setup)
    bad = rep.failed()
    if bad:
        raise HypothesisFailed(bad[0], f"failed hypotheses: {', '.join(bad)}")
    return rep


def ideal_I(setup: TheoremSetup, check: bool = True) -> IdealData:
    """Degree-0 endomorphisms of ``V = X + M`` through ``add(M)`` and through ``Σ^{-1}(alpha_n, 0)``."""
    if check:
        require_hypotheses(setup)
    if setup.lam is None:
        setup.lam = e_algebra(setup.v, setup.phi, setup.fd, name="Lambda")
    first = setup.tilde.sequence.maps[0]  # ± Σ^{-1} alpha~_n : Σ^{-1}Y -> V
    sy = setup.tilde.summands[0]
    spaces = factor_subspaces(setup.lam, setup.m, first.retarget(sy.total, setup.v.total), "into", sy)
    ideal = ideal_from_spaces(setup.lam, spaces)
    if not ideal.closed:
        raise ArithmeticError("I is not closed under multiplication")
    return ideal


def ideal_J(setup: TheoremSetup, check: bool = True) -> IdealData:
    """Degree-0 endomorphisms of ``W = M + Y`` through ``add(M)`` and through ``(0; alpha_n)``."""
    if check:
        require_hypotheses(setup)
    if setup.gam is None:
        setup.gam = e_algebra(setup.w, setup.phi, setup.fd, name="Gamma")
    last = setup.bar.sequence.maps[-1]  # W -> ΣX
    sx = setup.x.shift(setup.inst.suspension)
    spaces = factor_subspaces(setup.gam, setup.m, last.retarget(setup.w.total, sx.total), "out", sx)
    ideal = ideal_from_spaces(setup.gam, spaces)
    if not ideal.closed:
        raise ArithmeticError("J is not closed under multiplication")
    return ideal


def ideal_module_checks(setup: TheoremSetup, ideal: IdealData) -> dict:
    """``I E(V,M) = 0`` and the description of ``I E(V,X)`` by factorizations through ``Σ^{-1} alpha_n``."""
    e = setup.lam
    alg = e.algebra
    nx = len(setup.x)
    xs = list(range(nx))
    ms = list(range(nx, len(e.objects)))
    prods_m, prods_x = [], []
    for v in ideal.vectors():
        for k in range(alg.dim):
            t = e.elements[k].target
            w = alg.multiply(v, {k: 1})
            if not w:
                continue
            (prods_m if t in ms else prods_x).append(w)
    annihilates = not any(prods_m)
    ie_vx = _rows(e.field, prods_x, alg.dim)
    # direct description: degree 0 maps V_a -> X_b through add(M) and through Σ^{-1} alpha_n
    seq = setup.inst.sequence
    s = setup.inst.suspension
    an = seq.maps[-1].shift(-s)
    sy = setup.y.shift(-s)
    a_vecs, b_vecs = [], []
    for a, u in enumerate(e.objects):
        for b in xs:
            xb = e.objects[b]
            for _, mp in setup.m.parts:
                for g in hom_kb(u, mp).basis():
                    for h in hom_kb(mp, xb).basis():
                        vec = e.coords_of(g.then(h), a, b, 0)
                        if vec:
                            a_vecs.append(vec)
            for q, (_, yq) in enumerate(sy.parts):
                comp = sy.component(an.retarget(sy.total, setup.x.total), setup.x, q, b)
                for sm in hom_kb(u, yq).basis():
                    vec = e.coords_of(sm.then(comp), a, b, 0)
                    if vec:
                        b_vecs.append(vec)
    direct = intersection(_rows(e.field, a_vecs, alg.dim), _rows(e.field, b_vecs, alg.dim))
    same = ie_vx.nrows() == direct.nrows() and (direct.nrows() == 0 or rank(vstack([ie_vx, direct])) == direct.nrows())
    return {"annihilates_E(V,M)": annihilates, "I.E(V,X)_matches": same, "dim_I.E(V,X)": ie_vx.nrows()}


# ---------------------------------------------------------------------------
# quotients


class QuotientAlgebra(AlgebraData):
    """``B / I`` on a subset of the basis of ``B``.

    In every corner the kept basis vectors are the unit vectors (in order)
    that are independent modulo ``I``; idempotents are kept first.

    Attributes:
        parent: the algebra ``B``.
        kept: parent indices of the quotient basis.
    """

    def __init__(self, parent: AlgebraData, ideal_rows, name: str = ""):
        f = parent.field
        n = parent.dim
        self.parent = parent
        self.field = f
        self.ideal_rows = ideal_rows
        if ideal_rows.nrows():
            irows = row_basis(ideal_rows)
        else:
            irows = f.zeros(0, n)
        kept = []
        for (s, t) in sorted(set(parent.corners)):
            idx = parent.corner_basis(s, t)
            if s == t:
                e = parent.idempotents[s]
                idx = [e] + [k for k in idx if k != e]
            sub = _restrict_cols(f, irows, idx)
            units = f.eye(len(idx))
            keep = complement(sub, units) if sub.nrows() else units
            for r in range(keep.nrows()):
                j = next(c for c in range(len(idx)) if keep[r, c] != 0)
                kept.append(idx[j])
        kept.sort()
        self.kept = kept
        pos = {k: i for i, k in enumerate(kept)}
        full = vstack([_unit_rows(f, kept, n), irows], cols=n, field=f) if irows.nrows() else _unit_rows(f, kept, n)
        self._coords = Coordinates(full)
        self._nkept = len(kept)
        for e in parent.idempotents:
            if e not in pos:
                raise ValueError("an idempotent lies in the ideal")
        mult = {}
        for a, ka in enumerate(kept):
            for b, kb in enumerate(kept):
                v = parent.product_basis(ka, kb)
                if v:
                    r = self.reduce(v)
                    if r:
                        mult[(a, b)] = r
        tags = [parent.tags[k] for k in kept]
        corners = [parent.corners[k] for k in kept]
        idem = [pos[e] for e in parent.idempotents]
        super().__init__(f, tags, mult, idem, corners, name=name or parent.name + "/I")

    def reduce(self, v: dict) -> dict:
        """Quotient coordinates of a sparse parent vector."""
        f = self.field
        row = f.zeros(1, self.parent.dim)
        for k, c in v.items():
            row[0, k] = c
        c = self._coords(row)
        return {i: c[0, i] for i in range(self._nkept) if c[0, i] != 0}

    def lift(self, v: dict) -> dict:
        """The canonical section: quotient basis vector ``i`` to parent vector ``kept[i]``."""
        return {self.kept[i]: c for i, c in v.items() if c != 0}


def _restrict_cols(f, rows, cols):
    out = f.zeros(rows.nrows(), len(cols))
    for r in range(rows.nrows()):
        for j, c in enumerate(cols):
            out[r, j] = rows[r, c]
    return row_basis(out) if out.nrows() else out


def _unit_rows(f, idx, n):
    m = f.zeros(len(idx), n)
    for r, k in enumerate(idx):
        m[r, k] = 1
    return m


def quotient_algebra(e, ideal: IdealData | None = None, name: str = "") -> QuotientAlgebra:
    """``E / ideal``; associativity and idempotents are re-verified."""
    alg = e.algebra if isinstance(e, PerforatedYonedaData) else e
    rows = ideal.basis if ideal is not None else alg.field.zeros(0, alg.dim)
    q = QuotientAlgebra(alg, rows, name=name)
    if not q.check_associativity() or not q.check_idempotents():
        raise ArithmeticError("quotient algebra failed its structure checks")
    return q
