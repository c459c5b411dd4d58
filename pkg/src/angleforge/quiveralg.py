"""Bound quiver algebras, their representations, and Hom spaces between modules.

Conventions
-----------
* Paths are written in traversal order: ``a23.a36`` means first ``a23`` then
  ``a36``.  Algebra multiplication of paths is functional: ``p * q`` is the
  path "``q`` then ``p``".  A path from ``u`` to ``v`` therefore lies in the
  corner ``e_v A e_u``; we record it as ``corner = (v, u)``.
* Modules are left modules, i.e. quiver representations.  Vectors are rows
  and a map ``M(u) -> M(v)`` is a ``dim M(u) x dim M(v)`` matrix acting by
  ``x -> x * mat``.  Composites are written diagrammatically: ``f.then(g)``
  multiplies the matrices in the order ``f * g``.
* ``Hom(A e_s, A e_t) = e_s A e_t`` acting by right multiplication, so
  composition of maps between projectives is the algebra product.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import (
    CharacteristicTooSmall,
    Coordinates,
    Field,
    NoSolution,
    SparseBuilder,
    hstack,
    is_zero,
    left_nullspace,
    nullspace,
    rank,
    row_basis,
    standard_complement,
    submatrix,
    vstack,
)


class CyclicQuiver(ValueError):
    pass


class UnknownArrow(ValueError):
    pass


class ResolutionTooLong(RuntimeError):
    pass


class Quiver:
    """A finite acyclic quiver.

    Args:
        vertices: vertex labels, in order.
        arrows: triples ``(label, source, target)`` with vertex labels.
    """

    def __init__(self, vertices: Sequence, arrows: Sequence[tuple]):
        self.vertices = [str(v) for v in vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex label")
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        self.arrows = []
        for label, s, t in arrows:
            s, t = str(s), str(t)
            if s not in self.vindex or t not in self.vindex:
                raise ValueError(f"arrow {label} uses an unknown vertex")
            self.arrows.append((str(label), self.vindex[s], self.vindex[t]))
        labels = [a[0] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate arrow label")
        self.aindex = {a[0]: i for i, a in enumerate(self.arrows)}
        self._check_acyclic()

    def _check_acyclic(self):
        n = len(self.vertices)
        indeg = [0] * n
        for _, s, t in self.arrows:
            indeg[t] += 1
        ready = [v for v in range(n) if indeg[v] == 0]
        seen = 0
        while ready:
            v = ready.pop()
            seen += 1
            for _, s, t in self.arrows:
                if s == v:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        ready.append(t)
        if seen != n:
            raise CyclicQuiver("quiver has an oriented cycle")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [(l, self.vertices[t], self.vertices[s]) for l, s, t in self.arrows])

    def paths(self) -> list[tuple[int, int, tuple]]:
        """All paths as ``(source, target, arrow-index tuple)``, by length then lexicographically."""
        out = [(v, v, ()) for v in range(self.n)]
        layer = [(s, t, (i,)) for i, (_, s, t) in enumerate(self.arrows)]
        while layer:
            layer.sort(key=lambda p: p[2])
            out.extend(layer)
            nxt = []
            for s, t, p in layer:
                for i, (_, a, b) in enumerate(self.arrows):
                    if a == t:
                        nxt.append((s, b, p + (i,)))
            layer = nxt
        return out

    def path_name(self, path: tuple, vertex: int | None = None) -> str:
        if not path:
            return f"e{self.vertices[vertex]}"
        return ".".join(self.arrows[i][0] for i in path)


class RelationSet:
    """Linear combinations of paths, each combination homogeneous.

    ``relations`` is a list of relations; each relation is a list of
    ``(coefficient, [arrow labels in traversal order])``.
    """

    def __init__(self, relations: Iterable[Iterable[tuple]]):
        self.relations = [[(Fraction(c), [str(a) for a in p]) for c, p in rel] for rel in relations]

    def validate(self, q: Quiver):
        """Return ``[(source, target, [(coeff, arrow-index tuple)])]``."""
        out = []
        for rel in self.relations:
            if not rel:
                raise ValueError("empty relation")
            ends = set()
            terms = []
            for c, labels in rel:
                if len(labels) < 2:
                    raise ValueError("relation paths must have length at least 2")
                idx = []
                for lab in labels:
                    if lab not in q.aindex:
                        raise UnknownArrow(lab)
                    idx.append(q.aindex[lab])
                for a, b in zip(idx, idx[1:]):
                    if q.arrows[a][2] != q.arrows[b][1]:
                        raise ValueError(f"path {'.'.join(labels)} is not composable")
                ends.add((q.arrows[idx[0]][1], q.arrows[idx[-1]][2]))
                terms.append((c, tuple(idx)))
            if len(ends) != 1:
                raise ValueError("relation is not homogeneous in (source, target)")
            s, t = ends.pop()
            out.append((s, t, terms))
        return out


class AlgebraData:
    """A finite-dimensional algebra with a corner-homogeneous basis.

    Args:
        field: ground field.
        tags: basis labels.
        mult: sparse structure constants, ``mult[(i, j)] = {k: c}`` meaning
            ``b_i * b_j = sum c * b_k``; missing pairs multiply to zero.
        idempotents: basis indices of a complete set of orthogonal idempotents.
        corners: ``corners[k] = (s, t)`` with ``e_s b_k e_t = b_k`` (positions
            in ``idempotents``).
        radical: rows spanning the Jacobson radical; computed when omitted.
    """

    def __init__(self, field: Field, tags, mult, idempotents, corners, radical=None, name=""):
        self.field = field
        self.tags = list(tags)
        self.mult = {k: {i: field(c) for i, c in v.items() if c != 0} for k, v in mult.items()}
        self.mult = {k: v for k, v in self.mult.items() if v}
        self.idempotents = list(idempotents)
        self.corners = list(corners)
        self.name = name
        self.dim = len(self.tags)
        self._corner_index = {}
        for k, c in enumerate(self.corners):
            self._corner_index.setdefault(c, []).append(k)
        self._radical = radical
        self._left = None

    # basic access ----------------------------------------------------------
    @property
    def n_idem(self) -> int:
        return len(self.idempotents)

    def corner_basis(self, s: int, t: int) -> list[int]:
        """Basis indices of ``e_s A e_t``."""
        return self._corner_index.get((s, t), [])

    def product_basis(self, i: int, j: int) -> dict:
        return self.mult.get((i, j), {})

    def multiply(self, u: dict, v: dict) -> dict:
        """Product of sparse vectors ``{index: coeff}``."""
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c != 0}

    def unit(self) -> dict:
        return {i: self.field.one for i in self.idempotents}

    def generators(self) -> list[int]:
        """Basis elements that, with the idempotents, generate the algebra."""
        idem = set(self.idempotents)
        return [k for k in range(self.dim) if k not in idem]

    @property
    def radical(self):
        if self._radical is None:
            self._radical = self._trace_radical()
        return self._radical

    # checks ------------------------------------------------------------------
    def associativity_counterexample(self) -> tuple | None:
        """A basis triple ``(i, j, l)`` with ``(b_i b_j) b_l != b_i (b_j b_l)``, or ``None``.

        Only triples where ``b_i b_j`` or ``b_j b_l`` is nonzero can fail, so
        those are the ones visited.
        """
        triples = set()
        for (i, j) in self.mult:
            for l in range(self.dim):
                triples.add((i, j, l))
                triples.add((l, i, j))
        for i, j, l in sorted(triples):
            a = self.multiply(self.product_basis(i, j), {l: 1})
            b = self.multiply({i: 1}, self.product_basis(j, l))
            if a != b:
                return (i, j, l)
        return None

    def check_associativity(self) -> bool:
        return self.associativity_counterexample() is None

    def check_idempotents(self) -> bool:
        f = self.field
        for a, i in enumerate(self.idempotents):
            for b, j in enumerate(self.idempotents):
                want = {i: f.one} if a == b else {}
                if self.product_basis(i, j) != want:
                    return False
        for k, (s, t) in enumerate(self.corners):
            es, et = self.idempotents[s], self.idempotents[t]
            if self.product_basis(es, k) != {k: f.one} or self.product_basis(k, et) != {k: f.one}:
                return False
        return True

    def check_radical(self) -> bool:
        """Radical rows span a nilpotent two-sided ideal with semisimple quotient."""
        rad = self.radical
        f = self.field
        if rad.nrows() == 0:
            return self._trace_radical().nrows() == 0
        coords = Coordinates(rad)
        vecs = [_row_dict(rad, r) for r in range(rad.nrows())]
        for v in vecs:
            for k in range(self.dim):
                for w in (self.multiply(v, {k: 1}), self.multiply({k: 1}, v)):
                    if w and not coords.contains(_dict_row(f, w, self.dim)):
                        return False
        # nilpotency: rad^m = 0 for some m <= dim
        power = vecs
        for _ in range(self.dim + 1):
            if not power:
                break
            nxt = [self.multiply(p, v) for p in power for v in vecs]
            nxt = [w for w in nxt if w]
            if not nxt:
                power = []
                break
            basis = row_basis(vstack([_dict_row(f, w, self.dim) for w in nxt]))
            power = [_row_dict(basis, r) for r in range(basis.nrows())]
        if power:
            return False
        return self._trace_radical().nrows() == rad.nrows()

    def _trace_radical(self):
        """Radical as the kernel of the trace form ``(x, y) -> tr(L_{xy})``.

        Exact in characteristic 0, and in characteristic p whenever p exceeds
        the dimension (all fixtures here).
        """
        f = self.field
        n = self.dim
        if 0 < f.p <= n:
            raise CharacteristicTooSmall(f"trace form needs characteristic 0 or above {n}, got {f.name}")
        # tr(L_z) for basis z: coefficient of b_k in z*b_k summed over k
        tr = [f.zero] * n
        for (i, j), v in self.mult.items():
            if j in v:
                tr[i] += v[j]
        gram = f.zeros(n, n)
        for (i, j), v in self.mult.items():
            s = sum((c * tr[k] for k, c in v.items()), f.zero)
            if s != 0:
                gram[i, j] = s
        ker = left_nullspace(gram)
        return row_basis(ker) if ker.nrows() else f.zeros(0, n)

    def opposite(self) -> "AlgebraData":
        mult = {(j, i): v for (i, j), v in self.mult.items()}
        corners = [(t, s) for s, t in self.corners]
        return AlgebraData(self.field, self.tags, mult, self.idempotents, corners, self._radical, name=self.name + "^op")

    def describe(self) -> dict:
        return {
            "name": self.name,
            "field": self.field.name,
            "dim": self.dim,
            "idempotents": len(self.idempotents),
            "radical_dim": self.radical.nrows(),
            "basis": list(self.tags),
            "cartan": [[len(self.corner_basis(s, t)) for t in range(self.n_idem)] for s in range(self.n_idem)],
        }


def _row_dict(m, r) -> dict:
    return {j: m[r, j] for j in range(m.ncols()) if m[r, j] != 0}


def _dict_row(field: Field, d: dict, n: int):
    out = field.zeros(1, n)
    for k, v in d.items():
        out[0, k] = v
    return out


class PathAlgebra(AlgebraData):
    """``kQ/I`` with a monomial basis of standard paths.

    ``paths[k] = (source, target, arrow tuple)``.  Arrow ``a: u -> v`` lies in
    ``e_v A e_u``.
    """

    def __init__(self, quiver: Quiver, field, paths, mult, reductions, relations, name=""):
        self.quiver = quiver
        self.paths = paths
        self.relations = relations
        self._reductions = reductions
        n = quiver.n
        tags = [quiver.path_name(p, s) for s, t, p in paths]
        idem = [k for k, (s, t, p) in enumerate(paths) if not p]
        corners = [(t, s) for s, t, p in paths]
        rad = field.zeros(len(paths) - n, len(paths))
        for r, k in enumerate(k for k, (_, _, p) in enumerate(paths) if p):
            rad[r, k] = 1
        super().__init__(field, tags, mult, idem, corners, rad, name=name)
        self.arrow_basis = [self.path_index[(i,)] for i in range(len(quiver.arrows))]

    @property
    def path_index(self) -> dict:
        if not hasattr(self, "_pidx"):
            self._pidx = {p[2] if p[2] else ("e", p[0]): k for k, p in enumerate(self.paths)}
        return self._pidx

    def generators(self) -> list[int]:
        return list(self.arrow_basis)

    def reduce_path(self, s: int, path: tuple) -> dict:
        """Normal form of an arbitrary path as ``{basis index: coeff}``."""
        if not path:
            return {self.path_index[("e", s)]: self.field.one}
        return self._reductions.get(path, {})

    def opposite(self) -> "PathAlgebra":
        q = self.quiver.opposite()
        paths = [(t, s, tuple(reversed(p))) for s, t, p in self.paths]
        mult = {(j, i): v for (i, j), v in self.mult.items()}
        red = {tuple(reversed(p)): v for p, v in self._reductions.items()}
        rels = [(t, s, [(c, tuple(reversed(p))) for c, p in terms]) for s, t, terms in self.relations]
        return PathAlgebra(q, self.field, paths, mult, red, rels, name=self.name + "^op")


def build_algebra(q: Quiver, r: RelationSet | None = None, field: Field | None = None, name: str = "A") -> PathAlgebra:
    """Build ``kQ/I`` where ``I`` is the ideal generated by ``r``.

    The ideal is the linear span of ``u.rho.w`` over relations ``rho`` and
    paths ``u`` ending at the source of ``rho`` and ``w`` starting at its
    target.  In each (source, target) block the longest paths are eliminated
    first, so the surviving standard paths are the shortest possible.
    """
    field = field or Field.rational()
    rels = (r or RelationSet([])).validate(q)
    allpaths = q.paths()
    blocks: dict = {}
    for s, t, p in allpaths:
        blocks.setdefault((s, t), []).append(p)
    ending = {}
    starting = {}
    for s, t, p in allpaths:
        ending.setdefault(t, []).append((s, p))
        starting.setdefault(s, []).append((t, p))

    gens: dict = {}
    for rs, rt, terms in rels:
        for s0, u in ending.get(rs, []):
            for t0, w in starting.get(rt, []):
                elt = {}
                for c, p in terms:
                    key = u + p + w
                    elt[key] = elt.get(key, 0) + c
                gens.setdefault((s0, t0), []).append(elt)

    standard = set()
    reductions: dict = {}
    for key, plist in blocks.items():
        order = list(reversed(plist))  # longest first, so they become pivots
        col = {p: i for i, p in enumerate(order)}
        elts = gens.get(key, [])
        if elts:
            m = field.zeros(len(elts), len(order))
            for r_, e in enumerate(elts):
                for p, c in e.items():
                    if c != 0:
                        m[r_, col[p]] = field(c)
            red = row_basis(m)
        else:
            red = field.zeros(0, len(order))
        piv = {}
        for i in range(red.nrows()):
            j = next(j for j in range(red.ncols()) if red[i, j] != 0)
            piv[j] = i
        for j, p in enumerate(order):
            if j in piv:
                i = piv[j]
                reductions[p] = {order[jj]: -red[i, jj] for jj in range(red.ncols()) if jj != j and red[i, jj] != 0}
            else:
                standard.add((key[0], p))
                reductions[p] = None

    paths = [(s, t, p) for s, t, p in allpaths if (s, p) in standard]
    index = {p if p else ("e", s): k for k, (s, t, p) in enumerate(paths)}
    red_idx = {}
    for p, v in reductions.items():
        if not p:
            continue
        if v is None:
            red_idx[p] = {index[p]: field.one}
        else:
            red_idx[p] = {index[pp]: c for pp, c in v.items()}

    mult: dict = {}
    for i, (si, ti, pi) in enumerate(paths):
        for j, (sj, tj, pj) in enumerate(paths):
            if tj != si:
                continue
            if not pi:
                mult[(i, j)] = {j: field.one}
            elif not pj:
                mult[(i, j)] = {i: field.one}
            else:
                v = red_idx.get(pj + pi, {})
                if v:
                    mult[(i, j)] = dict(v)
    alg = PathAlgebra(q, field, paths, mult, red_idx, rels, name=name)
    if not alg.check_associativity():
        raise ArithmeticError("structure constants are not associative")
    return alg


# ---------------------------------------------------------------------------
# modules


class Representation:
    """A finite-dimensional left module over a corner-homogeneous algebra.

    For a :class:`PathAlgebra` the module is given by one matrix per arrow;
    for other algebras by one matrix per basis element (``actions``).  The
    matrix of ``b in e_s A e_t`` maps the space at ``t`` to the space at ``s``.
    """

    def __init__(self, algebra: AlgebraData, dims: Sequence[int], arrows: Sequence | None = None, actions: dict | None = None, check: bool = True):
        self.algebra = algebra
        self.field = algebra.field
        self.dims = list(dims)
        if len(self.dims) != algebra.n_idem:
            raise ValueError("one dimension per idempotent required")
        self._actions: dict = {}
        if isinstance(algebra, PathAlgebra):
            if arrows is None:
                if actions is None:
                    raise ValueError("arrow matrices required")
                arrows = [actions[k] for k in algebra.arrow_basis]
            self.arrows = list(arrows)
            for i, (_, s, t) in enumerate(algebra.quiver.arrows):
                m = self.arrows[i]
                if (m.nrows(), m.ncols()) != (self.dims[s], self.dims[t]):
                    raise ValueError(f"arrow matrix {i} has the wrong shape")
        else:
            if actions is None:
                raise ValueError("action matrices required")
            self.arrows = None
            self._actions = dict(actions)
        if check:
            self.validate()

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def action(self, k: int):
        """Matrix of basis element ``k`` (from ``M(t)`` to ``M(s)`` for corner ``(s, t)``)."""
        m = self._actions.get(k)
        if m is not None:
            return m
        alg = self.algebra
        s, t = alg.corners[k]
        if isinstance(alg, PathAlgebra):
            _, _, p = alg.paths[k]
            if not p:
                m = self.field.eye(self.dims[s])
            else:
                m = self.arrows[p[0]]
                for a in p[1:]:
                    m = m * self.arrows[a]
        else:
            m = self.field.zeros(self.dims[t], self.dims[s])
        self._actions[k] = m
        return m

    def act(self, element: dict, s: int, t: int):
        """Matrix of a sparse element of ``e_s A e_t``."""
        out = self.field.zeros(self.dims[t], self.dims[s])
        for k, c in element.items():
            out += c * self.action(k)
        return out

    def validate(self):
        alg = self.algebra
        if isinstance(alg, PathAlgebra):
            for s, t, terms in alg.relations:
                total = self.field.zeros(self.dims[s], self.dims[t])
                for c, p in terms:
                    m = self.arrows[p[0]]
                    for a in p[1:]:
                        m = m * self.arrows[a]
                    total += self.field(c) * m
                if not is_zero(total):
                    raise ValueError("representation violates a relation")
            return
        # general algebras: module axioms on all pairs
        for (i, j), v in alg.mult.items():
            lhs = self.action(j) * self.action(i)
            s, t = alg.corners[i][0], alg.corners[j][1]
            rhs = self.act(v, s, t)
            if lhs != rhs:
                raise ValueError("action does not respect the structure constants")
        for a, e in enumerate(alg.idempotents):
            if self.action(e) != self.field.eye(self.dims[a]):
                raise ValueError("idempotent does not act as the identity")

    def generator_elements(self) -> list[int]:
        return self.algebra.generators()

    def dual(self, opposite: AlgebraData) -> "Representation":
        """``D M`` as a module over ``opposite`` (same basis, reversed product)."""
        if isinstance(opposite, PathAlgebra):
            return Representation(opposite, self.dims, [m.transpose() for m in self.arrows], check=False)
        return Representation(opposite, self.dims, actions={k: self.action(k).transpose() for k in range(self.algebra.dim)}, check=False)

    def __repr__(self):
        return f"Representation(dims={self.dims})"


class ModuleMap:
    """A homomorphism given by one matrix per idempotent."""

    def __init__(self, source: Representation, target: Representation, mats: Sequence, check: bool = True):
        self.source = source
        self.target = target
        self.mats = list(mats)
        if check:
            self.validate()

    def validate(self):
        for v, m in enumerate(self.mats):
            if (m.nrows(), m.ncols()) != (self.source.dims[v], self.target.dims[v]):
                raise ValueError("vertex matrix has the wrong shape")
        alg = self.source.algebra
        for k in self.source.generator_elements():
            s, t = alg.corners[k]
            if self.source.action(k) * self.mats[s] != self.mats[t] * self.target.action(k):
                raise ValueError("map is not natural")

    def then(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, other.target, [a * b for a, b in zip(self.mats, other.mats)], check=False)

    def __add__(self, other):
        return ModuleMap(self.source, self.target, [a + b for a, b in zip(self.mats, other.mats)], check=False)

    def scale(self, c):
        return ModuleMap(self.source, self.target, [c * a for a in self.mats], check=False)

    def is_zero(self) -> bool:
        return all(is_zero(m) for m in self.mats)

    def __eq__(self, other):
        return isinstance(other, ModuleMap) and all(a == b for a, b in zip(self.mats, other.mats))

    def rank(self) -> int:
        return sum(rank(m) for m in self.mats)


def identity_map(m: Representation) -> ModuleMap:
    return ModuleMap(m, m, [m.field.eye(d) for d in m.dims], check=False)


def zero_map(m: Representation, n: Representation) -> ModuleMap:
    return ModuleMap(m, n, [m.field.zeros(a, b) for a, b in zip(m.dims, n.dims)], check=False)


def projective(a: AlgebraData, t: int) -> Representation:
    """``P_t = A e_t``; the space at ``v`` has basis ``e_v A e_t``."""
    return Representation(a, [len(a.corner_basis(v, t)) for v in range(a.n_idem)], actions=_regular_actions(a, t, left=True), check=False) if not isinstance(a, PathAlgebra) else _path_projective(a, t)


def _regular_actions(a: AlgebraData, t: int, left: bool) -> dict:
    f = a.field
    acts = {}
    for k, (s, u) in enumerate(a.corners):
        src = a.corner_basis(u, t)
        dst = a.corner_basis(s, t)
        pos = {b: i for i, b in enumerate(dst)}
        m = f.zeros(len(src), len(dst))
        for r, x in enumerate(src):
            for b, c in a.product_basis(k, x).items():
                m[r, pos[b]] = c
        acts[k] = m
    return acts


def _path_projective(a: PathAlgebra, t: int) -> Representation:
    f = a.field
    dims = [len(a.corner_basis(v, t)) for v in range(a.n_idem)]
    mats = []
    for i, (_, u, v) in enumerate(a.quiver.arrows):
        k = a.arrow_basis[i]
        src = a.corner_basis(u, t)
        dst = a.corner_basis(v, t)
        pos = {b: j for j, b in enumerate(dst)}
        m = f.zeros(len(src), len(dst))
        for r, x in enumerate(src):
            for b, c in a.product_basis(k, x).items():
                m[r, pos[b]] = c
        mats.append(m)
    return Representation(a, dims, mats, check=False)


def injective(a: AlgebraData, t: int) -> Representation:
    """``I_t = D(e_t A)``; the space at ``v`` is dual to ``e_t A e_v`` (same basis order)."""
    f = a.field
    dims = [len(a.corner_basis(t, v)) for v in range(a.n_idem)]

    def mat(k):
        s, u = a.corners[k]  # b_k in e_s A e_u maps I_t(u) -> I_t(s)
        src = a.corner_basis(t, u)
        dst = a.corner_basis(t, s)
        pos = {b: i for i, b in enumerate(src)}
        m = f.zeros(len(src), len(dst))
        for j, y in enumerate(dst):
            for b, c in a.product_basis(y, k).items():
                m[pos[b], j] = c
        return m

    if isinstance(a, PathAlgebra):
        return Representation(a, dims, [mat(k) for k in a.arrow_basis], check=False)
    return Representation(a, dims, actions={k: mat(k) for k in range(a.dim)}, check=False)


def nakayama_projective(a: AlgebraData, t: int) -> Representation:
    """``nu(A e_t) = D(e_t A)``, the injective envelope of the simple at ``t``."""
    return injective(a, t)


def simple(a: AlgebraData, t: int) -> Representation:
    dims = [1 if v == t else 0 for v in range(a.n_idem)]
    f = a.field
    if isinstance(a, PathAlgebra):
        mats = [f.zeros(dims[s], dims[u]) for _, s, u in a.quiver.arrows]
        return Representation(a, dims, mats, check=False)
    acts = {}
    for k, (s, u) in enumerate(a.corners):
        acts[k] = f.eye(1) if (k == a.idempotents[t]) else f.zeros(dims[u], dims[s])
    return Representation(a, dims, actions=acts, check=False)


def direct_sum(mods: Sequence[Representation], algebra: AlgebraData | None = None) -> Representation:
    """Direct sum; the space at each idempotent is the concatenation in order."""
    if not mods:
        if algebra is None:
            raise ValueError("empty sum needs an algebra")
        return zero_module(algebra)
    a = mods[0].algebra
    f = a.field
    dims = [sum(m.dims[v] for m in mods) for v in range(a.n_idem)]

    def block(k, s, t):
        out = f.zeros(dims[t], dims[s])
        r0 = c0 = 0
        for m in mods:
            blk = m.action(k)
            for i in range(blk.nrows()):
                for j in range(blk.ncols()):
                    if blk[i, j] != 0:
                        out[r0 + i, c0 + j] = blk[i, j]
            r0 += m.dims[t]
            c0 += m.dims[s]
        return out

    if isinstance(a, PathAlgebra):
        mats = []
        for i, (_, s, t) in enumerate(a.quiver.arrows):
            mats.append(block(a.arrow_basis[i], t, s))
        return Representation(a, dims, mats, check=False)
    acts = {k: block(k, s, t) for k, (s, t) in enumerate(a.corners)}
    return Representation(a, dims, actions=acts, check=False)


def zero_module(a: AlgebraData) -> Representation:
    f = a.field
    z = [0] * a.n_idem
    if isinstance(a, PathAlgebra):
        return Representation(a, z, [f.zeros(0, 0) for _ in a.quiver.arrows], check=False)
    return Representation(a, z, actions={k: f.zeros(0, 0) for k in range(a.dim)}, check=False)


def submodule(m: Representation, bases: Sequence) -> tuple[Representation, ModuleMap]:
    """Realize the submodule spanned at each idempotent by the given rows.

    ``bases[v]`` must be independent rows in ``M(v)`` closed under the action.
    Returns the submodule and its inclusion.
    """
    a = m.algebra
    f = m.field
    coords = [Coordinates(b) for b in bases]
    dims = [b.nrows() for b in bases]

    def restrict(k):
        s, t = a.corners[k]
        img = bases[t] * m.action(k) if bases[t].nrows() else f.zeros(0, m.dims[s])
        return coords[s](img) if img.nrows() else f.zeros(0, dims[s])

    if isinstance(a, PathAlgebra):
        sub = Representation(a, dims, [restrict(k) for k in a.arrow_basis], check=False)
    else:
        sub = Representation(a, dims, actions={k: restrict(k) for k in range(a.dim)}, check=False)
    return sub, ModuleMap(sub, m, list(bases), check=False)


def kernel(g: ModuleMap) -> tuple[Representation, ModuleMap]:
    f = g.source.field
    bases = []
    for v, mat in enumerate(g.mats):
        if mat.nrows() == 0:
            bases.append(f.zeros(0, 0))
        elif mat.ncols() == 0:
            bases.append(f.eye(mat.nrows()))
        else:
            bases.append(left_nullspace(mat))
    return submodule(g.source, bases)


def radical_subspaces(m: Representation) -> list:
    """Rows spanning ``(rad A) M`` at each idempotent."""
    a = m.algebra
    f = m.field
    parts = [[] for _ in range(a.n_idem)]
    for k in m.generator_elements():
        s, t = a.corners[k]
        if s == t and k in a.idempotents:
            continue
        act = m.action(k)
        if act.nrows() and act.ncols():
            parts[s].append(act)
    out = []
    for v in range(a.n_idem):
        if parts[v]:
            out.append(row_basis(vstack(parts[v])))
        else:
            out.append(f.zeros(0, m.dims[v]))
    return out


def top_generators(m: Representation, extra: Sequence | None = None) -> list[tuple[int, object]]:
    """Generators of ``M`` modulo ``rad M + extra``: pairs ``(idempotent, row vector)``.

    The complement at each idempotent consists of unit vectors at non-pivot
    columns, which makes the choice canonical.
    """
    f = m.field
    rad = radical_subspaces(m)
    gens = []
    for v in range(m.algebra.n_idem):
        sub = rad[v]
        if extra is not None and extra[v].nrows():
            sub = vstack([sub, extra[v]], cols=m.dims[v], field=f)
        comp = standard_complement(sub, m.dims[v], f)
        for r in range(comp.nrows()):
            gens.append((v, submatrix(comp, [r])))
    return gens


def yoneda_map(p_t: Representation, m: Representation, t: int, vec) -> ModuleMap:
    """The map ``A e_t -> M`` sending ``e_t`` to ``vec in M(t)``."""
    a = m.algebra
    f = m.field
    mats = []
    for v in range(a.n_idem):
        basis = a.corner_basis(v, t)
        out = f.zeros(len(basis), m.dims[v])
        for r, b in enumerate(basis):
            img = vec * m.action(b)
            for j in range(m.dims[v]):
                if img[0, j] != 0:
                    out[r, j] = img[0, j]
        mats.append(out)
    return ModuleMap(p_t, m, mats, check=False)


def hom_modules(m: Representation, n: Representation) -> list[ModuleMap]:
    """Basis of ``Hom_A(M, N)`` from one dense system of naturality equations."""
    a = m.algebra
    f = m.field
    offs = []
    tot = 0
    for v in range(a.n_idem):
        offs.append(tot)
        tot += m.dims[v] * n.dims[v]
    eqs = []
    for k in m.generator_elements():
        s, t = a.corners[k]
        am, an = m.action(k), n.action(k)
        # am * X_s - X_t * an = 0 ; am: m(t)->m(s) rows m.dims[t]
        rows = m.dims[t] * n.dims[s]
        if rows == 0:
            continue
        sb = SparseBuilder(rows, tot)
        for i in range(m.dims[t]):
            for j in range(n.dims[s]):
                r = i * n.dims[s] + j
                for l in range(m.dims[s]):
                    c = am[i, l]
                    if c != 0:
                        sb.add(r, offs[s] + l * n.dims[s] + j, c)
                for l in range(n.dims[t]):
                    c = an[l, j]
                    if c != 0:
                        sb.add(r, offs[t] + i * n.dims[t] + l, -c)
        eqs.append(sb.to_mat(f))
    if tot == 0:
        return []
    sol = nullspace(vstack(eqs)) if eqs else f.eye(tot)
    out = []
    for r in range(sol.nrows()):
        mats = []
        for v in range(a.n_idem):
            d1, d2 = m.dims[v], n.dims[v]
            mm = f.zeros(d1, d2)
            for i in range(d1):
                for j in range(d2):
                    mm[i, j] = sol[r, offs[v] + i * d2 + j]
            mats.append(mm)
        out.append(ModuleMap(m, n, mats, check=False))
    return out


class ProjectiveResolution:
    """A minimal projective resolution ``... -> P_1 -> P_0 -> M``.

    ``terms[i]`` lists the idempotents of the indecomposable summands of
    ``P_i``; ``modules[i]`` is ``P_i`` as a representation; ``maps[i]`` is
    the differential ``P_{i+1} -> P_i`` and ``augmentation`` is ``P_0 -> M``.
    """

    def __init__(self, module, terms, modules, maps, augmentation):
        self.module = module
        self.terms = terms
        self.modules = modules
        self.maps = maps
        self.augmentation = augmentation

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def check(self) -> bool:
        """Exactness by rank counts plus vanishing of consecutive composites."""
        for g, h in zip(self.maps[1:], self.maps):
            if not g.then(h).is_zero():
                return False
        if self.maps and not self.maps[0].then(self.augmentation).is_zero():
            return False
        # exactness: dim P_i = rank(d_i) + rank(d_{i+1}); augmentation surjective
        if self.augmentation.rank() != self.module.dim:
            return False
        ranks = [self.augmentation.rank()] + [g.rank() for g in self.maps] + [0]
        for i, p in enumerate(self.modules):
            if p.dim != ranks[i] + ranks[i + 1]:
                return False
        return True


def projective_cover(m: Representation) -> tuple[list[int], Representation, ModuleMap]:
    a = m.algebra
    gens = top_generators(m)
    terms = [v for v, _ in gens]
    p = direct_sum([projective(a, v) for v in terms], a)
    mats = []
    for v in range(a.n_idem):
        blocks = [yoneda_map(projective(a, t), m, t, vec).mats[v] for t, vec in gens]
        mats.append(vstack(blocks, cols=m.dims[v], field=m.field) if blocks else m.field.zeros(0, m.dims[v]))
    return terms, p, ModuleMap(p, m, mats, check=False)


def min_proj_resolution(m: Representation, bound: int = 32) -> ProjectiveResolution:
    """Minimal projective resolution, computed by iterated projective covers.

    Raises:
        ResolutionTooLong: if more than ``bound + 1`` projective terms are needed.
    """
    terms, p0, eps = projective_cover(m)
    all_terms = [terms]
    modules = [p0]
    maps = []
    cur = eps
    while True:
        k, inc = kernel(cur)
        if k.dim == 0:
            break
        if len(all_terms) > bound:
            raise ResolutionTooLong(f"minimal resolution longer than {bound}")
        t, p, cov = projective_cover(k)
        d = cov.then(inc)
        all_terms.append(t)
        modules.append(p)
        maps.append(d)
        cur = d
    res = ProjectiveResolution(m, all_terms, modules, maps, eps)
    if not res.check():
        raise ArithmeticError("resolution failed its exactness check")
    return res


def global_dimension(a: AlgebraData, bound: int = 32) -> int:
    """Maximum projective dimension of the simples."""
    return max(min_proj_resolution(simple(a, t), bound).length for t in range(a.n_idem))
