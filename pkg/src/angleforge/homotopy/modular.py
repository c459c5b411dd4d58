"""Complexes of modules, projective replacement and lifting through quasi-isomorphisms.

A map from a complex of projectives ``X`` into a module complex ``C`` is held
in Yoneda form: for every summand ``B e_s`` of ``X^i`` one row vector in
``C^i`` at idempotent ``s`` (the image of ``e_s``).
"""

from __future__ import annotations

from typing import Sequence

from ..exactlin import (
    Coordinates,
    Field,
    SparseBuilder,
    hstack,
    is_zero,
    left_nullspace,
    rank,
    row_basis,
    solve_left,
    submatrix,
    vstack,
)
from ..quiveralg import (
    AlgebraData,
    ModuleMap,
    Representation,
    ResolutionTooLong,
    direct_sum as module_sum,
    injective,
    projective,
    submodule,
    top_generators,
    zero_module,
)
from .core import BlockMap, GradedLayout, Layout, ProjCategory, ProjChainMap, ProjComplex, _add_postmul, _add_premul


class ModuleComplex:
    """A bounded complex of modules with differentials ``d^i: C^i -> C^{i+1}``."""

    def __init__(self, algebra: AlgebraData, terms: dict, diffs: dict, check: bool = True):
        self.algebra = algebra
        self.field = algebra.field
        self.terms = {i: m for i, m in terms.items() if m.dim}
        self.diffs = {i: d for i, d in diffs.items() if i in self.terms and i + 1 in self.terms}
        if check:
            self.check()

    def term(self, i) -> Representation:
        return self.terms.get(i) or zero_module(self.algebra)

    def diff_at(self, i: int, v: int):
        """Matrix of ``d^i`` at idempotent ``v``."""
        d = self.diffs.get(i)
        if d is not None:
            return d.mats[v]
        return self.field.zeros(self.term(i).dims[v], self.term(i + 1).dims[v])

    @property
    def degrees(self):
        return sorted(self.terms)

    @property
    def lo(self):
        return min(self.terms) if self.terms else 0

    @property
    def hi(self):
        return max(self.terms) if self.terms else -1

    def check(self):
        for i, d in self.diffs.items():
            e = self.diffs.get(i + 1)
            if e is not None and not d.then(e).is_zero():
                raise ValueError(f"d^{i+1} d^{i} != 0")

    def cohomology_dims(self) -> dict:
        """``{degree: [dim H^i at each idempotent]}``, by rank counts."""
        out = {}
        n = self.algebra.n_idem
        for i in self.degrees:
            dims = []
            for v in range(n):
                dv = self.term(i).dims[v]
                r_out = rank(self.diff_at(i, v)) if dv else 0
                r_in = rank(self.diff_at(i - 1, v)) if self.term(i - 1).dims[v] and dv else 0
                dims.append(dv - r_out - r_in)
            out[i] = dims
        return out

    def is_acyclic(self) -> bool:
        return all(not any(d) for d in self.cohomology_dims().values())

    def shift(self, j: int) -> "ModuleComplex":
        if j == 0:
            return self
        sign = -1 if j % 2 else 1
        return ModuleComplex(
            self.algebra,
            {i - j: m for i, m in self.terms.items()},
            {i - j: (d.scale(self.field(sign)) if sign < 0 else d) for i, d in self.diffs.items()},
            check=False,
        )

    def dual(self, opposite: AlgebraData) -> "ModuleComplex":
        """``D C`` over the opposite algebra: ``(DC)^i = D(C^{-i})``."""
        terms = {-i: m.dual(opposite) for i, m in self.terms.items()}
        diffs = {}
        for i, d in self.diffs.items():
            diffs[-i - 1] = ModuleMap(terms[-i - 1], terms[-i], [m.transpose() for m in d.mats], check=False)
        return ModuleComplex(opposite, terms, diffs, check=False)


class ModuleChainMap:
    def __init__(self, source: ModuleComplex, target: ModuleComplex, comps: dict):
        self.source = source
        self.target = target
        self.comps = comps

    def at(self, i: int, v: int):
        m = self.comps.get(i)
        if m is not None:
            return m.mats[v]
        return self.source.field.zeros(self.source.term(i).dims[v], self.target.term(i).dims[v])

    def is_chain_map(self) -> bool:
        x, y = self.source, self.target
        for i in set(x.terms) | set(y.terms):
            for v in range(x.algebra.n_idem):
                if x.diff_at(i, v) * self.at(i + 1, v) != self.at(i, v) * y.diff_at(i, v):
                    return False
        return True

    def dual(self, opposite: AlgebraData, dsource: ModuleComplex, dtarget: ModuleComplex) -> "ModuleChainMap":
        """``D f: D(target) -> D(source)``; the dual complexes are passed in."""
        comps = {}
        for i, m in self.comps.items():
            comps[-i] = ModuleMap(dtarget.term(-i), dsource.term(-i), [x.transpose() for x in m.mats], check=False)
        return ModuleChainMap(dtarget, dsource, comps)


# ---------------------------------------------------------------------------
# realization of matrix-form complexes


def _proj_block_matrix(cat: ProjCategory, x: tuple, s: int, t: int, v: int):
    """Right multiplication by ``x in e_s B e_t`` as a map ``e_v B e_s -> e_v B e_t``."""
    alg = cat.algebra
    src, dst = cat.basis(v, s), cat.basis(v, t)
    pos = {b: j for j, b in enumerate(dst)}
    xb = cat.basis(s, t)
    m = cat.field.zeros(len(src), len(dst))
    for r, y in enumerate(src):
        for c, b in zip(x, xb):
            if c == 0:
                continue
            for k, w in alg.product_basis(y, b).items():
                m[r, pos[k]] += c * w
    return m


def _inj_block_matrix(cat: ProjCategory, x: tuple, s: int, t: int, v: int):
    """``nu(x): I_s -> I_t`` at idempotent ``v``: dual of ``y -> x y`` on ``e_t B e_v -> e_s B e_v``."""
    alg = cat.algebra
    src, dst = cat.basis(s, v), cat.basis(t, v)
    pos = {b: i for i, b in enumerate(src)}
    xb = cat.basis(s, t)
    m = cat.field.zeros(len(src), len(dst))
    for j, y in enumerate(dst):
        for c, b in zip(x, xb):
            if c == 0:
                continue
            for k, w in alg.product_basis(b, y).items():
                m[pos[k], j] += c * w
    return m


def realize_objects(cat: ProjCategory, objs: Sequence[int], kind: str) -> Representation:
    alg = cat.algebra
    build = projective if kind == "proj" else injective
    return module_sum([build(alg, s) for s in objs], alg)


def _dims(cat, objs, v, kind):
    if kind == "proj":
        return [cat.hom_dim(v, s) for s in objs]
    return [cat.hom_dim(s, v) for s in objs]


def realize_blockmap(m: BlockMap, source: Representation, target: Representation, kind: str) -> ModuleMap:
    cat = m.cat
    f = cat.field
    mats = []
    builder = _proj_block_matrix if kind == "proj" else _inj_block_matrix
    for v in range(cat.n_objects):
        sd = _dims(cat, m.src, v, kind)
        td = _dims(cat, m.tgt, v, kind)
        so = [sum(sd[:a]) for a in range(len(sd))]
        to = [sum(td[:b]) for b in range(len(td))]
        out = f.zeros(sum(sd), sum(td))
        for (a, b), x in m.blocks.items():
            if sd[a] == 0 or td[b] == 0:
                continue
            blk = builder(cat, x, m.src[a], m.tgt[b], v)
            for i in range(blk.nrows()):
                for j in range(blk.ncols()):
                    if blk[i, j] != 0:
                        out[so[a] + i, to[b] + j] = blk[i, j]
        mats.append(out)
    return ModuleMap(source, target, mats, check=False)


def realize(x: ProjComplex, kind: str = "proj") -> ModuleComplex:
    """Module complex of ``x`` with summands ``B e_s`` (``kind='proj'``) or ``D(e_s B)`` (``'inj'``)."""
    cat = x.cat
    terms = {i: realize_objects(cat, t, kind) for i, t in x.terms.items()}
    diffs = {i: realize_blockmap(d, terms[i], terms[i + 1], kind) for i, d in x.diffs.items()}
    return ModuleComplex(cat.algebra, terms, diffs, check=False)


def realize_chain_map(f: ProjChainMap, source: ModuleComplex, target: ModuleComplex, kind: str = "proj") -> ModuleChainMap:
    comps = {}
    for i, m in f.comps.items():
        comps[i] = realize_blockmap(m, source.term(i), target.term(i), kind)
    return ModuleChainMap(source, target, comps)


# ---------------------------------------------------------------------------
# Yoneda-form maps


class YonedaMap:
    """A degree-0 map from a projective complex ``X`` to a module complex ``C``.

    ``vecs[i][a]`` is a ``1 x dim C^i(s)`` row: the image of ``e_s`` for the
    ``a``-th summand ``B e_s`` of ``X^i``.
    """

    def __init__(self, source: ProjComplex, target: ModuleComplex, vecs: dict):
        self.source = source
        self.target = target
        self.vecs = vecs

    def vec(self, i: int, a: int):
        s = self.source.term(i)[a]
        row = self.vecs.get(i)
        if row is None:
            return self.target.field.zeros(1, self.target.term(i).dims[s])
        return row[a]

    def then(self, g: ModuleChainMap) -> "YonedaMap":
        """Postcompose with a module chain map."""
        out = {}
        for i, t in self.source.terms.items():
            out[i] = [self.vec(i, a) * g.at(i, s) for a, s in enumerate(t)]
        return YonedaMap(self.source, g.target, out)

    def precompose(self, g: ProjChainMap) -> "YonedaMap":
        """``g`` then this map, for ``g: X' -> X``."""
        out = {}
        cat = self.source.cat
        c = self.target
        for i, t in g.source.terms.items():
            rows = []
            comp = g.comp(i)
            for a, s in enumerate(t):
                acc = self.target.field.zeros(1, c.term(i).dims[s])
                for (aa, b), x in comp.blocks.items():
                    if aa != a:
                        continue
                    u = comp.tgt[b]
                    acc += self.vec(i, b) * c.term(i).act(_sparse(cat, x, s, u), s, u)
                rows.append(acc)
            out[i] = rows
        return YonedaMap(g.source, c, out)

    def shift(self, j: int) -> "YonedaMap":
        return YonedaMap(self.source.shift(j), self.target.shift(j), {i - j: v for i, v in self.vecs.items()})

    def is_chain_map(self) -> bool:
        return _yoneda_chain_defect(self) is None

    def module_map(self) -> ModuleChainMap:
        """The corresponding map ``realize(X) -> C``."""
        x, c = self.source, self.target
        alg = x.cat.algebra
        rx = realize(x, "proj")
        comps = {}
        for i, t in x.terms.items():
            mats = []
            for v in range(alg.n_idem):
                blocks = []
                for a, s in enumerate(t):
                    basis = x.cat.basis(v, s)
                    m = c.field.zeros(len(basis), c.term(i).dims[v])
                    vec = self.vec(i, a)
                    for r, b in enumerate(basis):
                        img = vec * c.term(i).action(b)
                        for jj in range(img.ncols()):
                            if img[0, jj] != 0:
                                m[r, jj] = img[0, jj]
                    blocks.append(m)
                mats.append(vstack(blocks, cols=c.term(i).dims[v], field=c.field) if blocks else c.field.zeros(0, c.term(i).dims[v]))
            comps[i] = ModuleMap(rx.term(i), c.term(i), mats, check=False)
        return ModuleChainMap(rx, c, comps)


def _sparse(cat: ProjCategory, x: tuple, s: int, t: int) -> dict:
    return {b: c for b, c in zip(cat.basis(s, t), x) if c != 0}


def _yoneda_chain_defect(f: YonedaMap):
    x, c = f.source, f.target
    cat = x.cat
    for i, t in x.terms.items():
        d = x.diff(i)
        for a, s in enumerate(t):
            lhs = c.field.zeros(1, c.term(i + 1).dims[s])
            for (aa, b), e in d.blocks.items():
                if aa == a:
                    u = d.tgt[b]
                    lhs += f.vec(i + 1, b) * c.term(i + 1).act(_sparse(cat, e, s, u), s, u)
            rhs = f.vec(i, a) * c.diff_at(i, s)
            if lhs != rhs:
                return (i, a)
    return None


class YonedaLayout:
    """Coordinates for degree-k Yoneda maps ``X^i -> C^{i+k}``."""

    def __init__(self, x: ProjComplex, c: ModuleComplex, k: int = 0):
        self.x, self.c, self.k = x, c, k
        self.slots = {}
        off = 0
        for i in x.degrees:
            for a, s in enumerate(x.term(i)):
                d = c.term(i + k).dims[s]
                if d:
                    self.slots[(i, a)] = (off, d)
                    off += d
        self.size = off

    def vector(self, f: YonedaMap):
        out = self.c.field.zeros(1, self.size)
        for (i, a), (off, d) in self.slots.items():
            v = f.vec(i, a)
            for j in range(d):
                if v[0, j] != 0:
                    out[0, off + j] = v[0, j]
        return out

    def unpack(self, row, start: int = 0) -> dict:
        f = self.c.field
        out = {}
        for i in self.x.degrees:
            vecs = []
            for a, s in enumerate(self.x.term(i)):
                d = self.c.term(i + self.k).dims[s]
                v = f.zeros(1, d)
                slot = self.slots.get((i, a))
                if slot:
                    for j in range(d):
                        v[0, j] = row[start + slot[0] + j]
                vecs.append(v)
            out[i] = vecs
        return out


def _add_pre_yoneda(sb: SparseBuilder, d: BlockMap, i: int, lay_in: YonedaLayout, deg_in: int, lay_out: YonedaLayout, deg_out: int, row0: int, col0: int, target_deg: int):
    """``v -> d v``: slots ``(deg_in, b)`` into slots ``(deg_out, a)`` through ``d`` blocks, acting on ``C^{target_deg}``."""
    cat = d.cat
    cterm = lay_in.c.term(target_deg)
    for (a, b), x in d.blocks.items():
        sin = lay_in.slots.get((deg_in, b))
        sout = lay_out.slots.get((deg_out, a))
        if sin is None or sout is None:
            continue
        s, t = d.src[a], d.tgt[b]
        act = cterm.act(_sparse(cat, x, s, t), s, t)
        for p in range(act.nrows()):
            for q in range(act.ncols()):
                v = act[p, q]
                if v != 0:
                    sb.add(row0 + sin[0] + p, col0 + sout[0] + q, v)


def _add_post_module(sb: SparseBuilder, c: ModuleComplex, j: int, lay_in: YonedaLayout, lay_out: YonedaLayout, deg: int, row0: int, col0: int, sign=1):
    """``v -> v d_C^j`` on slots of degree ``deg``."""
    x = lay_in.x
    for a, s in enumerate(x.term(deg)):
        sin = lay_in.slots.get((deg, a))
        sout = lay_out.slots.get((deg, a))
        if sin is None or sout is None:
            continue
        m = c.diff_at(j, s)
        for p in range(m.nrows()):
            for q in range(m.ncols()):
                v = m[p, q]
                if v != 0:
                    sb.add(row0 + sin[0] + p, col0 + sout[0] + q, v if sign == 1 else -v)


def lift_through_quasi_iso(f: YonedaMap, q: YonedaMap):
    """Find a chain map ``g: X -> P`` with ``g q ~ f``.

    ``f: X -> C`` and ``q: P -> C`` are Yoneda maps, ``q`` a quasi-isomorphism.
    Returns ``(g, h)`` where ``h`` is the Yoneda-form homotopy (degree -1) with
    ``f - g q = d_X h + h d_C``.  The particular solution has all free
    variables set to zero, so the choice is canonical.
    """
    x, c = f.source, f.target
    p = q.source
    cat = x.cat
    fld = cat.field
    gl = GradedLayout(x, p, 0)
    cons = GradedLayout(x, p, 1)
    yl0 = YonedaLayout(x, c, 0)
    yl_1 = YonedaLayout(x, c, -1)
    ng, nh = gl.size, yl_1.size
    ncols = cons.size + yl0.size
    sb = SparseBuilder(ng + nh, ncols)
    # chain condition for g, columns [0, cons.size)
    for i, (off1, lay1) in cons.parts.items():
        if i + 1 in gl.parts:
            off0, lay0 = gl.parts[i + 1]
            _add_premul(sb, x.diff(i), lay0, lay1, off0, off1)
        if i in gl.parts:
            off0, lay0 = gl.parts[i]
            _add_postmul(sb, p.diff(i), lay0, lay1, off0, off1, sign=-1)
    c0 = cons.size
    # g -> g q
    for i, (off, lay) in gl.parts.items():
        cterm = c.term(i)
        for (a, b), (boff, bd) in lay.offsets.items():
            s, u = lay.src[a], lay.tgt[b]
            slot = yl0.slots.get((i, a))
            if slot is None:
                continue
            qv = q.vec(i, b)
            for k, bk in enumerate(cat.basis(s, u)):
                img = qv * cterm.action(bk)
                for jj in range(img.ncols()):
                    if img[0, jj] != 0:
                        sb.add(off + boff + k, c0 + slot[0] + jj, img[0, jj])
    # h -> d_X h + h d_C
    for i in x.degrees:
        if i + 1 in x.terms:
            _add_pre_yoneda(sb, x.diff(i), i, yl_1, i + 1, yl0, i, ng, c0, target_deg=i)
        _add_post_module(sb, c, i - 1, yl_1, yl0, i, ng, c0)
    a = sb.to_mat(fld)
    rhs = fld.zeros(1, ncols)
    fv = yl0.vector(f)
    for j in range(yl0.size):
        if fv[0, j] != 0:
            rhs[0, c0 + j] = fv[0, j]
    if ng + nh == 0:
        if any(rhs[0, j] != 0 for j in range(ncols)):
            raise ArithmeticError("lifting failed: empty system with nonzero target")
        return ProjChainMap.zero(x, p), {}
    sol = solve_left(a, rhs)
    row = [sol[0, j] for j in range(ng + nh)]
    g = ProjChainMap(x, p, gl.maps(row), check=False)
    h = yl_1.unpack(row, ng)
    return g, h


# ---------------------------------------------------------------------------
# projective replacement


def projective_replacement(c: ModuleComplex, cat: ProjCategory, bound: int = 32):
    """A complex of projectives ``P`` with a quasi-isomorphism ``q: P -> C``.

    Built from the top degree down: in degree ``i`` the module ``K_i`` of pairs
    ``(p, c)`` in ``P^{i+1} + C^i`` with ``p d = 0`` and ``p q = c d_C`` is
    covered minimally modulo ``0 + im d_C``.  Raises
    :class:`ResolutionTooLong` when more than ``bound`` degrees below ``C``
    are needed.
    """
    alg = c.algebra
    fld = c.field
    n = alg.n_idem
    if not c.terms:
        return ProjComplex(cat, {}, {}), YonedaMap(ProjComplex(cat, {}, {}), c, {})
    terms: dict = {}
    diffs: dict = {}
    qvecs: dict = {}
    above_objs: tuple = ()
    above_mod = zero_module(alg)
    above_d = None  # module map P^{i+1} -> P^{i+2}
    above_q = None  # per-vertex matrices P^{i+1}(v) -> C^{i+1}(v)
    i = c.hi
    while True:
        if i < c.lo - bound:
            raise ResolutionTooLong(f"projective replacement longer than {bound}")
        ci = c.term(i)
        # K_i at each vertex
        bases, extras = [], []
        for v in range(n):
            dp = above_mod.dims[v]
            dc = ci.dims[v]
            if dp + dc == 0:
                bases.append(fld.zeros(0, 0))
                extras.append(fld.zeros(0, 0))
                continue
            cols = []
            # p d_P
            nd = above_d.mats[v].ncols() if above_d is not None else 0
            nq = c.term(i + 1).dims[v]
            m = fld.zeros(dp + dc, nd + nq)
            if above_d is not None:
                _paste(m, above_d.mats[v], 0, 0)
            if above_q is not None and dp:
                _paste(m, above_q[v], 0, nd)
            if dc and nq:
                dcm = c.diff_at(i, v)
                _paste(m, -dcm, dp, nd)
            if m.ncols():
                kb = row_basis(left_nullspace(m))
            else:
                kb = fld.eye(dp + dc)
            bases.append(kb)
            # image of d_C^{i-1} inside K coordinates
            prev = c.diff_at(i - 1, v) if c.term(i - 1).dims[v] and dc else fld.zeros(0, dc)
            if prev.nrows() and kb.nrows():
                emb = fld.zeros(prev.nrows(), dp + dc)
                _paste(emb, prev, 0, dp)
                emb = row_basis(emb)
                extras.append(Coordinates(kb)(emb) if emb.nrows() else fld.zeros(0, kb.nrows()))
            else:
                extras.append(fld.zeros(0, kb.nrows()))
        ambient = module_sum([above_mod, ci], alg)
        k_mod, _ = submodule(ambient, bases)
        if k_mod.dim == 0 and i < c.lo:
            break
        gens = top_generators(k_mod, extras)
        objs = tuple(v for v, _ in gens)
        dblocks = {}
        qrow = []
        for a, (v, vec) in enumerate(gens):
            amb = vec * bases[v]
            dp = above_mod.dims[v]
            pvec = submatrix(amb, None, range(dp))
            cvec = submatrix(amb, None, range(dp, amb.ncols()))
            # split pvec into Hom(v, u) blocks for u in above_objs
            off = 0
            for b, u in enumerate(above_objs):
                dim = cat.hom_dim(v, u)
                x = tuple(pvec[0, off + k] for k in range(dim))
                off += dim
                if any(e != 0 for e in x):
                    dblocks[(a, b)] = x
            qrow.append(cvec)
        if objs:
            terms[i] = objs
            if above_objs:
                diffs[i] = BlockMap(cat, objs, above_objs, dblocks)
            qvecs[i] = qrow
        elif i < c.lo:
            break
        # prepare next step
        cur_mod = realize_objects(cat, objs, "proj")
        if objs and above_objs:
            above_d = realize_blockmap(diffs[i], cur_mod, above_mod, "proj")
        elif objs:
            above_d = ModuleMap(cur_mod, above_mod, [fld.zeros(cur_mod.dims[v], 0) for v in range(n)], check=False)
        else:
            above_d = None
        tmp = ProjComplex(cat, {i: objs}, {}, check=False)
        ym = YonedaMap(tmp, c, {i: qrow})
        above_q = ym.module_map().comps[i].mats if objs else None
        above_objs = objs
        above_mod = cur_mod
        if not objs:
            above_d = None
        i -= 1
    p = ProjComplex(cat, terms, diffs)
    q = YonedaMap(p, c, qvecs)
    return p, q


def _paste(m, block, r0, c0):
    for i in range(block.nrows()):
        for j in range(block.ncols()):
            v = block[i, j]
            if v != 0:
                m[r0 + i, c0 + j] = v


def module_cone(q: YonedaMap) -> ModuleComplex:
    """Cone of ``realize(P) -> C`` as a module complex (for quasi-iso checks)."""
    mm = q.module_map()
    rp = mm.source
    c = q.target
    alg = c.algebra
    fld = c.field
    degrees = sorted({i - 1 for i in rp.terms} | set(c.terms))
    terms, diffs = {}, {}
    for i in degrees:
        terms[i] = module_sum([rp.term(i + 1), c.term(i)], alg)
    for i in degrees:
        if i + 1 not in terms:
            continue
        mats = []
        for v in range(alg.n_idem):
            a1, b1 = rp.term(i + 1).dims[v], c.term(i).dims[v]
            a2, b2 = rp.term(i + 2).dims[v], c.term(i + 1).dims[v]
            m = fld.zeros(a1 + b1, a2 + b2)
            if a1 and a2:
                _paste(m, -rp.diff_at(i + 1, v), 0, 0)
            if a1 and b2:
                _paste(m, mm.at(i + 1, v), 0, a2)
            if b1 and b2:
                _paste(m, c.diff_at(i, v), a1, a2)
            mats.append(m)
        diffs[i] = ModuleMap(terms[i], terms[i + 1], mats, check=False)
    return ModuleComplex(alg, terms, diffs, check=False)


def is_quasi_iso(q: YonedaMap) -> bool:
    return module_cone(q).is_acyclic()
