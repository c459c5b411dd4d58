"""The tilting complex ``T`` over ``Λ/I``, its endomorphism ring and the map onto ``Γ/J``.

Modules ``E(V, U)`` for ``U`` a summand of ``V`` are the projectives
``Λ ε_U`` of ``Λ = E(V)``; a degree-0 map ``g: U -> U'`` induces right
multiplication by ``g``, which is the morphism ``g`` of
:class:`ProjCategory` (``Hom(P_s, P_t) = ε_s Λ ε_t``).  Complexes of such
modules are therefore :class:`ProjComplex` objects over ``Λ`` or ``Λ/I``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exactlin import Coordinates, NoSolution, complement, hstack, left_nullspace, rank, row_basis, solve_left, vstack
from .homotopy import BlockMap, FunctorData, ProjCategory, ProjChainMap, ProjComplex, cone, hom_kb, minimize
from .nangle import (
    Decomposed,
    NAngleInstance,
    NSigmaSequence,
    complete_to_morphism,
    find_isomorphism,
)
from .quiveralg import AlgebraData, ModuleMap, Representation, direct_sum, projective
from .yoneda import (
    HypothesisFailed,
    IdealData,
    PerforatedYonedaData,
    QuotientAlgebra,
    TheoremSetup,
    as_phi,
    check_hypotheses,
    ideal_I,
    ideal_J,
    ideal_module_checks,
    quotient_algebra,
    theorem_setup,
)


class CertificateFailed(ArithmeticError):
    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"generation certificate clause ({clause}) failed" + (f": {detail}" if detail else ""))
        self.clause = clause


class CompletionFailed(ArithmeticError):
    pass


class RankDeficient(ArithmeticError):
    def __init__(self, which: list, detail: str = ""):
        super().__init__(f"Θ is not {' and not '.join(which)}" + (f" ({detail})" if detail else ""))
        self.which = which


# ---------------------------------------------------------------------------
# modules


class LambdaModule:
    """A left module over an :class:`AlgebraData` with its module axioms checked.

    Attributes:
        rep: the underlying :class:`Representation`.
        positions: for sums of projectives, the idempotent positions in order.
    """

    def __init__(self, rep: Representation, positions=None, check: bool = True):
        self.rep = rep
        self.positions = list(positions) if positions is not None else None
        if check:
            rep.validate()

    @property
    def algebra(self):
        return self.rep.algebra

    @property
    def dim(self) -> int:
        return self.rep.dim

    @classmethod
    def projective_sum(cls, alg: AlgebraData, positions, check: bool = False) -> "LambdaModule":
        """``⊕ B ε_t`` over ``t in positions``."""
        mods = [projective(alg, t) for t in positions]
        rep = direct_sum(mods, alg) if len(mods) != 1 else mods[0]
        return cls(rep, positions, check)

    @classmethod
    def restricted(cls, quotient: QuotientAlgebra, positions, check: bool = True) -> "LambdaModule":
        """``⊕ B̄ ε_t`` viewed as a module over the parent algebra ``B``."""
        base = cls.projective_sum(quotient, positions).rep
        parent = quotient.parent
        acts = {}
        for k in range(parent.dim):
            red = quotient.reduce({k: 1})
            s, t = parent.corners[k]
            acts[k] = base.act(red, s, t) if red else quotient.field.zeros(base.dims[t], base.dims[s])
        return cls(Representation(parent, base.dims, actions=acts, check=False), positions, check)


def right_multiplication(alg: AlgebraData, src: LambdaModule, tgt: LambdaModule, elems: dict) -> ModuleMap:
    """``(x_a) -> (sum_a x_a g_ab)_b`` between sums of projectives of ``alg``.

    Args:
        elems: ``{(a, b): sparse vector in ε_{src[a]} B ε_{tgt[b]}}``.
    """
    f = alg.field
    mats = []
    for v in range(alg.n_idem):
        rows = [alg.corner_basis(v, s) for s in src.positions]
        cols = [alg.corner_basis(v, t) for t in tgt.positions]
        roff = [sum(len(r) for r in rows[:a]) for a in range(len(rows))]
        coff = [sum(len(c) for c in cols[:b]) for b in range(len(cols))]
        m = f.zeros(sum(len(r) for r in rows), sum(len(c) for c in cols))
        for (a, b), g in elems.items():
            pos = {k: j for j, k in enumerate(cols[b])}
            for r, x in enumerate(rows[a]):
                for k, c in alg.multiply({x: 1}, g).items():
                    m[roff[a] + r, coff[b] + pos[k]] += c
        mats.append(m)
    return ModuleMap(src.rep, tgt.rep, mats, check=False)


# ---------------------------------------------------------------------------
# the complexes


@dataclass
class TiltingComplexData:
    """``T~`` over ``Λ`` and ``T`` over ``Λ/I`` with the maps ``p`` and ``q``.

    ``positions[k]`` lists the summands of ``V`` (as idempotent positions of
    ``Λ``) in degree ``k``; degree 0 is ``X``, the last degree is
    ``M_{n-2} + M``.
    """

    setup: TheoremSetup
    lam: PerforatedYonedaData
    ideal: IdealData
    lam_bar: QuotientAlgebra
    cat_lam: ProjCategory
    cat_bar: ProjCategory
    t_tilde: ProjComplex
    t: ProjComplex
    positions: list
    x_positions: list
    m_positions: list
    split_slots: list
    p: ModuleMap | None = None
    q: ModuleMap | None = None
    pq_ok: bool | None = None
    diff_vectors: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.setup.inst.n

    @property
    def length(self) -> int:
        return len(self.t.degrees)

    def describe(self) -> dict:
        return {
            "terms": {str(k): [self.lam.parts.names[p] for p in pos] for k, pos in enumerate(self.positions)},
            "length": self.length,
            "pq_equals_E(V,alpha_1)": self.pq_ok,
        }


def _term_positions(setup: TheoremSetup) -> tuple[list, list]:
    """Positions of ``V = X + M`` in each degree ``0 .. n-2`` and the last-term slots of ``M``."""
    inst = setup.inst
    n = inst.n
    summ = inst.summands
    nx = len(setup.x)
    offsets, tot = [], nx
    for k in range(1, n - 1):
        offsets.append(tot)
        tot += len(summ[k])
    positions = [list(range(nx))]
    for k in range(1, n - 2):
        positions.append([offsets[k - 1] + j for j in range(len(summ[k]))])
    last = [offsets[n - 3] + j for j in range(len(summ[n - 2]))]
    split = list(range(len(last), len(last) + len(setup.m)))
    last += list(range(nx, nx + len(setup.m)))
    positions.append(last)
    return positions, split


def _element_tuple(cat: ProjCategory, s: int, t: int, vec: dict) -> tuple:
    basis = cat.basis(s, t)
    return tuple(cat.field(vec.get(b, 0)) for b in basis)


def build_T(setup_or_inst, phi=None, fd: FunctorData | None = None, check: bool = True) -> TiltingComplexData:
    """Construct ``T~`` and ``T``; raises :class:`HypothesisFailed` before doing any work."""
    setup = setup_or_inst if isinstance(setup_or_inst, TheoremSetup) else theorem_setup(setup_or_inst, phi, fd)
    ideal = ideal_I(setup, check=check)
    lam = setup.lam
    lam_bar = quotient_algebra(lam, ideal, name="Lambda/I")
    cat_lam, cat_bar = ProjCategory(lam.algebra), ProjCategory(lam_bar)
    bar = setup.bar
    positions, split = _term_positions(setup)
    n = setup.inst.n
    terms_l, terms_b, diffs_l, diffs_b, vecs = {}, {}, {}, {}, []
    for k, pos in enumerate(positions):
        terms_l[k] = tuple(pos)
        terms_b[k] = tuple(pos)
    for k in range(n - 2):
        src, tgt = bar.summands[k], bar.summands[k + 1]
        g = bar.sequence.maps[k]
        bl, bb, vk = {}, {}, {}
        for a in range(len(src)):
            for b in range(len(tgt)):
                comp = src.component(g, tgt, a, b)
                pa, pb = positions[k][a], positions[k + 1][b]
                vec = lam.coords_of(comp, pa, pb, 0)
                if not vec:
                    continue
                vk[(a, b)] = vec
                bl[(a, b)] = _element_tuple(cat_lam, pa, pb, vec)
                red = lam_bar.reduce(vec)
                if red:
                    bb[(a, b)] = _element_tuple(cat_bar, pa, pb, red)
        vecs.append(vk)
        diffs_l[k] = BlockMap(cat_lam, terms_l[k], terms_l[k + 1], bl)
        diffs_b[k] = BlockMap(cat_bar, terms_b[k], terms_b[k + 1], bb)
    t_tilde = ProjComplex(cat_lam, terms_l, diffs_l)
    t = ProjComplex(cat_bar, terms_b, diffs_b)
    data = TiltingComplexData(setup, lam, ideal, lam_bar, cat_lam, cat_bar, t_tilde, t, positions,
                              positions[0], list(range(len(setup.x), len(lam.objects))), split, diff_vectors=vecs)
    if check:
        _build_pq(data)
        if not data.pq_ok:
            raise ArithmeticError("p q differs from E(V, alpha_1)")
    return data


def _build_pq(t: TiltingComplexData):
    """``p: E(V,X) -> P`` (quotient) and ``q: P -> E(V,M_1)`` with ``p q = E(V, alpha_1)``."""
    lam, bar_alg = t.lam.algebra, t.lam_bar
    xs = t.x_positions
    summ = t.setup.inst.summands
    m1 = t.positions[1][: len(summ[1])]
    evx = LambdaModule.projective_sum(lam, xs)
    evm1 = LambdaModule.projective_sum(lam, m1)
    pmod = LambdaModule.restricted(bar_alg, xs)
    f = lam.field
    pmats = []
    for v in range(lam.n_idem):
        rows = [lam.corner_basis(v, s) for s in xs]
        cols = [bar_alg.corner_basis(v, s) for s in xs]
        m = f.zeros(sum(map(len, rows)), sum(map(len, cols)))
        r0 = c0 = 0
        for a in range(len(xs)):
            pos = {k: j for j, k in enumerate(cols[a])}
            for r, x in enumerate(rows[a]):
                for k, c in bar_alg.reduce({x: 1}).items():
                    m[r0 + r, c0 + pos[k]] = c
            r0 += len(rows[a])
            c0 += len(cols[a])
        pmats.append(m)
    p = ModuleMap(evx.rep, pmod.rep, pmats, check=True)
    # alpha_1 components into M_1 only
    alpha = {(a, b): vec for (a, b), vec in t.diff_vectors[0].items() if b < len(m1)}
    qmats = []
    for v in range(lam.n_idem):
        rows = [bar_alg.corner_basis(v, s) for s in xs]
        cols = [lam.corner_basis(v, s) for s in m1]
        roff = [sum(len(r) for r in rows[:a]) for a in range(len(rows))]
        coff = [sum(len(c) for c in cols[:b]) for b in range(len(cols))]
        m = f.zeros(sum(map(len, rows)), sum(map(len, cols)))
        for (a, b), g in alpha.items():
            pos = {k: j for j, k in enumerate(cols[b])}
            for r, x in enumerate(rows[a]):
                for k, c in lam.multiply(bar_alg.lift({x: 1}), g).items():
                    m[roff[a] + r, coff[b] + pos[k]] += c
        qmats.append(m)
    q = ModuleMap(pmod.rep, evm1.rep, qmats, check=True)
    ev_alpha = right_multiplication(lam, evx, evm1, alpha)
    t.p, t.q = p, q
    t.pq_ok = p.then(q) == ev_alpha


# ---------------------------------------------------------------------------
# Rickard conditions


def check_self_orthogonal(t) -> dict:
    """``{i: dim Hom(T, T[i])}`` for ``1 <= |i| <= n-2``."""
    cx = t.t if isinstance(t, TiltingComplexData) else t
    top = (t.n - 2) if isinstance(t, TiltingComplexData) else max(1, len(cx.degrees) - 1)
    table = {}
    for i in list(range(-top, 0)) + list(range(1, top + 1)):
        table[i] = hom_kb(cx, cx.shift(i)).dim
    return table


@dataclass
class GenerationCertificate:
    last_differential_splits: bool
    all_projectives_present: bool
    cone_is_degree0_stalk: bool
    higher_terms_in_split_block: bool
    missing_positions: list

    @property
    def passed(self) -> bool:
        return (self.last_differential_splits and self.all_projectives_present
                and self.cone_is_degree0_stalk and self.higher_terms_in_split_block)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def _brutal_above(x: ProjComplex, k: int) -> tuple[ProjComplex, ProjChainMap]:
    """``σ_{>=k} x`` with its inclusion into ``x``."""
    cat = x.cat
    terms = {i: t for i, t in x.terms.items() if i >= k}
    diffs = {i: d for i, d in x.diffs.items() if i >= k}
    sub = ProjComplex(cat, terms, diffs, check=False)
    comps = {i: BlockMap.identity(cat, t) for i, t in terms.items()}
    return sub, ProjChainMap(sub, x, comps)


def generation_certificate(cx: ProjComplex, split_slots=(), split_positions=None, raise_on_fail: bool = True) -> GenerationCertificate:
    """Certificate that ``add(cx)`` generates ``K^b(proj)`` over the ambient algebra.

    (i) the last differential has no component into ``split_slots`` of the top
    term, so that block is a shifted stalk summand; (ii) every indecomposable
    projective occurs in some term; (iii) the cone of ``σ_{>=1} cx -> cx`` is
    the degree-0 stalk and every term in positive degree is built from the
    split-off projectives.
    """
    cat = cx.cat
    degs = cx.degrees
    top = max(degs) if degs else 0
    split_slots = list(split_slots)
    ok_i = True
    if top - 1 in cx.diffs:
        ok_i = not any(b in split_slots for (_, b) in cx.diffs[top - 1].blocks)
    present = set(p for t in cx.terms.values() for p in t)
    missing = [s for s in range(cat.n_objects) if s not in present]
    ok_ii = not missing
    sub, inc = _brutal_above(cx, 1)
    c, _, _ = cone(inc)
    c_min, _, _ = minimize(c)
    stalk = ProjComplex.stalk(cat, cx.term(0)) if cx.term(0) else ProjComplex.zero(cat)
    ok_iii = find_isomorphism(c_min, stalk) is not None
    if split_positions is None:
        split_positions = [cx.term(top)[s] for s in split_slots]
    allowed = set(split_positions)
    ok_top = all(p in allowed for i, t in cx.terms.items() if i >= 1 for p in t)
    cert = GenerationCertificate(ok_i, ok_ii, ok_iii, ok_top, missing)
    if raise_on_fail and not cert.passed:
        clause = "i" if not ok_i else "ii" if not ok_ii else "iii"
        raise CertificateFailed(clause, f"missing positions {missing}" if missing else "")
    return cert


def check_generation(t, raise_on_fail: bool = True) -> GenerationCertificate:
    if isinstance(t, TiltingComplexData):
        return generation_certificate(t.t, t.split_slots, raise_on_fail=raise_on_fail)
    return generation_certificate(t, (), raise_on_fail=raise_on_fail)


# ---------------------------------------------------------------------------
# endomorphism ring


class EndAlgebra:
    """``End_{K^b}(x)`` with the identity as first basis element.

    Attributes:
        algebra: :class:`AlgebraData` with one idempotent.
        maps: chain-map representatives of the basis.
    """

    def __init__(self, x: ProjComplex):
        h = hom_kb(x, x)
        f = x.cat.field
        self.x = x
        self.hom = h
        ident = h.coords_matrix([ProjChainMap.identity(x)])
        basis = vstack([ident, complement(ident, f.eye(h.dim))], cols=h.dim, field=f)
        self.basis = basis
        self._coords = Coordinates(basis)
        self.maps = [h.element([basis[r, c] for c in range(h.dim)]) for r in range(h.dim)]
        mult = {}
        for i, a in enumerate(self.maps):
            for j, b in enumerate(self.maps):
                v = self.coords(a.then(b))
                if v:
                    mult[(i, j)] = v
        self.algebra = AlgebraData(f, [f"f{i}" for i in range(h.dim)], mult, [0], [(0, 0)] * h.dim, name="End(T)")

    @property
    def dim(self) -> int:
        return self.hom.dim

    def coords(self, g: ProjChainMap) -> dict:
        c = self._coords(self.hom.coords_matrix([g]))
        return {r: c[0, r] for r in range(self.dim) if c[0, r] != 0}


def end_algebra_kb(t) -> EndAlgebra:
    cx = t.t if isinstance(t, TiltingComplexData) else t
    e = EndAlgebra(cx)
    if not e.algebra.check_associativity():
        raise ArithmeticError("End algebra is not associative")
    return e


# ---------------------------------------------------------------------------
# Θ: End(T) -> Γ/J


@dataclass
class ThetaData:
    end: EndAlgebra
    gamma_bar: QuotientAlgebra
    matrix: object
    rank: int
    square: bool
    multiplicative: bool
    unital: bool
    kernel_in_J: bool
    failures: list

    @property
    def injective(self) -> bool:
        return self.rank == self.end.dim

    @property
    def surjective(self) -> bool:
        return self.rank == self.gamma_bar.dim

    @property
    def isomorphism(self) -> bool:
        return self.square and self.injective and self.surjective and self.multiplicative and self.unital and self.kernel_in_J

    def to_dict(self) -> dict:
        return {
            "rows": self.matrix.nrows(),
            "cols": self.matrix.ncols(),
            "rank": self.rank,
            "square": self.square,
            "injective": self.injective,
            "surjective": self.surjective,
            "multiplicative": self.multiplicative,
            "unital": self.unital,
            "solution_kernel_in_J": self.kernel_in_J,
            "matrix": [[str(self.matrix[i, j]) for j in range(self.matrix.ncols())] for i in range(self.matrix.nrows())],
        }


class ThetaSolver:
    """Evaluates ``Θ`` on chain endomorphisms of ``T``.

    For ``f`` with lifted components ``x^k = (x^k_i)`` the class ``Θ(f)`` is
    ``sum_i h_i + J`` where ``h_i: W -> F^i W`` completes ``(x^0_i, ..,
    x^{n-2}_i)`` to a morphism from the padded angle to its ``F^i``-image.
    """

    def __init__(self, t: TiltingComplexData, gam: PerforatedYonedaData, j_ideal: IdealData, gamma_bar: QuotientAlgebra):
        self.t = t
        self.gam = gam
        self.J = j_ideal
        self.gamma_bar = gamma_bar
        setup = t.setup
        self.fd = setup.fd
        self.phi = setup.phi
        self.bar = setup.bar
        self.targets = {i: self._image_angle(i) for i in self.phi}
        self.kernel_ok = all(self._kernel_in_J(i) for i in self.phi)

    def _image_angle(self, i: int) -> NAngleInstance:
        """``F^i`` of the padded angle, summand by summand."""
        if i == 0:
            return self.bar
        fd = self.fd
        seq = self.bar.sequence
        s = seq.suspension
        summ = self.bar.summands
        objs = [d.apply(fd, i) for d in summ]
        maps = []
        for k in range(seq.n):
            src = summ[k]
            tgt = summ[k + 1] if k + 1 < seq.n else summ[0].shift(s)
            fsrc = objs[k]
            ftgt = objs[k + 1] if k + 1 < seq.n else objs[0].shift(s)
            comps = {}
            for a in range(len(src)):
                for b in range(len(tgt)):
                    c = src.component(seq.maps[k], tgt, a, b)
                    if not c.is_zero():
                        comps[(a, b)] = fd.mor(c, i).retarget(fsrc.objects[a], ftgt.objects[b])
            maps.append(fsrc.assemble(ftgt, comps))
        out = NSigmaSequence([d.total for d in objs], maps, s, objs, check=False)
        return NAngleInstance(out, None, self.bar.algebra, s)

    def _conditions(self, i: int):
        """Rows of ``h -> (alpha_{n-1} h, h F^i(alpha_n))`` over a basis of ``Hom(W, F^i W)``."""
        src = self.bar.sequence
        tgt = self.targets[i].sequence
        n = src.n
        w, fw = src.objects[n - 1], tgt.objects[n - 1]
        hw = hom_kb(w, fw)
        a1, b1 = src.maps[n - 2], tgt.maps[n - 1]
        h1 = hom_kb(a1.source, fw)
        h2 = hom_kb(w, b1.target)
        basis = hw.basis()
        m1 = h1.coords_matrix([a1.then(g.retarget(a1.target, fw)) for g in basis])
        m2 = h2.coords_matrix([g.then(b1.retarget(fw, b1.target)) for g in basis])
        return hw, hstack([m1, m2], self.t.lam.field) if hw.dim else None

    def _kernel_in_J(self, i: int) -> bool:
        hw, m = self._conditions(i)
        if hw.dim == 0:
            return True
        ker = left_nullspace(m) if m.ncols() else self.t.lam.field.eye(hw.dim)
        for r in range(ker.nrows()):
            g = hw.element([ker[r, c] for c in range(hw.dim)])
            vec = self.h_vector({i: g})
            if not self.J.contains(vec):
                return False
        return True

    def lift_components(self, f: ProjChainMap) -> list[dict]:
        """Per degree ``k``: ``{i: x^k_i}`` as chain maps ``bar_k -> F^i bar_k``."""
        t = self.t
        lam, lb = t.lam, t.lam_bar
        out = []
        for k, pos in enumerate(t.positions):
            d = self.bar.summands[k]
            comp = f.comp(k)
            by_deg: dict = {}
            for (a, b), coeffs in comp.blocks.items():
                pa, pb = pos[a], pos[b]
                basis = t.cat_bar.basis(pa, pb)
                qvec = {basis[r]: c for r, c in enumerate(coeffs) if c != 0}
                pvec = lb.lift(qvec)
                for i in self.phi:
                    part = {kk: c for kk, c in pvec.items() if lam.elements[kk].degree == i}
                    if part:
                        by_deg.setdefault(i, {})[(a, b)] = lam.element_map(part, pa, pb, i)
            xs = {}
            for i in self.phi:
                fd_ = self.targets[i].summands[k]
                xs[i] = d.assemble(fd_, by_deg.get(i, {}))
            out.append(xs)
        return out

    def h_vector(self, hs: dict) -> dict:
        """Coordinates in ``E(W)`` of ``(h_i)``."""
        w = self.bar.summands[-1]
        vec: dict = {}
        for i, h in hs.items():
            fw = self.targets[i].summands[-1]
            for a in range(len(w)):
                for b in range(len(fw)):
                    comp = w.component(h, fw, a, b)
                    for k, c in self.gam.coords_of(comp, a, b, i).items():
                        vec[k] = vec.get(k, 0) + c
        return {k: c for k, c in vec.items() if c != 0}

    def __call__(self, f: ProjChainMap) -> dict:
        xs = self.lift_components(f)
        hs = {}
        for i in self.phi:
            partial = [xs[k][i] for k in range(len(xs))]
            try:
                mor = complete_to_morphism(self.bar, self.targets[i], partial, require_tower=False)
            except (NoSolution, ArithmeticError) as exc:
                raise CompletionFailed(f"degree {i}: {exc}") from None
            hs[i] = mor.maps[-1]
        return self.gamma_bar.reduce(self.h_vector(hs))


def theta(t: TiltingComplexData, j_ideal: IdealData | None = None, gamma_bar: QuotientAlgebra | None = None,
          end: EndAlgebra | None = None, raise_on_fail: bool = False) -> ThetaData:
    setup = t.setup
    if j_ideal is None:
        j_ideal = ideal_J(setup, check=False)
    gam = setup.gam
    if gamma_bar is None:
        gamma_bar = quotient_algebra(gam, j_ideal, name="Gamma/J")
    end = end or end_algebra_kb(t)
    solver = ThetaSolver(t, gam, j_ideal, gamma_bar)
    f = t.lam.field
    values = [solver(g) for g in end.maps]
    mat = f.zeros(end.dim, gamma_bar.dim)
    for r, v in enumerate(values):
        for k, c in v.items():
            mat[r, k] = c
    rk = rank(mat) if mat.nrows() and mat.ncols() else 0
    failures = []
    gb = gamma_bar
    for a in range(end.dim):
        for b in range(end.dim):
            lhs = {}
            for k, c in end.algebra.product_basis(a, b).items():
                for kk, cc in values[k].items():
                    lhs[kk] = lhs.get(kk, 0) + c * cc
            lhs = {k: c for k, c in lhs.items() if c != 0}
            rhs = gb.multiply(values[a], values[b])
            if lhs != rhs:
                failures.append((a, b))
    unital = values[0] == gb.unit() if end.dim else gb.dim == 0
    data = ThetaData(end, gamma_bar, mat, rk, end.dim == gamma_bar.dim, not failures, unital, solver.kernel_ok, failures)
    if raise_on_fail:
        bad = [w for w, ok in (("injective", data.injective), ("surjective", data.surjective)) if not ok]
        if bad:
            raise RankDeficient(bad, f"rank {rk}, dim End {end.dim}, dim Γ/J {gamma_bar.dim}")
    return data


# ---------------------------------------------------------------------------
# the full check


@dataclass
class EquivalenceReport:
    meta: dict
    hypotheses: dict
    dims: dict
    orthogonality: dict
    generation: dict
    end_dim: int | None
    theta: dict
    lemma_checks: dict
    verdict: str
    errors: list

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "hypotheses": self.hypotheses,
            "dimensions": self.dims,
            "lemma_checks": self.lemma_checks,
            "self_orthogonality": self.orthogonality,
            "generation": self.generation,
            "end_dim": self.end_dim,
            "theta": self.theta,
            "verdict": self.verdict,
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"verdict: {self.verdict}"]
        for k, v in sorted(d["meta"].items()):
            lines.append(f"{k}: {v}")
        lines.append("hypotheses: " + ", ".join(f"{k}={v}" for k, v in sorted(self.hypotheses.items())))
        lines.append("dimensions: " + ", ".join(f"{k}={v}" for k, v in sorted(self.dims.items())))
        if self.orthogonality:
            lines.append("Hom(T, T[i]): " + ", ".join(f"{i}:{v}" for i, v in sorted(self.orthogonality.items(), key=lambda kv: int(kv[0]))))
        if self.generation:
            lines.append("generation: " + ", ".join(f"{k}={v}" for k, v in sorted(self.generation.items())))
        if self.end_dim is not None:
            lines.append(f"dim End(T): {self.end_dim}")
        if self.theta:
            lines.append("theta: " + ", ".join(f"{k}={v}" for k, v in sorted(self.theta.items()) if k != "matrix"))
        for e in self.errors:
            lines.append(f"error: {e}")
        return "\n".join(lines) + "\n"


def verify_theorem_instance(inst: NAngleInstance, phi, fd: FunctorData, meta: dict | None = None) -> EquivalenceReport:
    """Run the whole pipeline; sub-errors are recorded in the report.

    :class:`HypothesisFailed` and a non-admissible ``phi`` propagate, since no
    verdict is possible in those cases.
    """
    phi = as_phi(phi)
    meta = dict(meta or {})
    meta.update({"n": inst.n, "phi": list(phi), "functor": fd.name, "field": fd.cat.field.name})
    setup = theorem_setup(inst, phi, fd)
    hyp = check_hypotheses(setup)
    if hyp.failed():
        raise HypothesisFailed(hyp.failed()[0], ", ".join(hyp.failed()))
    dims, errors, lemma = {}, [], {}
    orth, gen, th, end_dim = {}, {}, {}, None
    verdict = "not established"
    try:
        t = build_T(setup, check=True)
        j = ideal_J(setup, check=False)
        gbar = quotient_algebra(setup.gam, j, name="Gamma/J")
        dims = {"Lambda": setup.lam.dim, "Gamma": setup.gam.dim, "I": t.ideal.dim, "J": j.dim,
                "Lambda_bar": t.lam_bar.dim, "Gamma_bar": gbar.dim, "T_length": t.length}
        lemma = ideal_module_checks(setup, t.ideal)
        lemma["I_closed"] = t.ideal.closed
        lemma["J_closed"] = j.closed
        lemma["pq_equals_E(V,alpha_1)"] = t.pq_ok
        table = check_self_orthogonal(t)
        orth = {str(i): v for i, v in table.items()}
        cert = check_generation(t, raise_on_fail=False)
        gen = cert.to_dict()
        end = end_algebra_kb(t)
        end_dim = end.dim
        td = theta(t, j, gbar, end)
        th = td.to_dict()
        ok = (all(v == 0 for v in table.values()) and cert.passed and td.isomorphism
              and lemma["annihilates_E(V,M)"] and t.pq_ok)
        verdict = "equivalent" if ok else "not established"
    except (ArithmeticError, ValueError) as exc:
        errors.append(f"{type(exc).__name__}: {exc}")
    return EquivalenceReport(meta, hyp.to_dict(), dims, orth, gen, end_dim, th, lemma, verdict, errors)
