"""Endofunctors of ``K^b(proj A)``: identity, shifts and ``nu_n = nu[-n]``.

``nu`` is computed by reading each ``P_t`` of a complex as the injective
``I_t`` (``Hom(I_s, I_t) = e_s A e_t`` with the same composition) and taking a
projective replacement.  ``nu^{-1}`` runs the same construction over the
opposite algebra on the dual complex and transposes back.

Every functor here commutes strictly with shifts: objects are normalized to
start in degree 0 before replacement and shifted back afterwards, and the
lift used on morphisms is the canonical solution of a system whose pivots do
not depend on the shift.  The coherence isomorphisms ``delta`` are therefore
identities.  Powers are computed by iteration and cached, so
``F^i(F^j x) = F^{i+j} x`` holds on the nose for ``i, j`` of equal sign.
"""

from __future__ import annotations

from ..quiveralg import PathAlgebra, global_dimension
from .core import BlockMap, ProjCategory, ProjChainMap, ProjComplex
from .modular import (
    ModuleChainMap,
    is_quasi_iso,
    lift_through_quasi_iso,
    projective_replacement,
    realize,
    realize_chain_map,
)


class InfiniteGlobalDimension(RuntimeError):
    pass


def transpose_complex(p: ProjComplex, cat: ProjCategory) -> ProjComplex:
    """Read a complex over the opposite category as one over ``cat``; degrees negate."""
    terms = {-i: t for i, t in p.terms.items()}
    diffs = {-i - 1: d.transpose(cat) for i, d in p.diffs.items()}
    return ProjComplex(cat, terms, diffs, check=False)


def transpose_map(g: ProjChainMap, cat: ProjCategory, source: ProjComplex, target: ProjComplex) -> ProjChainMap:
    """``g: P -> Q`` over the opposite category gives ``T(Q) -> T(P)`` over ``cat``."""
    return ProjChainMap(source, target, {-i: m.transpose(cat) for i, m in g.comps.items()}, check=False)


class FunctorData:
    """A functor on ``K^b(proj A)`` with cached action on objects and morphisms.

    Args:
        cat: the category of projectives of a path algebra.
        kind: ``"identity"``, ``"shift"`` or ``"nu"``.
        amount: shift amount ``j`` for ``"shift"``; ``n`` for ``nu_n``.
        bound: length bound for projective replacements.
    """

    def __init__(self, cat: ProjCategory, kind: str = "identity", amount: int = 0, bound: int = 32):
        if kind not in ("identity", "shift", "nu"):
            raise ValueError(f"unknown functor {kind!r}")
        self.cat = cat
        self.kind = kind
        self.amount = amount
        self.bound = bound
        self.delta = "identity"
        self._obj: dict = {}
        self._mor: dict = {}
        self._rep: dict = {}
        self._irep: dict = {}
        if kind == "nu":
            alg = cat.algebra
            if not isinstance(alg, PathAlgebra):
                raise ValueError("nu is implemented for path algebras")
            global_dimension(alg, bound)  # raises ResolutionTooLong when infinite
            self.op_cat = ProjCategory(alg.opposite())

    @property
    def name(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "shift":
            return f"shift^{self.amount}"
        return f"nu_{self.amount}"

    @property
    def strictly_invertible(self) -> bool:
        return self.kind in ("identity", "shift")

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind, "amount": self.amount, "delta": self.delta}

    # public ---------------------------------------------------------------
    def obj(self, x: ProjComplex, power: int = 1) -> ProjComplex:
        if power == 0 or self.kind == "identity" or x.is_zero():
            return x
        if self.kind == "shift":
            return x.shift(self.amount * power)
        key = (x.key(), power)
        hit = self._obj.get(key)
        if hit is not None:
            return hit
        prev = self.obj(x, power - 1 if power > 0 else power + 1)
        out = self._step(prev) if power > 0 else self._istep(prev)
        self._obj[key] = out
        return out

    def mor(self, f: ProjChainMap, power: int = 1) -> ProjChainMap:
        if power == 0 or self.kind == "identity":
            return f
        if self.kind == "shift":
            return f.shift(self.amount * power)
        key = (f.key(), power)
        hit = self._mor.get(key)
        if hit is not None:
            return hit
        prev = self.mor(f, power - 1 if power > 0 else power + 1)
        out = self._mstep(prev) if power > 0 else self._imstep(prev)
        out = out.retarget(self.obj(f.source, power), self.obj(f.target, power))
        self._mor[key] = out
        return out

    # nu --------------------------------------------------------------------
    def _replace(self, x: ProjComplex):
        """``(nu x, q)`` with ``q: nu x -> realize_inj(x)``."""
        key = x.key()
        hit = self._rep.get(key)
        if hit is None:
            lo = x.lo
            c0 = realize(x.shift(lo), "inj")
            p0, q0 = projective_replacement(c0, self.cat, self.bound)
            if not is_quasi_iso(q0):
                raise ArithmeticError("projective replacement is not a quasi-isomorphism")
            hit = (p0.shift(-lo), q0.shift(-lo))
            self._rep[key] = hit
        return hit

    def _ireplace(self, x: ProjComplex):
        """``(nu^{-1} x, q')`` with ``q'`` over the opposite algebra into ``D realize(x)``."""
        key = x.key()
        hit = self._irep.get(key)
        if hit is None:
            lo = x.lo
            d0 = realize(x.shift(lo), "proj").dual(self.op_cat.algebra)
            p0, q0 = projective_replacement(d0, self.op_cat, self.bound)
            if not is_quasi_iso(q0):
                raise ArithmeticError("projective replacement is not a quasi-isomorphism")
            p, q = p0.shift(lo), q0.shift(lo)
            hit = (transpose_complex(p, self.cat), p, q)
            self._irep[key] = hit
        return hit

    def nu(self, x: ProjComplex) -> ProjComplex:
        return self._replace(x)[0]

    def nu_inverse(self, x: ProjComplex) -> ProjComplex:
        return self._ireplace(x)[0]

    def nu_map(self, f: ProjChainMap) -> ProjChainMap:
        px, qx = self._replace(f.source)
        py, qy = self._replace(f.target)
        nf = realize_chain_map(f, qx.target, qy.target, "inj")
        g, _ = lift_through_quasi_iso(qx.then(nf), qy)
        return g.retarget(px, py)

    def nu_inverse_map(self, f: ProjChainMap) -> ProjChainMap:
        jx, px, qx = self._ireplace(f.source)
        jy, py, qy = self._ireplace(f.target)
        rf = realize_chain_map(f, realize(f.source, "proj"), realize(f.target, "proj"), "proj")
        df = rf.dual(self.op_cat.algebra, qx.target, qy.target)
        g, _ = lift_through_quasi_iso(qy.then(df), qx)
        return transpose_map(g, self.cat, jx, jy)

    def _step(self, x):
        return self.nu(x).shift(-self.amount)

    def _istep(self, x):
        return self.nu_inverse(x.shift(self.amount))

    def _mstep(self, f):
        return self.nu_map(f).shift(-self.amount)

    def _imstep(self, f):
        return self.nu_inverse_map(f.shift(self.amount))


def identity_functor(cat) -> FunctorData:
    return FunctorData(cat, "identity")


def shift_functor(cat, j: int) -> FunctorData:
    return FunctorData(cat, "shift", j)


def nu_functor(cat, n: int, bound: int = 32) -> FunctorData:
    return FunctorData(cat, "nu", n, bound)


def apply_nu_n(fd: FunctorData, x, power: int = 1):
    """Apply ``fd`` ``power`` times to a complex or a chain map."""
    if isinstance(x, ProjChainMap):
        return fd.mor(x, power)
    return fd.obj(x, power)
