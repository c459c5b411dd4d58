"""Independent reference computations used by the test suite.

Nothing here imports the elimination routines of the package.  Ranks use
Bareiss fraction-free elimination on python integers (or plain elimination
mod p), and Hom dimensions are computed from one dense system built straight
from the algebra's structure constants.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import product


# ---------------------------------------------------------------------------
# ranks


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    s = str(x)
    return Fraction(s)


def bareiss_rank(rows, p: int = 0) -> int:
    """Rank by fraction-free elimination.

    Over Q the rows are scaled to integers first and the Bareiss recurrence
    (exact integer division by the previous pivot) is used.  Over F_p the same
    recurrence runs with modular inverses.
    """
    if not rows or not rows[0]:
        return 0
    if p:
        m = [[int(v) % p for v in r] for r in rows]
    else:
        m = []
        for r in rows:
            fr = [_to_fraction(v) for v in r]
            den = 1
            for v in fr:
                den = den * v.denominator // _gcd(den, v.denominator)
            m.append([int(v * den) for v in fr])
    nr, nc = len(m), len(m[0])
    prev = 1
    rk = 0
    col = 0
    while rk < nr and col < nc:
        piv = next((i for i in range(rk, nr) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rk], m[piv] = m[piv], m[rk]
        a = m[rk][col]
        for i in range(rk + 1, nr):
            b = m[i][col]
            for j in range(col, nc):
                v = a * m[i][j] - b * m[rk][j]
                if p:
                    m[i][j] = v * pow(prev, -1, p) % p
                else:
                    q, rem = divmod(v, prev)
                    assert rem == 0, "Bareiss division must be exact"
                    m[i][j] = q
        prev = a
        rk += 1
        col += 1
    return rk


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def mat_rows(m) -> list:
    """python lists of a flint matrix."""
    return [[m[i, j] for j in range(m.ncols())] for i in range(m.nrows())]


def to_plain(x, p: int):
    return int(x) if p else _to_fraction(x)


# ---------------------------------------------------------------------------
# path algebras


def path_algebra_dim(job: dict) -> dict:
    """Dimension data of a bound quiver algebra straight from a job dict.

    Enumerates every path, spans the relation ideal by multiplying each
    relation by all paths on both sides, then row-reduces.  Paths are stored
    as ``(start, end, labels)``; trivial paths have no labels.

    Returns ``{"dim": int, "corners": {(start, end): dim}}``.
    """
    alg = job["algebra"]
    arrows = {a["label"]: (a["from"], a["to"]) for a in alg["arrows"]}
    paths = [(v, v, ()) for v in alg["vertices"]]
    frontier = [(s, t, (a,)) for a, (s, t) in arrows.items()]
    while frontier:
        paths.extend(frontier)
        frontier = [(s, t2, labels + (a,)) for s, t, labels in frontier
                    for a, (s2, t2) in arrows.items() if s2 == t]
    index = {pth: k for k, pth in enumerate(paths)}
    n = len(paths)

    def concat(p1, p2):
        if p1[1] != p2[0]:
            return None
        return index[(p1[0], p2[1], p1[2] + p2[2])]

    def by_labels(labels):
        return index[(arrows[labels[0]][0], arrows[labels[-1]][1], tuple(labels))]

    span = []
    for rel in alg.get("relations", []):
        g = {}
        for term in rel:
            k = by_labels(term["path"])
            g[k] = g.get(k, 0) + Fraction(str(term["coeff"]))
        for left in paths:
            for right in paths:
                out = {}
                for k, c in g.items():
                    m = concat(left, paths[k])
                    m = None if m is None else concat(paths[m], right)
                    if m is not None:
                        out[m] = out.get(m, 0) + c
                if any(out.values()):
                    span.append(out)
    corners: dict = {}
    for s, t, _ in paths:
        corners[(s, t)] = corners.get((s, t), 0) + 1
    total = 0
    for key in list(corners):
        idx = [k for k, pth in enumerate(paths) if pth[:2] == key]
        sub = [[row.get(k, 0) for k in idx] for row in span if any(row.get(k, 0) for k in idx)]
        r = bareiss_rank(sub) if sub else 0
        corners[key] -= r
        total += r
    return {"dim": n - total, "corners": {k: v for k, v in corners.items() if v}}


def load_fixture_dict(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# homotopy category, by one dense system


def _block_alg(cat, s, t, coeffs) -> dict:
    basis = cat.basis(s, t)
    return {basis[k]: v for k, v in enumerate(coeffs) if v != 0}


def _mul(alg, u: dict, v: dict) -> dict:
    out: dict = {}
    for i, a in u.items():
        for j, b in v.items():
            for k, c in alg.product_basis(i, j).items():
                out[k] = out.get(k, 0) + a * b * c
    return out


def dense_hom_dim(x, y) -> int:
    """``dim Hom_{K^b}(x, y)`` from all degreewise map tuples, in one dense system.

    Unknowns are the coordinates of every degree-0 map ``x^i -> y^i``; the
    chain condition and the null-homotopic maps are both written in the
    algebra's full basis, so nothing depends on the package's layouts.
    """
    cat = x.cat
    alg = cat.algebra
    p = cat.field.p
    degrees = sorted(set(x.terms) | set(y.terms))

    def term(c, i):
        return c.terms.get(i, ())

    def dblock(c, i, a, b) -> dict:
        d = c.diffs.get(i)
        if d is None:
            return {}
        v = d.blocks.get((a, b))
        if v is None:
            return {}
        return _block_alg(cat, term(c, i)[a], term(c, i + 1)[b], v)

    # unknowns: (i, a, b, basis index) for maps x^i_a -> y^{i+k}_b
    def unknowns(k):
        out = []
        for i in degrees:
            for a, s in enumerate(term(x, i)):
                for b, t in enumerate(term(y, i + k)):
                    for bi in cat.basis(s, t):
                        out.append((i, a, b, bi))
        return out

    f_vars = unknowns(0)
    h_vars = unknowns(-1)
    c_keys = {}

    def ckey(key):
        if key not in c_keys:
            c_keys[key] = len(c_keys)
        return c_keys[key]

    f_pos = {v: k for k, v in enumerate(f_vars)}
    # chain constraint rows: one row per f unknown, columns = constraint coordinates
    rows = []
    for (i, a, b, bi) in f_vars:
        row: dict = {}
        unit = {bi: 1}
        # d_X^{i-1} f^i contributes to X^{i-1} -> Y^i
        for a0 in range(len(term(x, i - 1))):
            prod = _mul(alg, dblock(x, i - 1, a0, a), unit)
            for k, c in prod.items():
                row[ckey((i - 1, a0, b, k))] = row.get(ckey((i - 1, a0, b, k)), 0) + c
        # - f^i d_Y^i contributes to X^i -> Y^{i+1}
        for b1 in range(len(term(y, i + 1))):
            prod = _mul(alg, unit, dblock(y, i, b, b1))
            for k, c in prod.items():
                row[ckey((i, a, b1, k))] = row.get(ckey((i, a, b1, k)), 0) - c
        rows.append(row)
    ncon = len(c_keys)
    dense_c = [[to_plain(r.get(j, 0), p) for j in range(ncon)] for r in rows]
    # null-homotopic maps: images of h^i: x^i -> y^{i-1}
    hrows = []
    for (i, a, b, bi) in h_vars:
        row = [0] * len(f_vars)
        unit = {bi: 1}
        # d_X^{i-1} h^i lands in f^{i-1}: x^{i-1} -> y^{i-1}
        for a0 in range(len(term(x, i - 1))):
            for k, c in _mul(alg, dblock(x, i - 1, a0, a), unit).items():
                row[f_pos[(i - 1, a0, b, k)]] += c
        # h^i d_Y^{i-1} lands in f^i: x^i -> y^i
        for b1 in range(len(term(y, i))):
            for k, c in _mul(alg, unit, dblock(y, i - 1, b, b1)).items():
                row[f_pos[(i, a, b1, k)]] += c
        hrows.append([to_plain(v, p) for v in row])
    n = len(f_vars)
    if n == 0:
        return 0
    chain_dim = n - (bareiss_rank([list(col) for col in zip(*dense_c)], p) if ncon else 0)
    null_dim = bareiss_rank(hrows, p) if hrows else 0
    return chain_dim - null_dim


# ---------------------------------------------------------------------------
# random inputs


def random_element(cat, s: int, t: int, rng: random.Random, density: float = 0.7):
    f = cat.field
    return tuple(f(rng.randint(-3, 3)) if rng.random() < density else f(0) for _ in cat.basis(s, t))


def random_stalk(cat, rng: random.Random, degree: int = 0, max_terms: int = 2, max_dim: int = 12):
    from angleforge.homotopy import ProjComplex

    objs = _pick_objects(cat, rng, max_terms, max_dim)
    return ProjComplex.stalk(cat, objs, degree)


def _pick_objects(cat, rng, max_terms, max_dim):
    alg = cat.algebra
    sizes = [sum(cat.hom_dim(u, s) for u in range(cat.n_objects)) for s in range(cat.n_objects)]
    objs, total = [], 0
    for _ in range(rng.randint(1, max_terms)):
        s = rng.randrange(cat.n_objects)
        if total + sizes[s] <= max_dim:
            objs.append(s)
            total += sizes[s]
    if not objs:
        objs = [min(range(cat.n_objects), key=lambda s: sizes[s])]
    return objs


def random_chain_map(x, y, rng: random.Random):
    """Random combination of the chain-map basis (not just homotopy representatives)."""
    from angleforge.homotopy import ProjChainMap, hom_kb

    h = hom_kb(x, y)
    basis = h.chain_basis
    f = x.cat.field
    if basis.nrows() == 0:
        return ProjChainMap.zero(x, y)
    row = [f.zero] * basis.ncols()
    for r in range(basis.nrows()):
        c = f(rng.randint(-2, 2))
        if c == 0:
            continue
        for j in range(basis.ncols()):
            row[j] += c * basis[r, j]
    return ProjChainMap(x, y, h.maps0.maps(row))


def random_complex(cat, rng: random.Random, length: int | None = None, max_terms: int = 2, max_dim: int = 12):
    """Bounded complex built by iterated cones of random maps out of stalks.

    Each step picks a stalk ``S`` in the lowest degree of the current complex
    ``X`` and a random chain map ``S -> X``; the cone grows ``X`` by one
    degree downwards.  Terms stay within ``max_dim`` total vector-space
    dimension per degree whenever the stalk itself does.
    """
    from angleforge.homotopy import cone

    length = rng.randint(1, 3) if length is None else length
    x = random_stalk(cat, rng, 0, max_terms, max_dim)
    for _ in range(length - 1):
        lo = min(x.terms)
        s = random_stalk(cat, rng, lo, max_terms, max_dim)
        g = random_chain_map(s, x, rng)
        x = cone(g)[0]
    return x


def term_dims(x) -> dict:
    cat = x.cat
    return {i: sum(sum(cat.hom_dim(u, s) for u in range(cat.n_objects)) for s in t) for i, t in x.terms.items()}


def random_homotopy_perturbation(f, rng: random.Random):
    """``f + (d h + h d)`` for a random degree -1 map ``h``."""
    from angleforge.homotopy import BlockMap, HomotopyWitness

    x, y = f.source, f.target
    cat = x.cat
    comps = {}
    for i in x.terms:
        src, tgt = x.term(i), y.term(i - 1)
        if not tgt:
            continue
        blocks = {}
        for a, s in enumerate(src):
            for b, t in enumerate(tgt):
                if cat.hom_dim(s, t):
                    blocks[(a, b)] = random_element(cat, s, t, rng)
        comps[i] = BlockMap(cat, src, tgt, blocks)
    w = HomotopyWitness(x, y, comps)
    return f + w.boundary()


def all_pairs(n: int):
    return product(range(n), repeat=2)


ADMISSIBLE_SMALL = ([0], [0, 1], [0, 2], [0, 1, 2], [0, 3], [0, 1, 3], [0, 2, 4], [0, -1], [0, -2, -1])


def yoneda_fixtures(count: int = 24):
    """Generated ``(label, U, Φ, F)`` fixtures over four small algebras.

    ``U`` is a sum of two or three random complexes with nonzero
    endomorphism rings; shift functors carry the nontrivial Φ, ``ν`` and the
    identity use ``Φ = {0}``.
    """
    from angleforge.homotopy import FunctorData, ProjCategory, hom_kb, minimize
    from angleforge.jobs import load_job
    from angleforge.nangle import Decomposed
    from angleforge.quiveralg import Quiver, RelationSet, build_algebra

    def linear(n, rels=()):
        q = Quiver([str(i) for i in range(1, n + 1)], [(f"a{i}{i + 1}", str(i), str(i + 1)) for i in range(1, n)])
        return build_algebra(q, RelationSet([[(Fraction(1), list(r))] for r in rels]))

    cats = {
        "A2": ProjCategory(linear(2)),
        "A3": ProjCategory(linear(3)),
        "A3rad": ProjCategory(linear(3, [("a12", "a23")])),
        "ten_vertex": load_job("ten_vertex").cat,
    }
    out = []
    k = 0
    while len(out) < count:
        rng = random.Random(k)
        cname = list(cats)[k % 4]
        k += 1
        cat = cats[cname]
        kind = rng.choice(["shift", "shift", "identity", "nu"])
        if kind == "identity":
            phi, fd = [0], FunctorData(cat, "identity")
        elif kind == "nu":
            phi, fd = [0], FunctorData(cat, "nu", 2 if cname == "ten_vertex" else 1)
        else:
            phi, fd = rng.choice(ADMISSIBLE_SMALL), FunctorData(cat, "shift", rng.choice([1, 2]))
        parts = []
        for j in range(rng.randint(2, 3)):
            x = minimize(random_complex(cat, rng, length=rng.randint(1, 2)))[0]
            if hom_kb(x, x).dim:
                parts.append((f"U{j}", x))
        if len(parts) < 2:
            continue
        out.append((f"{cname}/{kind}/{phi}", Decomposed(parts, cat), phi, fd))
    return out
