"""Admissible degree sets and what goes wrong without admissibility.

Run with ``python demos/01_admissible_sets.py``.
"""

# %%
# Admissibility asks that whenever i, j, k are in the set and i + j + k is
# too, the partial sums i + j and j + k are there as well.
import itertools

from angleforge.homotopy import FunctorData, ProjCategory, ProjComplex
from angleforge.nangle import Decomposed
from angleforge.quiveralg import Quiver, RelationSet, build_algebra
from angleforge.yoneda import (
    PerforatedYonedaData,
    PhiSet,
    admissibility_counterexample,
    e_algebra,
    is_admissible,
)

for phi in ([0], [0, 1, 2], [0, 3, 17], [0, -2, -1], [0, -1, 1], [0, 1, 2, 4]):
    verdict = "admissible" if is_admissible(phi) else f"fails at {admissibility_counterexample(phi)}"
    print(f"{str(phi):14s} {verdict}")

# %%
# Counting subsets of [0, 8] that contain 0.
subsets = [(0,) + c for r in range(9) for c in itertools.combinations(range(1, 9), r)]
good = [p for p in subsets if is_admissible(p)]
print(f"{len(good)} of {len(subsets)} subsets are admissible")
print("closed under cubes:", all(is_admissible({x ** 3 for x in p}) for p in good))

# %%
# Over a field the Nakayama functor fixes the only projective, so every
# degree in the set carries one basis element of the E-algebra.
alg = build_algebra(Quiver(["1"], []), RelationSet([]), name="k")
cat = ProjCategory(alg)
fd = FunctorData(cat, "nu", 0)
u = Decomposed([("P", ProjComplex.stalk(cat, [0], 0))], cat)

e = e_algebra(u, [0, 1, 2], fd)
print("degrees with {0,1,2}:", [el.degree for el in e.elements])
print("associative:", e.check_associativity())

# %%
# With {0, 1, 2, 4}, (x1 * x1) * x2 reaches degree 4 through degree 2,
# while x1 * (x1 * x2) passes through degree 3 and is truncated to zero.
bad = PerforatedYonedaData(u, PhiSet([0, 1, 2, 4], check=False), fd, check_phi=False)
i, j, k = bad.associativity_counterexample()
print("non-associative triple, degrees:", [bad.elements[t].degree for t in (i, j, k)])
a = bad.algebra
print("(ab)c =", a.multiply(a.product_basis(i, j), {k: 1}))
print("a(bc) =", a.multiply({i: 1}, a.product_basis(j, k)))
