"""A seed map that is not left-minimal, and a seed that fails the hypotheses.

Run with ``python demos/03_nonminimal_seed.py``.
"""

# %%
# Over A2 the seed P1 -> S1 + P2 is an approximation but not a minimal one,
# so E(V) picks up an ideal I and T lives over the quotient E(V)/I.
from angleforge.cli import run_job
from angleforge.jobs import load_job, read_job
from angleforge.tilting import build_T, end_algebra_kb, verify_theorem_instance
from angleforge.yoneda import ideal_I, ideal_J, quotient_algebra, theorem_setup

job = load_job("a2_nonminimal")
setup = theorem_setup(job.instance(), job.phi, job.fd)
i = ideal_I(setup)
print("basis of E(V):", setup.lam.algebra.tags)
print(f"dim E(V) = {setup.lam.dim}, dim I = {i.dim}, dim E(V)/I = {quotient_algebra(setup.lam, i).dim}")

# %%
# E(W)/J and End(T) agree even though E(V)/I is smaller.
t = build_T(setup)
j = ideal_J(setup)
print("T terms:", t.describe()["terms"])
print(f"dim E(W)/J = {quotient_algebra(setup.gam, j).dim}, dim End(T) = {end_algebra_kb(t).dim}")
print("verdict:", verify_theorem_instance(job.instance(), job.phi, job.fd).verdict)

# %%
# Replacing the seed of the 10-vertex job by the zero map breaks the left
# approximation condition; the run reports which clause failed.
d = read_job("ten_vertex")
d.pop("last")
d["seed"] = {"kind": "explicit", "source": "111:0", "target": ["021:0", "102:0", "210:1"], "components": []}
code, report, _ = run_job(d)
print(f"exit code {code}: {report['verdict']} ({report['failed_clause']})")
