import json
import random

import pytest

from angleforge.homotopy import ProjChainMap, ProjComplex, direct_sum, hom_kb
from angleforge.jobs import load_job
from angleforge.quiveralg import hom_modules, projective
from angleforge.tilting import (
    CertificateFailed,
    ThetaData,
    ThetaSolver,
    build_T,
    check_generation,
    check_self_orthogonal,
    end_algebra_kb,
    generation_certificate,
    theta,
    verify_theorem_instance,
)
from angleforge.yoneda import HypothesisFailed, ideal_J, quotient_algebra, theorem_setup
from conftest import job_dict
from oracles import dense_hom_dim, random_homotopy_perturbation


def _pipeline(name):
    job = load_job(name)
    setup = theorem_setup(job.instance(), job.phi, job.fd)
    t = build_T(setup)
    j = ideal_J(setup, check=False)
    gbar = quotient_algebra(setup.gam, j)
    return job, setup, t, j, gbar


@pytest.fixture(scope="module")
def nonmin():
    return _pipeline("a2_nonminimal")


@pytest.fixture(scope="module")
def ten_vertex_theta_parts(ten_vertex_T):
    setup = ten_vertex_T.setup
    j = ideal_J(setup, check=False)
    gbar = quotient_algebra(setup.gam, j)
    end = end_algebra_kb(ten_vertex_T)
    return j, gbar, end, ThetaSolver(ten_vertex_T, setup.gam, j, gbar)


def _stalk_of_all(cat):
    return ProjComplex.stalk(cat, list(range(cat.n_objects)), 0)


# ---------------------------------------------------------------------------
# the complexes


def test_ten_vertex_T_shape(ten_vertex_T):
    assert ten_vertex_T.length == 3
    names = ten_vertex_T.describe()["terms"]
    assert names["0"] == ["111:0"]
    assert names["1"] == ["021:0", "102:0", "210:1"]
    assert names["2"] == ["012:0", "120:1", "201:1", "021:0", "102:0", "210:1", "012:0", "120:1", "201:1"]
    assert ten_vertex_T.pq_ok


def test_triangle_T_has_two_terms():
    _, _, t, _, _ = _pipeline("a2_triangle")
    assert t.length == 2
    assert t.pq_ok


@pytest.mark.parametrize("which", ["t", "t_tilde"])
def test_differentials_square_to_zero(ten_vertex_T, which):
    cx = getattr(ten_vertex_T, which)
    for k in cx.diffs:
        if k + 1 in cx.diffs:
            assert cx.diff(k).then(cx.diff(k + 1)).is_zero()


def test_T_is_reduction_of_T_tilde(ten_vertex_T):
    # with I = 0 the quotient changes nothing
    assert ten_vertex_T.ideal.dim == 0
    assert {k: v for k, v in ten_vertex_T.t.terms.items()} == {k: v for k, v in ten_vertex_T.t_tilde.terms.items()}
    assert ten_vertex_T.lam_bar.dim == ten_vertex_T.lam.dim


def test_nonminimal_T_over_the_quotient(nonmin):
    _, _, t, _, _ = nonmin
    assert t.ideal.dim == 1 and t.lam_bar.dim == 4
    assert t.describe()["terms"] == {"0": ["P1"], "1": ["S1", "P2", "S1", "P2"]}
    # the differential only uses P1 -> S1, which survives in Λ/I
    assert dict(t.t.diff(0).blocks) == dict(t.t_tilde.diff(0).blocks) == {(0, 0): (1,)}


def test_pq_equals_image_of_alpha1(nonmin):
    _, _, t, _, _ = nonmin
    assert t.pq_ok
    t.p.validate()
    t.q.validate()


def test_build_T_refuses_failed_hypotheses():
    d = job_dict("ten_vertex")
    d.pop("last")
    d["seed"] = {"kind": "explicit", "source": "111:0", "target": ["021:0", "102:0", "210:1"],
                 "components": [{"to": 0, "coords": [1]}, {"to": 1, "coords": [1]}]}
    job = load_job(d)
    with pytest.raises(HypothesisFailed):
        build_T(job.instance(), job.phi, job.fd)


# ---------------------------------------------------------------------------
# self-orthogonality


def test_ten_vertex_self_orthogonality_table(ten_vertex_T):
    table = check_self_orthogonal(ten_vertex_T)
    assert table == {-2: 0, -1: 0, 1: 0, 2: 0}


@pytest.mark.parametrize("i", [-2, -1, 1, 2])
def test_self_orthogonality_against_dense_oracle(ten_vertex_T, i):
    cx = ten_vertex_T.t
    assert dense_hom_dim(cx, cx.shift(i)) == 0
    assert dense_hom_dim(cx, cx) == hom_kb(cx, cx).dim


def test_free_module_is_self_orthogonal(ten_vertex_T):
    lam = _stalk_of_all(ten_vertex_T.cat_bar)
    assert all(v == 0 for v in check_self_orthogonal(lam).values())
    for i in (-2, -1, 1, 2):
        assert hom_kb(lam, lam.shift(i)).dim == 0


def test_non_orthogonal_complex_is_detected(ten_vertex_T):
    x = _stalk_of_all(ten_vertex_T.cat_bar)
    s, _, _ = direct_sum([x, x.shift(1)])
    table = check_self_orthogonal(s)
    # Hom(Λ[1], Λ[1]) and Hom(Λ, Λ) survive the shifts by 1 and -1
    assert table[1] == table[-1] == 19


# ---------------------------------------------------------------------------
# generation


def test_ten_vertex_generation_certificate(ten_vertex_T):
    cert = check_generation(ten_vertex_T)
    assert cert.passed
    assert cert.missing_positions == []


def test_free_module_generates(ten_vertex_T):
    assert generation_certificate(_stalk_of_all(ten_vertex_T.cat_bar)).passed


def test_missing_projective_fails_clause_ii(ten_vertex_T):
    cat = ten_vertex_T.cat_bar
    partial = ProjComplex.stalk(cat, [0, 1], 0)
    with pytest.raises(CertificateFailed) as exc:
        generation_certificate(partial)
    assert exc.value.clause == "ii"
    cert = generation_certificate(partial, raise_on_fail=False)
    assert not cert.passed and cert.missing_positions == list(range(2, cat.n_objects))


def test_split_slot_hit_by_differential_fails_clause_i(ten_vertex_T):
    t = ten_vertex_T.t
    top = max(t.degrees)
    hit = sorted({b for (_, b) in t.diffs[top - 1].blocks})
    with pytest.raises(CertificateFailed) as exc:
        generation_certificate(t, hit[:1])
    assert exc.value.clause == "i"


# ---------------------------------------------------------------------------
# endomorphism rings


def test_end_of_free_module_is_the_algebra(ten_vertex_T):
    e = end_algebra_kb(_stalk_of_all(ten_vertex_T.cat_bar))
    assert e.dim == ten_vertex_T.lam_bar.dim == 19
    assert e.algebra.check_associativity()


def test_end_of_T_agrees_with_dense_oracle(ten_vertex_T):
    e = end_algebra_kb(ten_vertex_T)
    assert e.dim == 19 == dense_hom_dim(ten_vertex_T.t, ten_vertex_T.t)
    assert e.algebra.unit() == {0: 1}


def test_end_of_double(ten_vertex_T):
    tt, _, _ = direct_sum([ten_vertex_T.t, ten_vertex_T.t])
    assert end_algebra_kb(tt).dim == 4 * end_algebra_kb(ten_vertex_T).dim


def test_stalk_homs_over_quotient_match_module_homs(nonmin):
    _, _, t, _, _ = nonmin
    cat = t.cat_bar
    alg = t.lam_bar
    for s in range(alg.n_idem):
        for u in range(alg.n_idem):
            a = ProjComplex.stalk(cat, [s], 0)
            b = ProjComplex.stalk(cat, [u], 0)
            assert hom_kb(a, b).dim == len(hom_modules(projective(alg, s), projective(alg, u)))


# ---------------------------------------------------------------------------
# Θ


def test_ten_vertex_theta_is_an_isomorphism(ten_vertex_T, ten_vertex_theta_parts):
    j, gbar, end, _ = ten_vertex_theta_parts
    td = theta(ten_vertex_T, j, gbar, end)
    assert isinstance(td, ThetaData)
    assert td.rank == 19 and td.square
    assert td.injective and td.surjective
    assert td.multiplicative and td.unital and td.kernel_in_J
    assert td.isomorphism
    assert td.failures == []


def test_theta_sends_identity_to_one(ten_vertex_T, ten_vertex_theta_parts):
    _, gbar, _, solver = ten_vertex_theta_parts
    assert solver(ProjChainMap.identity(ten_vertex_T.t)) == gbar.unit()


def test_theta_kills_null_homotopic_maps(ten_vertex_T, ten_vertex_theta_parts):
    _, _, _, solver = ten_vertex_theta_parts
    rng = random.Random(0)
    zero = ProjChainMap.zero(ten_vertex_T.t, ten_vertex_T.t)
    for _ in range(3):
        assert solver(random_homotopy_perturbation(zero, rng)) == {}


def test_theta_is_well_defined_on_classes(ten_vertex_T, ten_vertex_theta_parts):
    _, _, end, solver = ten_vertex_theta_parts
    rng = random.Random(1)
    for k in rng.sample(range(end.dim), 5):
        g = end.maps[k]
        assert solver(random_homotopy_perturbation(g, rng)) == solver(g)


def test_theta_on_nonminimal_seed(nonmin):
    _, _, t, j, gbar = nonmin
    td = theta(t, j, gbar)
    # Λ/I and Γ/J have different dimensions, but End(T) matches Γ/J
    assert t.lam_bar.dim == 4 and gbar.dim == 7
    assert td.end.dim == 7 == dense_hom_dim(t.t, t.t)
    assert td.isomorphism


# ---------------------------------------------------------------------------
# the report


def test_ten_vertex_report(ten_vertex_report):
    r = ten_vertex_report
    assert r.verdict == "equivalent"
    assert r.errors == []
    assert r.dims == {"Lambda": 19, "Gamma": 19, "I": 0, "J": 0, "Lambda_bar": 19, "Gamma_bar": 19, "T_length": 3}
    assert r.orthogonality == {"-2": 0, "-1": 0, "1": 0, "2": 0}
    assert r.end_dim == 19
    assert r.generation["passed"]
    assert r.lemma_checks == {"annihilates_E(V,M)": True, "I.E(V,X)_matches": True, "dim_I.E(V,X)": 0,
                              "I_closed": True, "J_closed": True, "pq_equals_E(V,alpha_1)": True}


def test_report_serializations(ten_vertex_report):
    d = json.loads(ten_vertex_report.to_json())
    assert d["verdict"] == "equivalent"
    assert d["meta"]["functor"] == ten_vertex_report.meta["functor"]
    text = ten_vertex_report.to_text()
    assert text.startswith("verdict: equivalent\n")
    assert "dim End(T): 19" in text


@pytest.mark.parametrize("name,gbar", [("a2_triangle", 3), ("a2_nonminimal", 7)])
def test_small_reports(name, gbar):
    job = load_job(name)
    r = verify_theorem_instance(job.instance(), job.phi, job.fd)
    assert r.verdict == "equivalent"
    assert r.dims["Gamma_bar"] == gbar == r.end_dim


def test_report_over_prime_field():
    job = load_job("ten_vertex", field="fp:32003")
    r = verify_theorem_instance(job.instance(), job.phi, job.fd)
    assert r.verdict == "equivalent"
    assert r.meta["field"] == "F_32003"
    assert r.end_dim == 19
