import random

import pytest

from angleforge.homotopy import ProjChainMap, ProjComplex, cone, direct_sum, hom_kb, homotopic, is_null_homotopic, minimize
from angleforge.exactlin import CharacteristicTooSmall
from angleforge.jobs import load_job
from angleforge.nangle import (
    Decomposed,
    DecompositionRequired,
    Family,
    MissingTower,
    NSigmaSequence,
    ar_checks,
    build_from_tower,
    check_exactness,
    complete_to_morphism,
    end_radical,
    find_isomorphism,
    instance_from_sequence,
    is_isomorphism,
    is_left_approximation_in,
    is_left_minimal,
    is_local,
    is_right_approximation_in,
    is_right_minimal,
    minimal_left_approximation,
    own_probes,
    pad_angle,
    rotate,
    square_defects,
    trivial_sequence,
)
from conftest import stalk
from oracles import dense_hom_dim, random_chain_map, random_complex


@pytest.fixture(scope="module")
def a2_job():
    return load_job("a2_triangle")


@pytest.fixture(scope="module")
def ten_vertex_angle(ten_vertex_job):
    return ten_vertex_job.instance()


def _all_probes(job):
    return list(job.family)


# ---------------------------------------------------------------------------
# sequences and exactness


@pytest.mark.parametrize("n", [3, 4, 5])
def test_trivial_sequence_is_exact(ten_vertex_job, n):
    seq = trivial_sequence(ten_vertex_job.obj("111:0"), n)
    assert seq.composite_defects() == []
    assert check_exactness(seq, _all_probes(ten_vertex_job)).exact


@pytest.mark.parametrize("seed", range(4))
def test_trivial_sequence_on_random_complex(ten_vertex_job, seed):
    x = random_complex(ten_vertex_job.cat, random.Random(seed))
    seq = trivial_sequence(x, 4)
    assert check_exactness(seq, [x] + _all_probes(ten_vertex_job)[:6]).exact


def test_zero_map_sequence_is_not_exact(ten_vertex_job):
    x = ten_vertex_job.obj("111:0")
    z = ProjChainMap.zero
    o = ProjComplex.zero(ten_vertex_job.cat)
    seq = NSigmaSequence([x, x, o], [z(x, x), z(x, o), z(o, x.shift(1))], 1)
    rep = check_exactness(seq, [x])
    assert not rep.exact
    assert rep.failures


def test_sequence_rejects_non_vanishing_composite(a2_job):
    p1 = a2_job.obj("P1")
    ident = ProjChainMap.identity
    with pytest.raises(ValueError):
        NSigmaSequence([p1, p1, p1], [ident(p1), ident(p1), ident(p1).retarget(p1, p1.shift(1))], 1)


def test_sequence_needs_three_objects(a2_job):
    p1 = a2_job.obj("P1")
    with pytest.raises(ValueError):
        NSigmaSequence([p1, p1], [ProjChainMap.identity(p1)] * 2, 1)


# ---------------------------------------------------------------------------
# rotation


def test_rotation_sign_depends_on_parity(ten_vertex_angle, a2_job):
    seq = ten_vertex_angle.sequence  # n = 4: sign +1
    left = rotate(seq, "left")
    assert left.maps[-1] == seq.maps[0].shift(2)
    tri = a2_job.instance().sequence  # n = 3: sign -1
    left3 = rotate(tri, "left")
    assert left3.maps[-1] == tri.maps[0].shift(1).scale(-1)
    assert left3.maps[-1] != tri.maps[0].shift(1)


@pytest.mark.parametrize("which", ["ten_vertex", "a2_triangle"])
def test_rotation_round_trip(which):
    seq = load_job(which).instance().sequence
    back = rotate(rotate(seq, "left"), "right")
    assert [x.key() for x in back.objects] == [x.key() for x in seq.objects]
    for a, b in zip(back.maps, seq.maps):
        assert a == b
    again = rotate(rotate(seq, "right"), "left")
    assert all(a == b for a, b in zip(again.maps, seq.maps))


def test_rotations_stay_exact(ten_vertex_job, ten_vertex_angle):
    seq = ten_vertex_angle.sequence
    for _ in range(seq.n):
        seq = rotate(seq, "left")
        assert seq.composite_defects() == []
        assert check_exactness(seq, _all_probes(ten_vertex_job)).exact


def test_rotation_bad_direction(ten_vertex_angle):
    with pytest.raises(ValueError):
        rotate(ten_vertex_angle.sequence, "up")


# ---------------------------------------------------------------------------
# towers


def test_three_term_tower_is_the_cone(a2_job):
    p1, p2 = a2_job.obj("P1"), a2_job.obj("P2")
    f = hom_kb(p2, p1).basis()[0]
    inst = build_from_tower(f, 3)
    c, _, _ = cone(f)
    assert find_isomorphism(inst.sequence.objects[2], c) is not None
    assert find_isomorphism(inst.sequence.objects[2], a2_job.obj("S1")) is not None
    assert inst.tower.verify()


def test_tower_needs_family_above_three(a2_job):
    p1, p2 = a2_job.obj("P1"), a2_job.obj("P2")
    f = hom_kb(p2, p1).basis()[0]
    with pytest.raises(ValueError):
        build_from_tower(f, 4)
    with pytest.raises(ValueError):
        build_from_tower(f, 2)


def test_ten_vertex_angle_shape(ten_vertex_angle):
    names = ten_vertex_angle.sequence.names()
    assert names == ["111:0", "021:0 + 102:0 + 210:1", "012:0 + 120:1 + 201:1", "111:1"]
    assert ten_vertex_angle.n == 4 and ten_vertex_angle.suspension == 2
    assert ten_vertex_angle.tower.verify()
    assert len(ten_vertex_angle.tower.approximations) == 1


def test_ten_vertex_angle_closes_under_nu2(ten_vertex_job, ten_vertex_angle):
    # the last object is nu_2^{-1} of the first one
    seq = ten_vertex_angle.sequence
    assert find_isomorphism(ten_vertex_job.fd.obj(seq.objects[-1]), seq.objects[0]) is not None


def test_ten_vertex_unreduced_tower_agrees(ten_vertex_job, ten_vertex_angle):
    x1 = ten_vertex_angle.summands[0]
    inst = build_from_tower(ten_vertex_angle.sequence.maps[0], 4, ten_vertex_job.family, source=x1,
                            target=ten_vertex_angle.summands[1], reduce=False)
    assert find_isomorphism(inst.sequence.objects[-1], ten_vertex_angle.sequence.objects[-1]) is not None


def test_ten_vertex_angle_exact_against_translates(ten_vertex_job, ten_vertex_angle):
    seq = ten_vertex_angle.sequence
    probes = own_probes(seq, ten_vertex_job.fd, powers=(-1, 0, 1))
    assert len(probes) > 8
    assert check_exactness(seq, probes).exact


def test_tower_rejects_wrong_last(ten_vertex_job, ten_vertex_angle):
    x1 = ten_vertex_angle.summands[0]
    wrong = Decomposed.single("111:0", ten_vertex_job.obj("111:0"))
    with pytest.raises(ValueError):
        build_from_tower(ten_vertex_angle.sequence.maps[0], 4, ten_vertex_job.family, source=x1,
                         target=ten_vertex_angle.summands[1], last=wrong)


# ---------------------------------------------------------------------------
# padding


@pytest.mark.parametrize("side", ["bar", "tilde"])
def test_padding_is_exact(ten_vertex_job, ten_vertex_angle, side):
    padded = pad_angle(ten_vertex_angle, side)
    seq = padded.sequence
    assert seq.n == 4
    assert seq.composite_defects() == []
    assert check_exactness(seq, _all_probes(ten_vertex_job)).exact


@pytest.mark.parametrize("side", ["bar", "tilde"])
def test_padding_on_triangle(a2_job, side):
    padded = pad_angle(a2_job.instance(), side)
    assert check_exactness(padded.sequence, _all_probes(a2_job)).exact


def test_padding_adds_m(ten_vertex_angle):
    bar = pad_angle(ten_vertex_angle, "bar").sequence
    m = ten_vertex_angle.m_parts()
    assert len(m) == 6
    assert len(bar.summands[-1]) == len(m) + 1
    assert len(bar.summands[-2]) == 3 + len(m)
    tilde = pad_angle(ten_vertex_angle, "tilde").sequence
    assert len(tilde.summands[1]) == 1 + len(m)


def test_padding_needs_summands(ten_vertex_job):
    seq = trivial_sequence(ten_vertex_job.obj("111:0"), 4)
    seq.summands = None
    with pytest.raises(DecompositionRequired):
        pad_angle(instance_from_sequence(seq))
    with pytest.raises(ValueError):
        pad_angle(load_job("a2_triangle").instance(), "middle")


# ---------------------------------------------------------------------------
# morphisms of sequences


def test_identity_completes_to_identity_class(ten_vertex_angle):
    x1 = ten_vertex_angle.sequence.objects[0]
    m = complete_to_morphism(ten_vertex_angle, ten_vertex_angle, [ProjChainMap.identity(x1)])
    seq = ten_vertex_angle.sequence
    assert square_defects(seq, seq, m.maps) == []
    for k, w in enumerate(m.witnesses):
        a = seq.maps[k]
        nxt = m.maps[k + 1] if k + 1 < seq.n else m.maps[0].shift(seq.suspension)
        diff = a.then(nxt.retarget(a.target)) - m.maps[k].retarget(a.source).then(seq.maps[k])
        assert w.verify(diff)


@pytest.mark.parametrize("scale", [2, -3])
def test_scaled_identity_completes(ten_vertex_angle, scale):
    seq = ten_vertex_angle.sequence
    phi1 = ProjChainMap.identity(seq.objects[0]).scale(scale)
    m = complete_to_morphism(ten_vertex_angle, ten_vertex_angle, [phi1])
    assert square_defects(seq, seq, m.maps) == []


def test_completion_with_two_given_components(ten_vertex_angle):
    seq = ten_vertex_angle.sequence
    ids = [ProjChainMap.identity(x) for x in seq.objects[:2]]
    m = complete_to_morphism(ten_vertex_angle, ten_vertex_angle, ids)
    assert square_defects(seq, seq, m.maps) == []
    assert len(m.maps) == 4


def test_completion_into_padded_angle(ten_vertex_angle):
    tilde = pad_angle(ten_vertex_angle, "tilde")
    rot = instance_from_sequence(rotate(ten_vertex_angle.sequence, "right"))
    rot.tower = ten_vertex_angle.tower
    x1 = rot.sequence.objects[0]
    phi1 = ProjChainMap.identity(x1).retarget(x1, tilde.sequence.objects[0])
    m = complete_to_morphism(rot, tilde, [phi1])
    assert square_defects(rot.sequence, tilde.sequence, m.maps) == []


def test_completion_needs_towers(ten_vertex_job, ten_vertex_angle):
    triv = instance_from_sequence(trivial_sequence(ten_vertex_job.obj("111:0"), 4))
    x = ten_vertex_job.obj("111:0")
    with pytest.raises(MissingTower):
        complete_to_morphism(triv, ten_vertex_angle, [ProjChainMap.identity(x)])
    m = complete_to_morphism(triv, ten_vertex_angle, [ProjChainMap.identity(x)], require_tower=False)
    assert square_defects(triv.sequence, ten_vertex_angle.sequence, m.maps) == []


def test_square_defects_detects_bad_component(ten_vertex_angle):
    seq = ten_vertex_angle.sequence
    phis = [ProjChainMap.identity(x) for x in seq.objects]
    phis[1] = ProjChainMap.zero(seq.objects[1], seq.objects[1])
    assert square_defects(seq, seq, phis) == [1, 2]


# ---------------------------------------------------------------------------
# Auslander-Reiten checks


def test_ten_vertex_angle_passes_ar_checks(ten_vertex_job, ten_vertex_angle):
    rep = ar_checks(ten_vertex_angle, ten_vertex_job.family)
    assert rep["passed"]
    assert rep["in_family"]
    assert all(rep["source_map"].values()) and all(rep["sink_map"].values())
    assert rep["minimal_left"] == [True] and rep["minimal_right"] == [True]


def test_a2_triangle_passes_ar_checks(a2_job):
    assert ar_checks(a2_job.instance(), a2_job.family)["passed"]


@pytest.mark.parametrize("n", [3, 4])
def test_trivial_angle_fails_ar_checks(ten_vertex_job, n):
    triv = instance_from_sequence(trivial_sequence(ten_vertex_job.obj("111:0"), n, name="111:0"))
    rep = ar_checks(triv, ten_vertex_job.family)
    assert not rep["passed"]
    assert rep["end_terms_indecomposable"] is False


def test_nonminimal_seed_fails_minimality():
    job = load_job("a2_nonminimal")
    fam = Family([(n, job.obj(n)) for n in ("P1", "P2", "S1")])
    rep = ar_checks(job.instance(), fam)
    assert not rep["passed"]
    assert rep["source_map"]["left_minimal"] is False
    assert rep["source_map"]["radical"] and rep["source_map"]["onto_radical"]


def test_ar_checks_need_summands(ten_vertex_job):
    seq = trivial_sequence(ten_vertex_job.obj("111:0"), 4)
    seq.summands = None
    with pytest.raises(DecompositionRequired):
        ar_checks(instance_from_sequence(seq), ten_vertex_job.family)


# ---------------------------------------------------------------------------
# approximations, isomorphisms, local ends


def test_family_members_are_local_and_distinct(ten_vertex_job):
    fam = ten_vertex_job.family
    for name, u in fam:
        assert is_local(u), name
        assert fam.match(u)[0] == name


def test_family_match_up_to_isomorphism(ten_vertex_job):
    fam = ten_vertex_job.family
    u = ten_vertex_job.obj("021:0")
    hit = fam.match(ten_vertex_job.fd.obj(ten_vertex_job.fd.obj(u, -1)))
    assert hit is not None and hit[0] == "021:0"
    assert is_isomorphism(hit[1])
    assert fam.match(stalk(ten_vertex_job.cat, 0, degree=5)) is None


def test_end_radical_of_double(ten_vertex_job):
    u = ten_vertex_job.obj("111:0")
    uu, _, _ = direct_sum([u, u])
    assert hom_kb(uu, uu).dim == 4 * hom_kb(u, u).dim
    # End(U + U) = M_2(End U) has radical M_2(rad End U)
    assert end_radical(uu).nrows() == 4 * end_radical(u).nrows()
    assert not is_local(uu)


def test_end_radical_refuses_small_characteristic():
    job = load_job("a2_triangle", field="fp:2")
    x = job.obj("P1")
    xx, _, _ = direct_sum([x, x, x])
    assert hom_kb(xx, xx).dim == 9
    with pytest.raises(CharacteristicTooSmall):
        end_radical(xx)
    # small endomorphism rings are still fine
    assert end_radical(x).nrows() == 0


@pytest.mark.parametrize("name", ["111:0", "210:1", "021:0", "300:0", "003:1"])
def test_source_maps_are_minimal_left_approximations(ten_vertex_job, name):
    x = ten_vertex_job.obj(name)
    fam = ten_vertex_job.family
    tgt, f = minimal_left_approximation(x, fam)
    assert is_left_approximation_in(f, fam)
    assert is_left_minimal(f)
    # every member appears dim Hom(x, -) modulo radical factorizations; never more than dim Hom
    for n, u in fam:
        assert sum(1 for m, _ in tgt.parts if m.split("#")[0] == n) <= hom_kb(x, u).dim


@pytest.mark.parametrize("seed", range(6))
def test_left_approximation_of_random_complex(ten_vertex_job, seed):
    x = random_complex(ten_vertex_job.cat, random.Random(seed), length=2)
    fam = ten_vertex_job.family
    _, f = minimal_left_approximation(x, fam)
    assert is_left_approximation_in(f, fam)
    assert is_left_minimal(f)


def test_approximation_plus_zero_summand_is_not_minimal(a2_job):
    p1, p2, s1 = (a2_job.obj(n) for n in ("P1", "P2", "S1"))
    fam = Family([("S1", s1), ("P2", p2)])
    src = Decomposed.single("P1", p1)
    tgt = Decomposed([("S1", s1), ("P2", p2)], a2_job.cat)
    f = src.assemble(tgt, {(0, 0): hom_kb(p1, s1).basis()[0]})
    assert is_left_approximation_in(f, fam)
    assert not is_left_minimal(f)


def test_right_approximation_and_minimality(a2_job):
    p1, p2 = a2_job.obj("P1"), a2_job.obj("P2")
    f = hom_kb(p2, p1).basis()[0]
    fam = Family([("P2", p2)])
    assert is_right_approximation_in(f, fam)
    assert is_right_minimal(f)
    assert not is_right_approximation_in(ProjChainMap.zero(p2, p1), fam)
    assert not is_right_minimal(ProjChainMap.zero(p2, p1))


@pytest.mark.parametrize("seed", range(8))
def test_find_isomorphism_after_minimize(ten_vertex_job, seed):
    x = random_complex(ten_vertex_job.cat, random.Random(seed))
    m, _, _ = minimize(x)
    iso = find_isomorphism(x, m)
    assert iso is not None
    phi, psi = iso
    assert homotopic(phi.then(psi), ProjChainMap.identity(x))
    assert homotopic(psi.then(phi), ProjChainMap.identity(m))
    assert is_isomorphism(phi)


def test_non_isomorphic_complexes(ten_vertex_job):
    a, b = ten_vertex_job.obj("111:0"), ten_vertex_job.obj("111:1")
    assert dense_hom_dim(a, a) == dense_hom_dim(b, b)
    assert find_isomorphism(a, b) is None


def test_decomposed_assemble_component_round_trip(ten_vertex_job, ten_vertex_angle):
    src, tgt = ten_vertex_angle.summands[1], ten_vertex_angle.summands[2]
    f = ten_vertex_angle.sequence.maps[1]
    comps = {(a, b): src.component(f, tgt, a, b) for a in range(len(src)) for b in range(len(tgt))}
    g = src.assemble(tgt, comps)
    assert g == f.retarget(src.total, tgt.total)
    assert src.shift(2).names[0].endswith("[2]")


def test_random_map_composites_with_cone(ten_vertex_job):
    rng = random.Random(5)
    x = random_complex(ten_vertex_job.cat, rng, length=2)
    y = ten_vertex_job.obj("111:0")
    f = random_chain_map(x, y, rng)
    inst = build_from_tower(f, 3, check=True)
    assert inst.sequence.composite_defects() == []
    assert is_null_homotopic(inst.sequence.maps[0].then(inst.sequence.maps[1]))


@pytest.mark.parametrize("row", [-4, -3, -2, 4, 5, 6])
def test_grid_rows_outside_the_window_are_invisible(ten_vertex_job, row):
    # approximations only see rows -1..3; nothing further out maps to or from the angle
    job = ten_vertex_job
    seq = job.instance().sequence
    vid = {v: i for i, v in enumerate(job.algebra.quiver.vertices)}
    for v in job.spec["objects"]["grid"]["labels"].values():
        y = job.fd.obj(ProjComplex.stalk(job.cat, [vid[v]]), -row)
        for x in seq.objects:
            assert hom_kb(x, y).dim == 0 and hom_kb(y, x).dim == 0
