import copy
import json
from fractions import Fraction
from pathlib import Path

import pytest

from angleforge.homotopy import ProjCategory, ProjComplex
from angleforge.jobs import fixture_path, load_job
from angleforge.quiveralg import Quiver, RelationSet, build_algebra

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def linear_quiver(n: int) -> Quiver:
    verts = [str(i) for i in range(1, n + 1)]
    arrows = [(f"a{i}{i + 1}", str(i), str(i + 1)) for i in range(1, n)]
    return Quiver(verts, arrows)


def a_n(n: int, zero_relations=(), field=None):
    """Linear ``A_n`` with optional zero relations given as lists of arrow labels."""
    rels = [[(Fraction(1), list(r))] for r in zero_relations]
    return build_algebra(linear_quiver(n), RelationSet(rels), field=field, name=f"A{n}")


def stalk(cat, *objs, degree=0):
    return ProjComplex.stalk(cat, list(objs), degree)


def job_dict(name: str) -> dict:
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def a2():
    return a_n(2)


@pytest.fixture(scope="session")
def a2_cat(a2):
    return ProjCategory(a2)


@pytest.fixture(scope="session")
def a3rad():
    """``1 -> 2 -> 3`` with the length-two path set to zero."""
    return a_n(3, [("a12", "a23")])


@pytest.fixture(scope="session")
def a3rad_cat(a3rad):
    return ProjCategory(a3rad)


@pytest.fixture(scope="session")
def ten_vertex_dict():
    return job_dict("ten_vertex")


@pytest.fixture(scope="session")
def ten_vertex_job():
    return load_job("ten_vertex")


@pytest.fixture(scope="session")
def ten_vertex_inst(ten_vertex_job):
    return ten_vertex_job.instance()


@pytest.fixture(scope="session")
def ten_vertex_setup(ten_vertex_job, ten_vertex_inst):
    from angleforge.yoneda import theorem_setup

    return theorem_setup(ten_vertex_inst, ten_vertex_job.phi, ten_vertex_job.fd)


@pytest.fixture(scope="session")
def ten_vertex_T(ten_vertex_setup):
    from angleforge.tilting import build_T

    return build_T(ten_vertex_setup)


@pytest.fixture(scope="session")
def ten_vertex_report(ten_vertex_job, ten_vertex_inst):
    from angleforge.tilting import verify_theorem_instance

    return verify_theorem_instance(ten_vertex_inst, ten_vertex_job.phi, ten_vertex_job.fd, meta={"job": "ten_vertex"})


@pytest.fixture
def fresh_ten_vertex_dict(ten_vertex_dict):
    return copy.deepcopy(ten_vertex_dict)
