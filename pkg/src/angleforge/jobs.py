"""Job files: JSON descriptions of an algebra, a functor, named objects and an angle seed.

A job is validated against ``data/job.schema.json`` and then resolved into
live objects by :func:`load_job`.  Grid objects are named ``"<label>:<i>"``
and stand for ``F^{-i}(P_v)`` where ``v = labels[label]``; this is the naming
used for the orbits of a cluster tilting subcategory under ``F``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .exactlin import Field
from .homotopy import BlockMap, FunctorData, ProjCategory, ProjChainMap, ProjComplex, hom_kb
from .nangle import (
    Decomposed,
    Family,
    NAngleInstance,
    build_from_tower,
    instance_from_sequence,
    minimal_left_approximation,
    trivial_sequence,
)
from .quiveralg import PathAlgebra, Quiver, RelationSet, build_algebra
from .yoneda import PhiSet, as_phi


class JobError(ValueError):
    """The job file is malformed or refers to unknown names."""


def schema() -> dict:
    return json.loads(resources.files("angleforge").joinpath("data/job.schema.json").read_text(encoding="utf-8"))


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture such as ``"ten_vertex"`` or ``"a2_triangle"``."""
    p = resources.files("angleforge").joinpath(f"data/fixtures/{name}.json")
    if not p.is_file():
        raise JobError(f"no bundled fixture {name!r}")
    return Path(str(p))


def list_fixtures() -> list[str]:
    d = resources.files("angleforge").joinpath("data/fixtures")
    return sorted(p.name[:-5] for p in d.iterdir() if p.name.endswith(".json"))


def read_job(source) -> dict:
    """Load and validate a job from a path, a bundled fixture name or a dict."""
    if isinstance(source, dict):
        raw = source
    else:
        path = Path(source)
        if not path.exists() and not str(source).endswith(".json"):
            path = fixture_path(str(source))
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise JobError(f"cannot read {source}") from None
        except json.JSONDecodeError as exc:
            raise JobError(f"{source}: invalid JSON ({exc})") from None
    try:
        jsonschema.validate(raw, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise JobError(f"schema error at {where}: {exc.message}") from None
    return raw


@dataclass
class Job:
    """A resolved job.

    Attributes:
        algebra: the bound quiver algebra.
        cat: its category of projectives.
        fd: the functor ``F``.
        phi: the admissible set.
        objects: ``{name: complex}``, in declaration order.
        family: the approximation family, or ``None``.
    """

    spec: dict
    field: Field
    algebra: PathAlgebra
    cat: ProjCategory
    fd: FunctorData
    phi: PhiSet | list
    n: int
    objects: dict
    family: Family | None
    name: str = ""
    _instance: NAngleInstance | None = field(default=None, repr=False)

    @property
    def checks(self) -> list:
        return self.spec.get("checks", ["hypotheses", "ideals", "tilting", "theta"])

    def obj(self, name: str) -> ProjComplex:
        try:
            return self.objects[name]
        except KeyError:
            raise JobError(f"unknown object {name!r}") from None

    def instance(self, check: bool = True) -> NAngleInstance:
        if self._instance is None:
            self._instance = build_instance(self, check=check)
        return self._instance


def _fraction(c):
    return Fraction(str(c))


def build_job_algebra(spec: dict, field: Field) -> PathAlgebra:
    alg = spec["algebra"]
    verts = alg["vertices"]
    if len(set(verts)) != len(verts):
        raise JobError("duplicate vertex names")
    arrows = [(a["label"], a["from"], a["to"]) for a in alg["arrows"]]
    rels = [[(_fraction(t["coeff"]), t["path"]) for t in rel] for rel in alg.get("relations", [])]
    try:
        return build_algebra(Quiver(verts, arrows), RelationSet(rels), field=field, name=spec.get("name", "A"))
    except (ValueError, KeyError) as exc:
        raise JobError(f"algebra: {exc}") from None


def _element(alg: PathAlgebra, s: int, t: int, terms: list) -> dict:
    """Sparse element of ``e_s A e_t`` from ``[{coeff, path}]`` (paths run from ``t`` to ``s``)."""
    q = alg.quiver
    out: dict = {}
    for term in terms:
        labels = term["path"]
        idx = []
        for lab in labels:
            if lab not in q.aindex:
                raise JobError(f"unknown arrow {lab!r}")
            idx.append(q.aindex[lab])
        if idx:
            src, tgt = q.arrows[idx[0]][1], q.arrows[idx[-1]][2]
            for a, b in zip(idx, idx[1:]):
                if q.arrows[a][2] != q.arrows[b][1]:
                    raise JobError(f"path {'.'.join(labels)} is not composable")
        else:
            src = tgt = t
        if (tgt, src) != (s, t):
            raise JobError(f"path {'.'.join(labels) or 'e'} does not lie in e_{q.vertices[s]} A e_{q.vertices[t]}")
        c = alg.field(_fraction(term["coeff"]))
        for k, v in alg.reduce_path(src, tuple(idx)).items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def _explicit_complex(spec: dict, alg: PathAlgebra, cat: ProjCategory, name: str) -> ProjComplex:
    vidx = {v: i for i, v in enumerate(alg.quiver.vertices)}
    terms = {}
    for deg, verts in spec["terms"].items():
        try:
            terms[int(deg)] = tuple(vidx[v] for v in verts)
        except KeyError as exc:
            raise JobError(f"object {name}: unknown vertex {exc}") from None
    diffs = {}
    for deg, entries in spec.get("diffs", {}).items():
        i = int(deg)
        src, tgt = terms.get(i, ()), terms.get(i + 1, ())
        blocks = {}
        for e in entries:
            a, b = e["from"], e["to"]
            if a >= len(src) or b >= len(tgt):
                raise JobError(f"object {name}: differential entry out of range in degree {i}")
            vec = _element(alg, src[a], tgt[b], e["terms"])
            blocks[(a, b)] = cat.element(src[a], tgt[b], vec)
        diffs[i] = BlockMap(cat, src, tgt, blocks)
    try:
        x = ProjComplex(cat, terms, diffs, name=name)
    except ValueError as exc:
        raise JobError(f"object {name}: {exc}") from None
    return x.shift(spec.get("shift", 0))


def build_objects(spec: dict, alg: PathAlgebra, cat: ProjCategory, fd: FunctorData) -> tuple[dict, list]:
    """``({name: complex}, grid names)``."""
    objs: dict = {}
    grid_names: list = []
    vidx = {v: i for i, v in enumerate(alg.quiver.vertices)}
    o = spec["objects"]
    if "grid" in o:
        g = o["grid"]
        lo, hi = g["rows"]
        for i in range(lo, hi + 1):
            for label, v in g["labels"].items():
                if v not in vidx:
                    raise JobError(f"grid label {label}: unknown vertex {v!r}")
                nm = f"{label}:{i}"
                objs[nm] = fd.obj(ProjComplex.stalk(cat, [vidx[v]]), -i)
                grid_names.append(nm)
    for nm, d in o.get("named", {}).items():
        if nm in objs:
            raise JobError(f"object {nm!r} defined twice")
        if "projective" in d:
            v = d["projective"]
            if v not in vidx:
                raise JobError(f"object {nm}: unknown vertex {v!r}")
            x = ProjComplex.stalk(cat, [vidx[v]])
            x = fd.obj(x, d.get("power", 0)).shift(d.get("shift", 0))
        else:
            x = _explicit_complex(d, alg, cat, nm)
        objs[nm] = x
    return objs, grid_names


def make_functor(spec: dict, cat: ProjCategory, bound: int) -> FunctorData:
    f = spec["functor"]
    kind = f["kind"]
    if kind == "identity":
        return FunctorData(cat, "identity")
    if "amount" not in f:
        raise JobError(f"functor {kind} needs an amount")
    return FunctorData(cat, kind, f["amount"], bound)


def load_job(source, field: str | None = None, bound: int | None = None, check_phi: bool = True) -> Job:
    """Validate and resolve a job.

    Args:
        source: path, bundled fixture name or dict.
        field: overrides the job's ``field``.
        bound: overrides the resolution length bound.
        check_phi: reject non-admissible ``phi`` here (raises ``NonAdmissiblePhi``).
    """
    spec = read_job(source)
    fld = Field.parse(field or spec.get("field", "q"))
    alg = build_job_algebra(spec, fld)
    cat = ProjCategory(alg)
    fd = make_functor(spec, cat, bound or spec.get("bound", 32))
    phi_raw = spec.get("phi", [0])
    phi = as_phi(phi_raw) if check_phi else list(phi_raw)
    objs, grid_names = build_objects(spec, alg, cat, fd)
    fam_spec = spec.get("family")
    family = None
    if fam_spec == "grid":
        family = Family([(nm, objs[nm]) for nm in grid_names])
    elif fam_spec is not None:
        family = Family([(nm, _lookup(objs, nm)) for nm in fam_spec])
    return Job(spec, fld, alg, cat, fd, phi, spec["n"], objs, family, spec.get("name", ""))


def _lookup(objs: dict, name: str):
    if name not in objs:
        raise JobError(f"unknown object {name!r}")
    return objs[name]


def build_instance(job: Job, check: bool = True) -> NAngleInstance:
    """The n-angle described by the job's seed."""
    seed = job.spec["seed"]
    n = job.n
    x = job.obj(seed["source"])
    src = Decomposed.single(seed["source"], x)
    last = job.spec.get("last")
    last_d = Decomposed.single(last, job.obj(last)) if last else None
    if seed["kind"] == "trivial":
        return instance_from_sequence(trivial_sequence(x, n, name=seed["source"]))
    if seed["kind"] == "source_map":
        if job.family is None:
            raise JobError("a source_map seed needs a family")
        tgt, f1 = minimal_left_approximation(x, job.family, radical=True)
    else:
        tgt = Decomposed([(nm, job.obj(nm)) for nm in seed["target"]], job.cat)
        comps = {}
        for c in seed["components"]:
            b = c["to"]
            if b >= len(tgt):
                raise JobError(f"seed component target {b} out of range")
            h = hom_kb(x, tgt.objects[b])
            if len(c["coords"]) != h.dim:
                raise JobError(f"seed component {b}: expected {h.dim} coordinates, got {len(c['coords'])}")
            comps[(0, b)] = h.element([job.field(_fraction(v)) for v in c["coords"]])
        f1 = src.assemble(tgt, comps)
    if len(tgt) == 0:
        raise JobError("the seed map has zero target")
    return build_from_tower(f1, n, job.family, source=src, target=tgt, last=last_d, check=check)
