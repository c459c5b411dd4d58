"""``angle-forge``: command-line access to the library.

Exit codes: 0 when every requested check passes, 1 for a mathematical
failure (a hypothesis fails, ``phi`` is not admissible, no verdict), 2 for
unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import metadata
from pathlib import Path

from . import __version__
from .exactlin import CharacteristicTooSmall
from .jobs import JobError, list_fixtures, load_job
from .nangle import ar_checks, check_exactness, own_probes
from .yoneda import (
    HypothesisFailed,
    NonAdmissiblePhi,
    ZeroMissing,
    admissibility_counterexample,
    check_hypotheses,
    ideal_I,
    ideal_J,
    quotient_algebra,
    theorem_setup,
)

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 1, 2


def _versions() -> dict:
    try:
        flint_version = metadata.version("python-flint")
    except metadata.PackageNotFoundError:
        flint_version = "unknown"
    return {"angleforge": __version__, "python-flint": flint_version}


def _emit(payload: dict, args, stem: str, text: str | None = None):
    """Print ``payload`` and optionally write it under ``--out``."""
    as_json = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if text is None:
        text = _to_text(payload)
    out = as_json if args.format == "json" else text
    sys.stdout.write(out)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{stem}.json").write_text(as_json, encoding="utf-8")
        (d / f"{stem}.txt").write_text(text, encoding="utf-8")


def _to_text(payload, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for k in sorted(payload):
        v = payload[k]
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_to_text(v, indent + 1).rstrip("\n"))
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(lines) + "\n"


def _load(args, check_phi: bool = True):
    return load_job(args.job, field=args.field, bound=args.bound, check_phi=check_phi)


# ---------------------------------------------------------------------------
# sub-commands


def cmd_paths(args) -> int:
    job = _load(args, check_phi=False)
    alg = job.algebra
    q = alg.quiver
    rows = []
    for k, (s, t, p) in enumerate(alg.paths):
        rows.append({"index": k, "path": alg.tags[k], "from": q.vertices[s], "to": q.vertices[t], "length": len(p)})
    text = "".join(f"{r['index']:4d}  {r['path']}  ({r['from']} -> {r['to']})\n" for r in rows)
    _emit({"algebra": alg.name, "dim": alg.dim, "paths": rows}, args, "paths", text)
    return EXIT_OK


def cmd_algebra(args) -> int:
    job = _load(args, check_phi=False)
    alg = job.algebra
    d = alg.describe()
    d["associative"] = alg.check_associativity()
    d["idempotents_ok"] = alg.check_idempotents()
    _emit(d, args, "algebra")
    return EXIT_OK if d["associative"] and d["idempotents_ok"] else EXIT_MATH


def cmd_nangle(args) -> int:
    job = _load(args, check_phi=False)
    inst = job.instance(check=False)
    seq = inst.sequence
    rep = check_exactness(seq, own_probes(seq))
    payload = {"n": seq.n, "objects": seq.names(), "exact": rep.exact,
               "composites_null_homotopic": not seq.composite_defects()}
    ok = rep.exact and payload["composites_null_homotopic"]
    if args.action == "build":
        payload["tower_steps"] = len(inst.tower.steps) if inst.tower else 0
        if inst.tower is not None:
            payload["tower_verified"] = inst.tower.verify()
            ok = ok and payload["tower_verified"]
        if job.family is not None and inst.tower is not None:
            ar = ar_checks(inst, job.family)
            payload["auslander_reiten"] = {"passed": ar["passed"]}
    else:
        payload["exactness"] = rep.to_dict()
    _emit(payload, args, f"nangle_{args.action}")
    return EXIT_OK if ok else EXIT_MATH


def cmd_yoneda(args) -> int:
    job = _load(args)
    inst = job.instance()
    setup = theorem_setup(inst, job.phi, job.fd)
    hyp = check_hypotheses(setup)
    payload = {"phi": list(job.phi), "functor": job.fd.name, "hypotheses": hyp.to_dict()}
    if hyp.failed():
        payload["error"] = f"hypothesis failed: {', '.join(hyp.failed())}"
        _emit(payload, args, "yoneda")
        return EXIT_MATH
    i = ideal_I(setup)
    j = ideal_J(setup)
    lb = quotient_algebra(setup.lam, i)
    gb = quotient_algebra(setup.gam, j)
    payload["dimensions"] = {"E(V)": setup.lam.dim, "I": i.dim, "Lambda_bar": lb.dim,
                             "E(W)": setup.gam.dim, "J": j.dim, "Gamma_bar": gb.dim}
    payload["V"] = setup.v.names
    payload["W"] = setup.w.names
    _emit(payload, args, "yoneda")
    return EXIT_OK


def run_job(source, field=None, bound=None) -> tuple[int, dict, str]:
    """Full pipeline on one job; returns ``(exit code, report dict, report text)``."""
    from .tilting import verify_theorem_instance

    meta_base = {"versions": _versions()}
    try:
        job = load_job(source, field=field, bound=bound)
    except NonAdmissiblePhi as exc:
        rep = {"meta": meta_base, "verdict": "non-admissible phi", "errors": [str(exc)]}
        return EXIT_MATH, rep, _to_text(rep)
    meta = dict(meta_base, job=job.name, bound=job.fd.bound)
    try:
        inst = job.instance()
        report = verify_theorem_instance(inst, job.phi, job.fd, meta=meta)
    except HypothesisFailed as exc:
        rep = {"meta": dict(meta, n=job.n, phi=list(job.phi), functor=job.fd.name, field=job.field.name),
               "verdict": "hypothesis failed", "failed_clause": exc.clause, "errors": [str(exc)]}
        return EXIT_MATH, rep, _to_text(rep)
    code = EXIT_OK if report.verdict == "equivalent" else EXIT_MATH
    return code, report.to_dict(), report.to_text()


def cmd_run(args) -> int:
    code, payload, text = run_job(args.job, args.field, args.bound)
    _emit(payload, args, "report", text)
    return code


def cmd_phi(args) -> int:
    try:
        phi = [int(x) for x in args.check.split(",") if x.strip()]
    except ValueError:
        sys.stderr.write(f"angle-forge: cannot parse {args.check!r} as a list of integers\n")
        return EXIT_INPUT
    try:
        bad = admissibility_counterexample(phi)
    except ZeroMissing as exc:
        payload = {"phi": sorted(set(phi)), "admissible": False, "reason": str(exc)}
        _emit(payload, args, "phi", f"not admissible: {exc}\n")
        return EXIT_MATH
    payload = {"phi": sorted(set(phi)), "admissible": bad is None}
    if bad is None:
        text = "admissible\n"
    else:
        payload["counterexample"] = list(bad)
        text = f"not admissible: triple {bad}\n"
    _emit(payload, args, "phi", text)
    return EXIT_OK if bad is None else EXIT_MATH


def _builtin_checks() -> dict:
    from .homotopy import ProjCategory, ProjComplex, hom_kb
    from .nangle import trivial_sequence
    from .quiveralg import Quiver, RelationSet, build_algebra
    from .yoneda import is_admissible

    results = {}
    results["phi {0} admissible"] = is_admissible([0])
    results["phi {0,1,2,4} not admissible"] = not is_admissible([0, 1, 2, 4])
    alg = build_algebra(Quiver(["1", "2"], [("a", "1", "2")]), RelationSet([]))
    results["A2 has dimension 3"] = alg.dim == 3
    cat = ProjCategory(alg)
    p = ProjComplex.stalk(cat, [0])
    results["End(P1) is one-dimensional"] = hom_kb(p, p).dim == 1
    seq = trivial_sequence(p, 3)
    results["trivial triangle is exact"] = check_exactness(seq, own_probes(seq)).exact
    code, rep, _ = run_job("a2_triangle")
    results["A2 triangle job is equivalent"] = code == EXIT_OK
    return results


def cmd_selftest(args) -> int:
    results = _builtin_checks()
    ok = all(results.values())
    payload = {"builtin": results, "fixtures": list_fixtures()}
    tests = Path(__file__).resolve().parents[2] / "tests"
    if not args.quick and tests.is_dir():
        try:
            import pytest
        except ImportError:
            payload["suite"] = "pytest not installed"
        else:
            rc = pytest.main(["-q", "-p", "no:cacheprovider", str(tests)] + (["-m", "not slow"] if args.fast else []))
            payload["suite"] = "passed" if rc == 0 else f"failed (pytest exit {int(rc)})"
            ok = ok and rc == 0
    elif not args.quick:
        payload["suite"] = "test directory not found; built-in checks only"
    _emit(payload, args, "selftest")
    return EXIT_OK if ok else EXIT_MATH


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--field", default=None, help="q or fp:<prime> (overrides the job)")
    p.add_argument("--bound", type=int, default=None, help="length bound for projective resolutions")
    p.add_argument("--out", default=None, help="directory for report files")
    p.add_argument("--format", choices=("json", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="angle-forge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"angle-forge {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paths", help="list the path basis of the job's algebra")
    p.add_argument("job", help="job file or bundled fixture name")
    _common(p)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("algebra", help="build the algebra and dump its structure")
    p.add_argument("job")
    _common(p)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("nangle", help="build or check the job's n-angle")
    p.add_argument("action", choices=("build", "check"))
    p.add_argument("job")
    _common(p)
    p.set_defaults(func=cmd_nangle)

    p = sub.add_parser("yoneda", help="E-algebras, ideals and quotients")
    p.add_argument("job")
    _common(p)
    p.set_defaults(func=cmd_yoneda)

    p = sub.add_parser("run", help="full derived-equivalence check")
    p.add_argument("job")
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("phi", help="admissibility of a finite set")
    p.add_argument("--check", required=True, help="comma separated integers, e.g. 0,1,2,4")
    _common(p)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("selftest", help="built-in checks plus the test suite when available")
    p.add_argument("--quick", action="store_true", help="built-in checks only")
    p.add_argument("--fast", action="store_true", help="skip tests marked slow")
    _common(p)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except JobError as exc:
        sys.stderr.write(f"angle-forge: {exc}\n")
        return EXIT_INPUT
    except NonAdmissiblePhi as exc:
        sys.stderr.write(f"angle-forge: {exc}\n")
        return EXIT_MATH
    except HypothesisFailed as exc:
        sys.stderr.write(f"angle-forge: hypothesis failed: {exc}\n")
        return EXIT_MATH
    except ZeroMissing as exc:
        sys.stderr.write(f"angle-forge: {exc}\n")
        return EXIT_INPUT
    except CharacteristicTooSmall as exc:
        sys.stderr.write(f"angle-forge: {exc}; choose a larger prime\n")
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write(f"angle-forge: invalid input: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
