"""Batch command-line front end.

Every invocation prints one JSON document.  Rationals are always strings
``"p/q"`` (or ``"p"`` for integers).  Ray, axis and facet indices on the
command line and in documents are 1-based, matching ``v_1, ..., v_2n``.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import futaki as fk
from . import slope
from .bott import (
    BottMatrix,
    fan_from_matrix,
    is_kahler_class,
    is_product_of_lines,
    moment_polytope,
    pair_sums,
    presentation_twist,
)
from .errors import BottError, InvariantViolation, NotKahlerClass
from .polytope import HalfSpace, HPolytope, axis_profiles, boundary_volume, facet_measures, vertex_enumerate, volume

COMMANDS = ("fan", "polytope", "futaki", "pillar", "scan", "stability", "selftest")


class UsageError(Exception):
    pass


# --- serialization -----------------------------------------------------------------


def q(x) -> str:
    return str(Fraction(x))


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise BottError(f"rational must be a string 'p/q', got {text!r}")
    try:
        return Fraction(text.strip())
    except ValueError:
        raise BottError(f"cannot parse rational {text!r}") from None


def polytope_doc(P: HPolytope) -> dict:
    return {
        "dim": P.dim,
        "halfspaces": [{"normal": list(h.normal), "offset": q(h.offset)} for h in P.halfspaces],
    }


def parse_polytope(doc: dict) -> HPolytope:
    return HPolytope(
        int(doc["dim"]),
        tuple(HalfSpace(tuple(int(x) for x in h["normal"]), parse_rational(h["offset"])) for h in doc["halfspaces"]),
    )


def vertices_doc(P: HPolytope) -> dict:
    vp = vertex_enumerate(P)
    return {
        "dim": vp.dim,
        "vertices": [[q(x) for x in v] for v in vp.vertices],
        "tight": [sorted(j + 1 for j in t) for t in vp.tight],
    }


def parse_vertices(doc: dict) -> tuple:
    return (
        tuple(tuple(parse_rational(x) for x in v) for v in doc["vertices"]),
        tuple(frozenset(j - 1 for j in t) for t in doc["tight"]),
    )


def piecewise_doc(pp) -> dict:
    return {
        "breakpoints": [q(b) for b in pp.breakpoints],
        "pieces": [[q(c) for c in piece] for piece in pp.pieces],
    }


def matrix_doc(A: BottMatrix) -> list:
    return A.rows()


def parse_matrix(value) -> BottMatrix:
    """Full matrix (JSON list of rows), ``{"n": n, "below": [...]}``, or ``"n:e1,e2,..."``."""
    if isinstance(value, str):
        text = value.strip()
        path = Path(text)
        if not text.startswith(("[", "{")) and ":" not in text and path.exists():
            return parse_matrix(json.loads(path.read_text())["matrix"])
        if ":" in text and not text.startswith(("[", "{")):
            n_text, _, rest = text.partition(":")
            entries = [int(x) for x in rest.split(",") if x.strip()]
            return BottMatrix.from_entries(int(n_text), entries)
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            raise BottError(f"cannot parse matrix {text!r}") from None
    if isinstance(value, dict):
        return BottMatrix.from_entries(int(value["n"]), [int(x) for x in value["below"]])
    if isinstance(value, list):
        return BottMatrix.from_rows([[int(x) for x in row] for row in value])
    raise BottError(f"cannot parse matrix {value!r}")


def parse_kahler(value) -> tuple:
    if isinstance(value, str):
        value = [x for x in value.split(",") if x.strip()]
    return tuple(parse_rational(x) for x in value)


# --- commands ----------------------------------------------------------------------


def _require_kahler(A, a):
    if len(a) != 2 * A.n or not is_kahler_class(A, a):
        raise NotKahlerClass()


def cmd_fan(job) -> dict:
    A = job["matrix"]
    fan = fan_from_matrix(A)
    return {
        "command": "fan",
        "matrix": matrix_doc(A),
        "rays": [list(v) for v in fan.rays],
        "pairs": [[i + 1, j + 1] for i, j in fan.pairs],
        "pair_sums": [list(s) for s in pair_sums(fan)],
        "twist": presentation_twist(A),
        "product_of_lines": is_product_of_lines(A),
    }


def cmd_polytope(job) -> dict:
    A, a = job["matrix"], _kahler(job)
    P = moment_polytope(A, a)
    doc = {
        "command": "polytope",
        "matrix": matrix_doc(A),
        "kahler": [q(x) for x in a],
        "kahler_class": is_kahler_class(A, a),
        "polytope": polytope_doc(P),
        "vertices": vertices_doc(P),
        "volume": q(volume(P)),
    }
    if P.is_full_dimensional:
        doc["facet_measures"] = [q(x) for x in facet_measures(P)]
        doc["boundary_volume"] = q(boundary_volume(P))
        if job.get("axis") is not None:
            prof = axis_profiles(P, _axis(job, A.n))
            doc["axis_profiles"] = {"axis": job["axis"], "f": piecewise_doc(prof.f), "g": piecewise_doc(prof.g)}
    return doc


def cmd_futaki(job) -> dict:
    A, a = job["matrix"], _kahler(job)
    _require_kahler(A, a)
    P = moment_polytope(A, a)
    return {
        "command": "futaki",
        "matrix": matrix_doc(A),
        "kahler": [q(x) for x in a],
        "volume": q(volume(P)),
        "boundary_volume": q(boundary_volume(P)),
        "futaki": [q(x) for x in fk.futaki_vector(P)],
    }


def cmd_pillar(job) -> dict:
    A = job["matrix"]
    a = _kahler(job)
    base = a[: 2 * A.n - 2]
    prof = fk.pillar_profile(A, base)
    lhs, rhs, ok = fk.check_third_derivative(prof)
    return {
        "command": "pillar",
        "matrix": matrix_doc(A),
        "base": [q(x) for x in base],
        "s_max": None if prof.s_max is None else q(prof.s_max),
        "f": piecewise_doc(prof.f),
        "g": piecewise_doc(prof.g),
        "futaki": piecewise_doc(prof.futaki),
        "third_derivative": {"lhs": q(lhs), "rhs": q(rhs), "equal": ok},
        "relation_failures": fk.derivative_table(prof, 4).failures(),
    }


def cmd_scan(job) -> dict:
    A = job["matrix"]
    workers = os.cpu_count() if job.get("parallel") else None
    res = fk.scan_nonvanishing(A, job.get("budget") or 100, job.get("seed") or 0, workers=workers)
    return {
        "command": "scan",
        "matrix": matrix_doc(A),
        "budget": job.get("budget") or 100,
        "seed": job.get("seed") or 0,
        "examined": res.examined,
        "witness": None if not res else [q(x) for x in res.kahler],
        "futaki": None if not res else [q(x) for x in res.futaki],
    }


def _report_doc(r: slope.StabilityReport) -> dict:
    return {
        "ray": r.divisor + 1,
        "epsilon": q(r.epsilon),
        "mu": q(r.mu),
        "xi": q(r.xi),
        "assumption_holds": r.assumption_holds,
        "futaki_vD": q(r.futaki_vD),
        "consistent": r.consistent,
    }


def cmd_stability(job) -> dict:
    A, a = job["matrix"], _kahler(job)
    _require_kahler(A, a)
    fan = fan_from_matrix(A)
    ray = job.get("ray")
    if ray is None or not 1 <= ray <= 2 * A.n:
        raise UsageError(f"--ray must be in 1..{2 * A.n}")
    mine, other = slope.stability_pair(fan, a, ray - 1)
    return {
        "command": "stability",
        "matrix": matrix_doc(A),
        "kahler": [q(x) for x in a],
        "divisor": _report_doc(mine),
        "partner": _report_doc(other),
    }


def cmd_selftest(job) -> dict:
    from .selftest import run_all

    results = run_all()
    return {
        "command": "selftest",
        "passed": all(ok for _, ok, _ in results),
        "checks": [{"name": name, "ok": ok, "detail": detail} for name, ok, detail in results],
    }


HANDLERS = {
    "fan": cmd_fan,
    "polytope": cmd_polytope,
    "futaki": cmd_futaki,
    "pillar": cmd_pillar,
    "scan": cmd_scan,
    "stability": cmd_stability,
    "selftest": cmd_selftest,
}


def _kahler(job) -> tuple:
    if job.get("kahler") is None:
        raise UsageError("--kahler is required for this command")
    return job["kahler"]


def _axis(job, n) -> int:
    axis = job["axis"]
    if not 1 <= axis <= n:
        raise UsageError(f"--axis must be in 1..{n}")
    return axis - 1


# --- argument handling -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bott-futaki", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="JSON job document with matrix/kahler/axis/ray/budget/seed keys")
    p.add_argument("--matrix", help="path, JSON rows, or 'n:e1,e2,...' below-diagonal entries")
    p.add_argument("--kahler", help="comma-separated rationals a_1,...,a_2n")
    p.add_argument("--axis", type=int)
    p.add_argument("--ray", type=int)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--parallel", type=_bool, default=False)
    return p


def parse_job(argv) -> dict:
    args = build_parser().parse_args(argv)
    job: dict = {}
    if args.input:
        try:
            doc = json.loads(Path(args.input).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BottError(f"cannot read job document: {exc}") from None
        job.update(doc)
    for key in ("matrix", "kahler", "axis", "ray", "budget", "seed"):
        val = getattr(args, key)
        if val is not None:
            job[key] = val
    job["command"] = args.command
    job["parallel"] = args.parallel
    if args.command != "selftest":
        if job.get("matrix") is None:
            raise UsageError("--matrix is required")
        job["matrix"] = parse_matrix(job["matrix"])
    if job.get("kahler") is not None:
        job["kahler"] = parse_kahler(job["kahler"])
    if job.get("budget") is not None and int(job["budget"]) < 1:
        raise UsageError("--budget must be positive")
    return job


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        job = parse_job(argv)
        doc = HANDLERS[job["command"]](job)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 1
    except InvariantViolation as exc:
        err.write(f"internal invariant violation: {exc}\n")
        return 3
    except ValueError as exc:  # BottError and malformed numeric input
        err.write(f"invalid input: {exc}\n")
        return 2
    out.write(dumps(doc))
    if job["command"] == "selftest" and not doc["passed"]:
        return 3
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
