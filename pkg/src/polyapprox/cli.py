"""Command-line front end: ``polyapprox {approx,hausdorff,example,verify}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .convexprog import ProblemInstance
from .errors import NotNested, PolyApproxError
from .geometry import Polyhedron
from .instances import EXAMPLE_NAMES, WorstCaseExample, worst_case_example
from .metrics import DistanceReport, hausdorff_nested, hausdorff_upper_sets
from .projection import approximate_body, polyhedral_image, upper_image_reference

log = logging.getLogger("polyapprox")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER, EXIT_NOT_NESTED = 0, 1, 2, 3, 4
SIG_DIGITS = 12


class InputError(Exception):
    """Unreadable or malformed input file."""


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return obj
        if abs(obj) < 1e-13:
            return 0.0
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, np.generic):
        return _round(obj.item())
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2)


def _fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_instance(path: str) -> ProblemInstance:
    obj = _read_json(path)
    if "instance" in obj:
        obj = obj["instance"]
    try:
        return ProblemInstance.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid instance in {path}: {exc}") from exc


def load_polyhedron(path: str) -> Polyhedron:
    obj = _read_json(path)
    try:
        return Polyhedron.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid polyhedron in {path}: {exc}") from exc


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
        return
    with open(path, "w") as fh:
        fh.write(text + "\n")


def nested_distance(inner: Polyhedron, outer: Polyhedron) -> DistanceReport:
    """Bounded pairs use the polytope routine, upper sets the truncated one."""
    if len(inner.rays) or len(outer.rays):
        return hausdorff_upper_sets(inner, outer)
    return hausdorff_nested(inner.vrep, outer.vrep)


# ---------------------------------------------------------------------------
# subcommands


def cmd_approx(args) -> int:
    inst = load_instance(args.input)
    res = approximate_body(inst, args.eps, args.algorithm, selection=args.selection)
    out = res.to_json(with_trace=args.trace)
    if inst.polyhedral:
        try:
            if inst.mode == "cpp":
                ref, got = polyhedral_image(inst), res.y_level
            else:
                ref, got = upper_image_reference(inst), res.p_level
            pair = (ref, got) if res.kind == "outer" else (got, ref)
            out["measured_dh"] = nested_distance(*pair).d_h
        except PolyApproxError as exc:
            log.info("no exact reference: %s", exc)
    _write(dumps(out), args.output)
    print(f"certified_bound {_fmt(res.certified_bound)}", file=sys.stderr)
    if "measured_dh" in out:
        print(f"measured_dh {_fmt(out['measured_dh'])}", file=sys.stderr)
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    inner = load_polyhedron(args.inner).with_vrep()
    outer = load_polyhedron(args.outer).with_vrep()
    rep = nested_distance(inner, outer)
    _write(dumps(rep.to_json()), args.output)
    return EXIT_OK


def cmd_example(args) -> int:
    ex = worst_case_example(args.name, args.q, args.eps)
    payload = {"instance": ex.instance.to_json(), "expectations": ex.expectations_json()}
    _write(dumps(payload), args.output)
    return EXIT_OK


@dataclass
class CheckRow:
    name: str
    q: int
    cuts: int
    expected_cuts: int | None
    d_h: float
    expected_dh: float
    certified_bound: float
    vertices_ok: bool
    passed: bool


def _same_point_sets(a: np.ndarray, b: np.ndarray, tol: float = 1e-6) -> bool:
    if a.shape[1] != b.shape[1]:
        return False
    near = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) <= tol
    return bool(near.any(axis=1).all() and near.any(axis=0).all())


def check_example(ex: WorstCaseExample, selection: str = "lexmin") -> CheckRow:
    res = approximate_body(ex.instance, ex.eps, ex.algorithm, selection=selection)
    if ex.level == "y":
        ref, got = polyhedral_image(ex.instance), res.y_level
    else:
        ref, got = upper_image_reference(ex.instance), res.p_level
    pair = (ref, got) if res.kind == "outer" else (got, ref)
    d = nested_distance(*pair).d_h
    verts_ok = _same_point_sets(got.vertices, ex.expected_vertices)
    cuts_ok = ex.expected_cuts is None or res.cuts == ex.expected_cuts
    tight = abs(d - ex.expected_dh) <= ex.dh_tol and abs(res.certified_bound - ex.expected_dh) <= ex.dh_tol
    return CheckRow(
        ex.name, ex.q, res.cuts, ex.expected_cuts, d, ex.expected_dh, res.certified_bound,
        verts_ok, bool(verts_ok and cuts_ok and tight),
    )


def run_verification(qs=(2, 3), selection: str = "lexmin") -> list[CheckRow]:
    rows = []
    for q in qs:
        for name in EXAMPLE_NAMES:
            if name == "primal-cpp" and q < 2:
                continue
            try:
                rows.append(check_example(worst_case_example(name, q), selection))
            except PolyApproxError as exc:
                log.error("%s q=%d failed: %s", name, q, exc)
                rows.append(CheckRow(name, q, -1, None, math.nan, math.nan, math.nan, False, False))
    return rows


def cmd_verify(args) -> int:
    qs = (args.q,) if args.q is not None else (2, 3)
    rows = run_verification(qs, args.selection)
    header = f"{'example':<12} {'q':>2} {'cuts':>4} {'d_H':>16} {'expected':>16} {'bound':>16} {'vertices':>8}  result"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.name:<12} {r.q:>2} {r.cuts:>4} {_fmt(r.d_h):>16} {_fmt(r.expected_dh):>16} "
            f"{_fmt(r.certified_bound):>16} {('ok' if r.vertices_ok else 'BAD'):>8}  "
            f"{'PASS' if r.passed else 'FAIL'}"
        )
    _write("\n".join(lines), args.output)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyapprox", description="Polyhedral approximation of convex projections.")
    p.add_argument("--log", help="append log records to this file")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("approx", help="run the primal or dual approximation loop")
    a.add_argument("--algorithm", choices=("primal", "dual"), required=True)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--input", required=True)
    a.add_argument("--output")
    a.add_argument("--selection", choices=("fifo", "lexmin"), default="fifo")
    a.add_argument("--trace", action="store_true", help="include the iteration trace")
    a.set_defaults(func=cmd_approx)

    h = sub.add_parser("hausdorff", help="distance between nested polyhedra")
    h.add_argument("inner")
    h.add_argument("outer")
    h.add_argument("--output")
    h.set_defaults(func=cmd_hausdorff)

    e = sub.add_parser("example", help="write a worst-case instance and its expectations")
    e.add_argument("--name", choices=EXAMPLE_NAMES, required=True)
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--eps", type=float)
    e.add_argument("--output")
    e.set_defaults(func=cmd_example)

    v = sub.add_parser("verify", help="rerun the worst-case examples and compare")
    v.add_argument("--q", type=int)
    v.add_argument("--selection", choices=("fifo", "lexmin"), default="lexmin")
    v.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; runs are deterministic")
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)
    return p


def _setup_logging(path: str | None) -> None:
    level_name = os.environ.get("BENSON_LOG_LEVEL", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    level = levels.get(level_name, logging.ERROR)
    handler = logging.FileHandler(path) if path else logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("polyapprox")
    root.handlers[:] = [handler]
    root.setLevel(level)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is not None and not args.eps > 0:
        parser.error("--eps must be positive")
    _setup_logging(args.log)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotNested as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_NESTED
    except PolyApproxError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
