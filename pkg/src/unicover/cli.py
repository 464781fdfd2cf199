"""Command-line interface.

Every command prints a report: a header with the tolerances in force and a
digest of the inputs, then a plain table. ``--structured`` appends the same
data as JSON. Reports contain no timestamps, so equal inputs give
byte-identical output; ``--timing`` writes the wall-clock time to stderr.

Exit codes: 0 success, 2 precondition failure, 3 lattice obstruction,
4 parse error. Failures print one line ``error: <reason>: <message>``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import cover, groups, predet, sampling
from .algebra import operator_norm
from .config import Tolerances, load_config
from .errors import ParseError, PreconditionError, UnicoverError
from .formats import (
    algebra_to_json,
    covering_to_json,
    element_to_json,
    dumps,
    fmt_coordinate,
    fmt_rational,
    fmt_real,
    parse_algebra,
    parse_covering,
    parse_element,
    parse_loop_class,
    parse_path,
    parse_ses,
    path_to_json,
    read_json,
)
from .paths import SampledPath, SegmentPath, from_samples


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    tolerances: Tolerances
    rows: list[tuple[str, ...]] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    def add(self, *cells: Any) -> None:
        self.rows.append(tuple(str(c) for c in cells))

    def render(self, structured: bool = False) -> str:
        lines = [f"# unicover {self.command}", f"# inputs sha256:{self.inputs_digest}"]
        tol = self.tolerances.as_dict()
        lines.append("# tolerances " + " ".join(f"{k}={tol[k]}" for k in sorted(tol)))
        if self.rows:
            widths = [max(len(r[i]) for r in self.rows if i < len(r)) for i in range(max(map(len, self.rows)))]
            for r in self.rows:
                lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        text = "\n".join(lines) + "\n"
        if structured:
            text += "--- structured ---\n" + json.dumps(self.data, indent=1, sort_keys=True) + "\n"
        return text


class _Inputs:
    """Reads input files and keeps their bytes for the report digest."""

    def __init__(self):
        self.hash = hashlib.sha256()

    def json(self, path: str) -> Any:
        try:
            obj, raw = read_json(path)
        except OSError as exc:
            raise ParseError(f"cannot read file ({exc.strerror})", "$", path) from exc
        self.hash.update(raw)
        return obj

    def text(self, s: str) -> str:
        self.hash.update(s.encode())
        return s

    @property
    def digest(self) -> str:
        return self.hash.hexdigest()[:16]


def _with_source(path: str, fn: Callable):
    try:
        return fn()
    except ParseError as exc:
        if exc.source is None:
            raise ParseError(str(exc).split(": ", 1)[-1], exc.where, path) from exc
        raise


def _load_segments(inputs: _Inputs, path: str, tol: Tolerances) -> SegmentPath:
    obj = inputs.json(path)
    p = _with_source(path, lambda: parse_path(obj, tol))
    return from_samples(p, tol) if isinstance(p, SampledPath) else p


def _load_covering(inputs: _Inputs, path: str, tol: Tolerances) -> cover.CoveringElement:
    obj = inputs.json(path)
    if isinstance(obj, dict) and ("generators" in obj or "times" in obj):
        p = _with_source(path, lambda: parse_path(obj, tol))
        return cover.lift_path(from_samples(p, tol) if isinstance(p, SampledPath) else p, tol)
    return _with_source(path, lambda: parse_covering(obj, tol)).check(tol)


def _center_rows(report: RunReport, label: str, w) -> list[str]:
    cells = [fmt_coordinate(c) for c in w.coords]
    for i, c in enumerate(cells):
        report.add(f"{label}[{i}]", c)
    return cells


# -- commands ---------------------------------------------------------------------

def cmd_predet(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    p = _load_segments(inputs, args.path, tol)
    w = predet.pre_determinant(p)
    report = RunReport("predet", inputs.digest, tol)
    report.add("quantity", "value")
    coords = _center_rows(report, "delta", w)
    scalar = fmt_real(w.scalar())
    report.add("delta_scalar", scalar)
    report.add("segments", p.segments)
    report.add("loop", "yes" if p.is_loop(tol) else "no")
    report.data = {"delta": coords, "delta_scalar": scalar, "segments": p.segments, "loop": p.is_loop(tol)}
    return report


def cmd_winding(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    p = _load_segments(inputs, args.path, tol)
    oracle = predet.winding_oracle(p, tol)
    lattice = predet.lattice_winding(p, tol)
    report = RunReport("winding", inputs.digest, tol)
    report.add("block", "n", "wind", "oracle_residual", "n*delta_residual")
    for i, n in enumerate(p.algebra.units):
        report.add(i, n, oracle.winds[i], f"{oracle.residuals[i]:.3e}", f"{lattice.residuals[i]:.3e}")
    agree = oracle.winds == lattice.winds
    report.add("agreement", "yes" if agree else "NO")
    report.data = {
        "winds": list(oracle.winds),
        "oracle_residuals": [f"{r:.3e}" for r in oracle.residuals],
        "lattice_residuals": [f"{r:.3e}" for r in lattice.residuals],
        "agreement": agree,
    }
    if not agree:
        raise UnicoverError(f"oracle {oracle.winds} and pre-determinant {lattice.winds} disagree")
    return report


def cmd_homotopy(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    p = _load_segments(inputs, args.path_a, tol)
    q = _load_segments(inputs, args.path_b, tol)
    verdict = predet.homotopy_equivalent(p, q, tol)
    report = RunReport("homotopy", inputs.digest, tol)
    report.add("path", "delta", "winds")
    data: dict = {"homotopic": verdict}
    for name, x in (("a", p), ("b", q)):
        d = [fmt_coordinate(c) for c in predet.pre_determinant(x).coords]
        winds = list(predet.winding_oracle(x, tol).winds) if x.is_loop(tol) else None
        report.add(name, " ".join(d), "-" if winds is None else " ".join(map(str, winds)))
        data[name] = {"delta": d, "winds": winds}
    report.add("homotopic", "yes" if verdict else "no")
    report.data = data
    return report


def cmd_fkdet(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    obj = inputs.json(args.element)

    def parse():
        if args.algebra:
            alg = parse_algebra(inputs.json(args.algebra))
            return parse_element(obj.get("element", obj), alg, "$")
        alg = parse_algebra(obj.get("algebra") if isinstance(obj, dict) else None, "$.algebra")
        return parse_element(obj.get("element"), alg, "$.element")

    x = _with_source(args.element, parse)
    value = predet.fuglede_kadison(x, tol)
    report = RunReport("fkdet", inputs.digest, tol)
    report.add("fuglede_kadison", fmt_real(value))
    report.data = {"fuglede_kadison": fmt_real(value)}
    return report


def _covering_report(report: RunReport, x: cover.CoveringElement) -> None:
    w = _center_rows(report, "w", x.w)
    defect = x.compatibility_defect()
    report.add("endpoint_minus_1", fmt_real(operator_norm(x.endpoint - x.algebra.identity())))
    report.add("det_defect", f"{defect:.3e}")
    report.data["w"] = w
    report.data["det_defect"] = f"{defect:.3e}"


def cmd_cover(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    op = args.op
    arity = {"lift": 1, "inverse": 1, "ev1": 1, "gamma": 1, "section": 1, "iota": 1,
             "multiply": 2, "commutator": 2}
    if len(args.files) != arity[op]:
        raise PreconditionError(f"cover {op} takes {arity[op]} input file(s)")
    report = RunReport(f"cover {op}", "", tol)
    report.add("quantity", "value")
    result = None
    if op == "iota":
        obj = inputs.json(args.files[0])
        c = _with_source(args.files[0], lambda: parse_loop_class(obj))
        result = cover.iota(c)
    else:
        xs = [_load_covering(inputs, f, tol) for f in args.files]
        if op == "lift":
            result = xs[0]
        elif op == "inverse":
            result = cover.cover_inverse(xs[0])
        elif op == "multiply":
            result = cover.cover_multiply(xs[0], xs[1])
        elif op == "commutator":
            result = cover.commutator(xs[0], xs[1])
        elif op == "section":
            result = cover.section_part(xs[0], tol)
        elif op == "ev1":
            u = cover.ev1(xs[0])
            report.add("endpoint_minus_1", fmt_real(operator_norm(u - u.algebra.identity())))
            report.data["endpoint"] = [[[fmt_real(v.real), fmt_real(v.imag)] for v in row] for b in u.blocks for row in b]
        elif op == "gamma":
            c = cover.gamma_retraction(xs[0], tol)
            for i, (m, r) in enumerate(zip(c.winds, c.residuals)):
                report.add(f"wind[{i}]", m)
                report.add(f"residual[{i}]", f"{r:.3e}")
            report.data["winds"] = list(c.winds)
            report.data["residuals"] = [f"{r:.3e}" for r in c.residuals]
    if result is not None:
        _covering_report(report, result)
        if args.out_element:
            Path(args.out_element).write_text(dumps(covering_to_json(result)), encoding="utf-8")
    report.inputs_digest = inputs.digest
    return report


def cmd_split_demo(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    target = cover.as_fraction(inputs.text(args.target))
    max_level = int(inputs.text(str(args.max_level)))
    steps = cover.dyadic_ladder(target, max_level)
    report = RunReport("split-demo", inputs.digest, tol)
    report.add("level", "size", "rank", "trace", "error", "bound")
    rows = []
    for s in steps:
        bound = Fraction(1, 2 ** (s.level + 1))
        report.add(s.level, s.size, s.rank, fmt_rational(s.trace), fmt_rational(s.error), fmt_rational(bound))
        rows.append({"level": s.level, "rank": s.rank, "error": fmt_rational(s.error)})
    report.data = {"target": fmt_rational(target), "rows": rows}
    return report


def _label(x) -> str:
    if isinstance(x, tuple):
        return "(" + " ".join(_label(v) for v in x) + ")"
    return str(x)


def cmd_left_split(args, tol: Tolerances) -> RunReport:
    inputs = _Inputs()
    obj = inputs.json(args.ses)
    ses, gamma, _ = _with_source(args.ses, lambda: parse_ses(obj))
    report = RunReport("left-split", inputs.digest, tol)
    report.add("|K|", "|S|", "|U|")
    report.add(ses.K.order, ses.S.order, ses.U.order)
    data: dict = {"orders": [ses.K.order, ses.S.order, ses.U.order]}
    if gamma is None:
        found = groups.retractions(ses)
        searched = sum(1 for _ in groups.homomorphisms(ses.S, ses.K))
        data["homomorphisms_searched"] = searched
        data["retractions_found"] = len(found)
        report.add("homomorphisms S->K", searched)
        report.add("retractions", len(found))
        if not found:
            report.add("verdict", "no retraction exists (exhaustive)")
            data["verdict"] = "no-retraction"
            report.data = data
            return report
        gamma = found[0]
    split = groups.direct_product_from_left_split(ses, gamma)
    report.add("verdict", "S is isomorphic to K x U")
    report.add("s", "gamma(s)", "beta(s)")
    table = []
    m = ses.U.order
    for s in range(ses.S.order):
        g, b = divmod(split.iso(s), m)
        report.add(_label(ses.S.labels[s]), _label(ses.K.labels[g]), _label(ses.U.labels[b]))
        table.append([s, g, b])
    data["verdict"] = "isomorphic"
    data["iso"] = table
    report.data = data
    return report


def cmd_generate(args, tol: Tolerances) -> RunReport:
    rng = np.random.default_rng(args.seed)
    alg = sampling.random_algebra(rng)
    if args.kind == "loop":
        out = path_to_json(sampling.random_loop(alg, rng))
    elif args.kind == "path":
        out = path_to_json(sampling.random_path(alg, rng))
    elif args.kind == "unitary":
        out = {"algebra": algebra_to_json(alg), "element": element_to_json(sampling.random_unitary(alg, rng))}
    else:
        p = sampling.random_path(alg, rng)
        out = covering_to_json(cover.lift_path(p, tol))
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file overriding tolerances")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--structured", action="store_true", help="append a JSON block")
    common.add_argument("--timing", action="store_true", help="print wall-clock time to stderr")

    parser = argparse.ArgumentParser(prog="unicover", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predet", parents=[common], help="pre-determinant of a path")
    p.add_argument("path", nargs="?")
    p.add_argument("--path", dest="path_opt")
    p.set_defaults(func=cmd_predet)

    p = sub.add_parser("winding", parents=[common], help="winding vector of a loop")
    p.add_argument("path", nargs="?")
    p.add_argument("--path", dest="path_opt")
    p.set_defaults(func=cmd_winding)

    p = sub.add_parser("homotopy", parents=[common], help="decide homotopy of two paths")
    p.add_argument("path_a")
    p.add_argument("path_b")
    p.set_defaults(func=cmd_homotopy)

    p = sub.add_parser("fkdet", parents=[common], help="Fuglede-Kadison determinant")
    p.add_argument("element")
    p.add_argument("--algebra", help="algebra file when the element file has none")
    p.set_defaults(func=cmd_fkdet)

    p = sub.add_parser("cover", parents=[common], help="covering group operations")
    p.add_argument("op", choices=["lift", "multiply", "inverse", "iota", "ev1", "gamma", "section", "commutator"])
    p.add_argument("files", nargs="+")
    p.add_argument("--out-element", help="write the resulting covering element as JSON")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("split-demo", parents=[common], help="dyadic projection ladder")
    p.add_argument("target", help="number or p/q in [0, 1]")
    p.add_argument("max_level", type=int)
    p.set_defaults(func=cmd_split_demo)

    p = sub.add_parser("left-split", parents=[common], help="left-split exact sequence of finite groups")
    p.add_argument("ses")
    p.set_defaults(func=cmd_left_split)

    p = sub.add_parser("generate", parents=[common], help="random test data")
    p.add_argument("kind", choices=["loop", "path", "unitary", "covering"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "path_opt", None):
        args.path = args.path_opt
    if hasattr(args, "path") and args.command in ("predet", "winding") and not args.path:
        parser.error("a path file is required")
    started = time.perf_counter()
    try:
        tol = load_config(args.config)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: parse-error: config: {exc}", file=sys.stderr)
        return ParseError.exit_code
    try:
        report = args.func(args, tol)
    except UnicoverError as exc:
        message = " ".join(str(exc).split())
        print(f"error: {exc.reason}: {message}", file=sys.stderr)
        return exc.exit_code
    if report is None:
        return 0
    report.wall_clock = time.perf_counter() - started
    text = report.render(args.structured)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.timing:
        print(f"wall-clock {report.wall_clock:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
