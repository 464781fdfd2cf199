"""JSON text formats for algebras, elements, paths, covering elements and groups.

Grammar (all documents are UTF-8 JSON)::

    algebra   := {"blocks": [n1, ...], "weights": [w1, ...], "amplification"?: m}
    scalar    := number | [re, im]
    element   := {"blocks": [[[scalar, ...], ...], ...]}       # row-major per block
    real      := number | "p/q"
    path      := {"algebra": algebra, "type": "segments",
                  "start"?: element, "generators": [element, ...]}
               | {"algebra": algebra, "type": "samples",
                  "times": [real, ...], "values": [element, ...]}
    covering  := {"algebra": algebra, "endpoint": element, "w": [real, ...]}
    loopclass := {"algebra": algebra, "winds": [int, ...]}
    elemfile  := {"algebra": algebra, "element": element}
    group     := {"cyclic": n} | {"symmetric": d}
               | {"permutations": [[int, ...], ...]}
               | {"table": [[int, ...], ...], "labels"?: [...]}
    hom       := [int, ...]                      # image of every domain index
               | {"on_generators": [image, ...]} # image = index or permutation list
    ses       := {"K": group, "S": group, "U": group,
                  "alpha": hom, "beta": hom, "gamma"?: hom}

Errors carry a JSON path such as ``$.generators[1].blocks[0][2]`` or, for
malformed JSON, the line and column.
"""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Any

import numpy as np

from . import groups
from .algebra import CenterVector, Element, Hermitian, TracialAlgebra, Unitary
from .config import DEFAULT, Tolerances
from .cover import CoveringElement, LoopClass
from .errors import ParseError, UnicoverError
from .paths import SampledPath, SegmentPath


def read_json(path: str | Path) -> tuple[Any, bytes]:
    raw = Path(path).read_bytes()
    try:
        return json.loads(raw.decode("utf-8")), raw
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 ({exc.reason})", "$", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}", str(path)) from exc


def _expect(cond: bool, message: str, where: str) -> None:
    if not cond:
        raise ParseError(message, where)


def _get(obj: Any, key: str, where: str) -> Any:
    _expect(isinstance(obj, dict), "expected an object", where)
    _expect(key in obj, f"missing key {key!r}", where)
    return obj[key]


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_real(x: Any, where: str):
    if _is_number(x):
        return Fraction(x) if isinstance(x, int) else float(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError("expected a number or a 'p/q' string", where)


def parse_algebra(obj: Any, where: str = "$") -> TracialAlgebra:
    blocks = _get(obj, "blocks", where)
    weights = obj.get("weights")
    _expect(isinstance(blocks, list) and blocks, "blocks must be a non-empty list", f"{where}.blocks")
    for i, n in enumerate(blocks):
        _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 1,
                "block size must be a positive integer", f"{where}.blocks[{i}]")
    if weights is None:
        weights = [f"1/{len(blocks)}"] * len(blocks)
    _expect(isinstance(weights, list) and len(weights) == len(blocks),
            f"weights must list {len(blocks)} numbers", f"{where}.weights")
    ws = [parse_real(w, f"{where}.weights[{i}]") for i, w in enumerate(weights)]
    amp = obj.get("amplification", 1)
    _expect(isinstance(amp, int) and amp >= 1, "amplification must be a positive integer", f"{where}.amplification")
    try:
        return TracialAlgebra(tuple(blocks), tuple(float(w) for w in ws), amp)
    except UnicoverError as exc:
        raise ParseError(str(exc), where) from exc


def _scalar(x: Any, where: str) -> complex:
    if _is_number(x):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(_is_number(v) for v in x):
        return complex(x[0], x[1])
    raise ParseError("expected a number or [re, im]", where)


def parse_blocks(obj: Any, alg: TracialAlgebra, where: str = "$") -> list[np.ndarray]:
    blocks = _get(obj, "blocks", where)
    where = f"{where}.blocks"
    _expect(isinstance(blocks, list), "expected a list of blocks", where)
    _expect(len(blocks) == alg.k, f"expected {alg.k} blocks, got {len(blocks)}", where)
    out = []
    for i, (b, n) in enumerate(zip(blocks, alg.blocks)):
        bw = f"{where}[{i}]"
        _expect(isinstance(b, list) and len(b) == n, f"expected {n} rows", bw)
        m = np.empty((n, n), dtype=complex)
        for r, row in enumerate(b):
            _expect(isinstance(row, list) and len(row) == n, f"expected {n} entries", f"{bw}[{r}]")
            for c, x in enumerate(row):
                m[r, c] = _scalar(x, f"{bw}[{r}][{c}]")
        out.append(m)
    return out


def parse_element(obj: Any, alg: TracialAlgebra, where: str = "$", kind: type = Element,
                  tol: Tolerances = DEFAULT) -> Element:
    blocks = parse_blocks(obj, alg, where)
    try:
        if kind is Element:
            return Element(alg, blocks)
        return kind(alg, blocks, tol=tol)
    except UnicoverError as exc:
        raise ParseError(str(exc), where) from exc


def parse_path(obj: Any, tol: Tolerances = DEFAULT, where: str = "$") -> SegmentPath | SampledPath:
    alg = parse_algebra(_get(obj, "algebra", where), f"{where}.algebra")
    kind = obj.get("type", "segments")
    if kind == "segments":
        start = alg.identity()
        if "start" in obj:
            start = parse_element(obj["start"], alg, f"{where}.start", Unitary, tol)
        gens = _get(obj, "generators", where)
        _expect(isinstance(gens, list), "generators must be a list", f"{where}.generators")
        return SegmentPath(start, tuple(
            parse_element(g, alg, f"{where}.generators[{i}]", Hermitian, tol) for i, g in enumerate(gens)
        ))
    if kind == "samples":
        times = _get(obj, "times", where)
        values = _get(obj, "values", where)
        _expect(isinstance(times, list), "times must be a list", f"{where}.times")
        _expect(isinstance(values, list) and len(values) == len(times),
                "values must list one element per time", f"{where}.values")
        ts = [float(parse_real(t, f"{where}.times[{i}]")) for i, t in enumerate(times)]
        vals = [parse_element(v, alg, f"{where}.values[{i}]", Unitary, tol) for i, v in enumerate(values)]
        try:
            return SampledPath(tuple(ts), tuple(vals))
        except UnicoverError as exc:
            raise ParseError(str(exc), where) from exc
    raise ParseError(f"unknown path type {kind!r}", f"{where}.type")


def parse_center(obj: Any, alg: TracialAlgebra, where: str) -> CenterVector:
    _expect(isinstance(obj, list) and len(obj) == alg.k, f"expected {alg.k} coordinates", where)
    return CenterVector(alg, tuple(parse_real(c, f"{where}[{i}]") for i, c in enumerate(obj)))


def parse_covering(obj: Any, tol: Tolerances = DEFAULT, where: str = "$") -> CoveringElement:
    alg = parse_algebra(_get(obj, "algebra", where), f"{where}.algebra")
    u = parse_element(_get(obj, "endpoint", where), alg, f"{where}.endpoint", Unitary, tol)
    w = parse_center(_get(obj, "w", where), alg, f"{where}.w")
    return CoveringElement(u, w)


def parse_loop_class(obj: Any, where: str = "$") -> LoopClass:
    alg = parse_algebra(_get(obj, "algebra", where), f"{where}.algebra")
    winds = _get(obj, "winds", where)
    _expect(isinstance(winds, list) and len(winds) == alg.k, f"expected {alg.k} integers", f"{where}.winds")
    for i, m in enumerate(winds):
        _expect(isinstance(m, int) and not isinstance(m, bool), "expected an integer", f"{where}.winds[{i}]")
    return LoopClass(alg, tuple(winds))


def parse_group(obj: Any, where: str, name: str) -> groups.FiniteGroup:
    _expect(isinstance(obj, dict), "expected an object", where)
    try:
        if "cyclic" in obj:
            g = groups.cyclic_group(int(obj["cyclic"]))
        elif "symmetric" in obj:
            g = groups.symmetric_group(int(obj["symmetric"]))
        elif "permutations" in obj:
            g = groups.permutation_group(obj["permutations"])
        elif "table" in obj:
            g = groups.FiniteGroup(np.array(obj["table"]), tuple(obj.get("labels") or ()))
        else:
            raise ParseError("expected one of cyclic, symmetric, permutations, table", where)
    except (UnicoverError, ValueError, TypeError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), where) from exc
    object.__setattr__(g, "name", name)
    return g


def _image(x: Any, codomain: groups.FiniteGroup, where: str) -> int:
    if isinstance(x, int) and not isinstance(x, bool):
        _expect(0 <= x < codomain.order, "element index out of range", where)
        return x
    if isinstance(x, list):
        label = tuple(x)
        _expect(label in codomain.labels, "permutation not in the codomain", where)
        return codomain.index(label)
    raise ParseError("expected an element index or a permutation", where)


def parse_hom(obj: Any, domain: groups.FiniteGroup, codomain: groups.FiniteGroup, where: str) -> groups.GroupHom:
    try:
        if isinstance(obj, list):
            return groups.GroupHom(domain, codomain, [_image(x, codomain, f"{where}[{i}]") for i, x in enumerate(obj)])
        gens = _get(obj, "on_generators", where)
        _expect(bool(domain.declared_generators), "domain has no declared generators", where)
        _expect(isinstance(gens, list) and len(gens) == len(domain.declared_generators),
                f"expected {len(domain.declared_generators)} generator images", f"{where}.on_generators")
        images = [_image(x, codomain, f"{where}.on_generators[{i}]") for i, x in enumerate(gens)]
        f = groups.hom_from_generators(domain, codomain, images, domain.declared_generators)
        if f is None:
            raise ParseError("generator images do not extend to a homomorphism", where)
        return f
    except ParseError:
        raise
    except UnicoverError as exc:
        raise ParseError(str(exc), where) from exc


def parse_ses(obj: Any) -> tuple[groups.FiniteGroupSES, groups.GroupHom | None, dict]:
    """The exact sequence, the optional retraction and the three groups by name."""
    K = parse_group(_get(obj, "K", "$"), "$.K", "K")
    S = parse_group(_get(obj, "S", "$"), "$.S", "S")
    U = parse_group(_get(obj, "U", "$"), "$.U", "U")
    alpha = parse_hom(_get(obj, "alpha", "$"), K, S, "$.alpha")
    beta = parse_hom(_get(obj, "beta", "$"), S, U, "$.beta")
    gamma = parse_hom(obj["gamma"], S, K, "$.gamma") if "gamma" in obj else None
    return groups.FiniteGroupSES(alpha, beta), gamma, {"K": K, "S": S, "U": U}


# -- writers ---------------------------------------------------------------------

def fmt_real(x: float) -> str:
    s = f"{float(x):.12g}"
    return "0" if s in ("-0", "0") else s


def fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_coordinate(c) -> str:
    """Lattice-sized rationals as ``p/q``; anything else as a decimal."""
    if isinstance(c, Rational) and Fraction(c).denominator <= 2**20:
        return fmt_rational(c)
    return fmt_real(float(c))


def algebra_to_json(alg: TracialAlgebra) -> dict:
    out: dict = {"blocks": list(alg.blocks), "weights": list(alg.weights)}
    if alg.amplification != 1:
        out["amplification"] = alg.amplification
    return out


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x


def element_to_json(x: Element) -> dict:
    return {"blocks": [[[[_num(v.real), _num(v.imag)] for v in row] for row in b] for b in x.blocks]}


def path_to_json(p: SegmentPath | SampledPath) -> dict:
    if isinstance(p, SampledPath):
        return {"algebra": algebra_to_json(p.algebra), "type": "samples",
                "times": list(p.times), "values": [element_to_json(v) for v in p.values]}
    return {"algebra": algebra_to_json(p.algebra), "type": "segments",
            "start": element_to_json(p.start), "generators": [element_to_json(g) for g in p.generators]}


def covering_to_json(x: CoveringElement) -> dict:
    w = [fmt_rational(c) if Fraction(c).denominator <= 2**20 else float(c) for c in x.w.coords]
    return {"algebra": algebra_to_json(x.algebra), "endpoint": element_to_json(x.endpoint), "w": w}


def loop_class_to_json(c: LoopClass) -> dict:
    return {"algebra": algebra_to_json(c.algebra), "winds": list(c.winds)}


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"
