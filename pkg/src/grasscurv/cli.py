"""Command-line front end and the JSON map document format.

A map document is UTF-8 JSON::

    {"kind": "macfarlane", "n": 4, "m": 2,
     "entries": [[[["0", "0"], ["1.5", "0"]], ...], ...],
     "metadata": {...}}

Each polynomial is a list of ``[re, im]`` decimal strings, lowest degree
first.  ``frame`` entries are ``n x m``, ``macfarlane`` entries are
``(n - m) x m`` and ``pluecker`` entries are a list of
``{"index": [i, j, ...], "coeffs": poly}``.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations

from . import search
from .curvature import constant_curvature_check, curvature_scan, default_grid
from .errors import GrassCurvError
from .grassmann import (
    GrassmannFrame,
    MacfarlaneMap,
    PlueckerVector,
    display_order,
    duality_transpose,
    embed_pad,
    frame_to_macfarlane,
    gram_det,
    macfarlane_gram_det,
)
from .polyhermite import HoloPoly
from .veronese import VeroneseSpec, veronese_frame, veronese_macfarlane

KINDS = ("frame", "macfarlane", "pluecker")
SIG_DIGITS = 12


class InputError(ValueError):
    """Malformed or inconsistent input document."""


def default_seed() -> int:
    raw = os.environ.get("GRASSCURV_SEED", "")
    try:
        return int(raw) if raw else search.DEFAULT_SEED
    except ValueError:
        raise InputError(f"GRASSCURV_SEED must be an integer, got {raw!r}") from None


def _num(s) -> tuple[str, float]:
    if isinstance(s, bool) or not isinstance(s, (str, int, float)):
        raise InputError(f"coefficient {s!r} is not a decimal string")
    text = s if isinstance(s, str) else repr(s)
    try:
        v = float(text)
    except ValueError:
        raise InputError(f"coefficient {text!r} is not a decimal number") from None
    if not math.isfinite(v):
        raise InputError(f"coefficient {text!r} is not finite")
    return text, v


def _parse_poly(raw) -> list[list[str]]:
    if not isinstance(raw, list):
        raise InputError(f"polynomial must be a list of [re, im] pairs, got {raw!r}")
    out = []
    for pair in raw:
        if isinstance(pair, list) and len(pair) == 2:
            out.append([_num(pair[0])[0], _num(pair[1])[0]])
        elif not isinstance(pair, list):
            out.append([_num(pair)[0], "0"])
        else:
            raise InputError(f"coefficient pair must have two entries, got {pair!r}")
    return out


def _to_holo(poly: list[list[str]]) -> HoloPoly:
    if not poly:
        return HoloPoly.zero()
    return HoloPoly([complex(float(re), float(im)) for re, im in poly])


def _from_holo(p: HoloPoly) -> list[list[str]]:
    return [[repr(float(c.real)), repr(float(c.imag))] for c in p.coeffs]


@dataclass
class MapDocument:
    kind: str
    n: int
    m: int
    entries: list
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "MapDocument":
        if not isinstance(obj, dict):
            raise InputError("document must be a JSON object")
        kind = obj.get("kind")
        if kind not in KINDS:
            raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
        n, m = obj.get("n"), obj.get("m")
        if not isinstance(n, int) or not isinstance(m, int) or not 1 <= m < n:
            raise InputError(f"need integers 1 <= m < n, got n={n!r}, m={m!r}")
        raw = obj.get("entries")
        if not isinstance(raw, list):
            raise InputError("entries must be a list")
        if kind == "pluecker":
            entries = []
            valid = set(combinations(range(1, n + 1), m))
            seen = set()
            for e in raw:
                if not isinstance(e, dict) or "index" not in e or "coeffs" not in e:
                    raise InputError("pluecker entries need 'index' and 'coeffs'")
                idx = tuple(e["index"]) if isinstance(e["index"], list) else None
                if idx not in valid or idx in seen:
                    raise InputError(f"bad or repeated Pluecker index {e['index']!r}")
                seen.add(idx)
                entries.append({"index": list(idx), "coeffs": _parse_poly(e["coeffs"])})
        else:
            rows = n if kind == "frame" else n - m
            if len(raw) != rows or any(not isinstance(row, list) or len(row) != m for row in raw):
                raise InputError(f"{kind} entries must be {rows} x {m}")
            entries = [[_parse_poly(p) for p in row] for row in raw]
        meta = obj.get("metadata", {})
        if not isinstance(meta, dict):
            raise InputError("metadata must be an object")
        return cls(kind, n, m, entries, meta)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "m": self.m, "entries": self.entries, "metadata": self.metadata}

    def to_object(self):
        if self.kind == "frame":
            return GrassmannFrame([[_to_holo(p) for p in row] for row in self.entries])
        if self.kind == "macfarlane":
            return MacfarlaneMap([[_to_holo(p) for p in row] for row in self.entries], self.n, self.m)
        return PlueckerVector(self.n, self.m, {tuple(e["index"]): _to_holo(e["coeffs"]) for e in self.entries})

    @classmethod
    def from_object(cls, obj, metadata: dict | None = None) -> "MapDocument":
        meta = dict(metadata or {})
        if isinstance(obj, GrassmannFrame):
            return cls("frame", obj.n, obj.m, [[_from_holo(p) for p in row] for row in obj.entries], meta)
        if isinstance(obj, MacfarlaneMap):
            return cls("macfarlane", obj.n, obj.m, [[_from_holo(p) for p in row] for row in obj.K], meta)
        if isinstance(obj, PlueckerVector):
            order = display_order(obj.n) if obj.m == 2 else obj.indices
            return cls("pluecker", obj.n, obj.m,
                       [{"index": list(i), "coeffs": _from_holo(obj[i])} for i in order], meta)
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def gram_det_of(obj):
    if isinstance(obj, GrassmannFrame):
        return gram_det(obj)
    if isinstance(obj, MacfarlaneMap):
        return macfarlane_gram_det(obj)
    return obj.gram_det()


def _stable(v):
    """Round floats to 12 significant digits; non-finite floats become null."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        return float(f"{v:.{SIG_DIGITS}g}") if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_stable(v.real), _stable(v.imag)]
    if isinstance(v, dict):
        return {str(k): _stable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_stable(x) for x in v]
    if hasattr(v, "item"):
        return _stable(v.item())
    return v


def dumps(obj) -> str:
    return json.dumps(_stable(obj), sort_keys=True, indent=2)


def _emit(obj, out) -> None:
    out.write(dumps(obj) + "\n")


def load_document(path: str) -> MapDocument:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return MapDocument.from_json(obj)


def _witness_doc(mmap: MacfarlaneMap | None, meta: dict) -> dict | None:
    return MapDocument.from_object(mmap, meta).to_json() if mmap is not None else None


def cmd_veronese(args, out) -> int:
    spec = VeroneseSpec(args.n, args.m)
    obj = veronese_frame(spec) if args.parametrization == "frame" else veronese_macfarlane(spec)
    meta = {"construction": "veronese", "r": spec.r_max, "kappa": 4 / spec.r_max}
    _emit(MapDocument.from_object(obj, meta).to_json(), out)
    return 0


def cmd_check(args, out) -> int:
    doc = load_document(args.file)
    rep = constant_curvature_check(gram_det_of(doc.to_object()), tol=args.tol)
    _emit(rep.to_dict(), out)
    if args.expect_constant and not rep.constant:
        sys.stderr.write("check failed: Gram determinant is not c (1 + |x|^2)^r\n")
        return 1
    return 0


def cmd_curvature(args, out) -> int:
    doc = load_document(args.file)
    a, b, steps = args.grid
    steps = int(steps)
    if steps < 1:
        raise InputError("grid STEPS must be >= 1")
    rows = curvature_scan(gram_det_of(doc.to_object()), default_grid(a, b, steps))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x_re", "x_im", "L", "K"])
    for x, L, K in rows:
        w.writerow([f"{v:.{SIG_DIGITS}g}" for v in (x.real, x.imag, L, K)])
    return 0


def cmd_solve(args, out) -> int:
    if args.branch:
        a = search.build_ansatz(args.n, args.branch[:-1], args.branch[-1], args.pin or ())
        sys_ = search.constraints_from_ansatz(a, args.r)
        outcome = search.solve_multistart(sys_, args.restarts, args.seed)
        trace = []
    else:
        outcome, trace = search.search_target(args.n, args.r, args.restarts, args.seed)
    report = {"n": args.n, "r": args.r, "trace": trace}
    if outcome is None:
        report["outcome"] = None
        report["witness"] = None
        report["note"] = "no admissible branch"
    else:
        report["outcome"] = outcome.to_dict()
        w = outcome.witness()
        report["witness"] = _witness_doc(w, {"r": args.r, "kappa": 4 / args.r, "source": "search"})
    _emit(report, out)
    return 0


def cmd_classify(args, out) -> int:
    rows = search.classify(args.n, range(1, args.rmax + 1), args.restarts, args.seed)
    table = []
    for row in rows:
        d = row.to_dict()
        d["witness"] = _witness_doc(row.witness, {"r": row.r, "kappa": row.kappa, "source": row.source})
        table.append(d)
    _emit({"n": args.n, "rmax": args.rmax, "restarts": args.restarts, "seed": args.seed, "rows": table}, out)
    return 0


def cmd_duality(args, out) -> int:
    doc = load_document(args.file)
    obj = doc.to_object()
    if isinstance(obj, GrassmannFrame):
        obj = frame_to_macfarlane(obj)
    elif isinstance(obj, PlueckerVector):
        obj = obj.to_macfarlane()
    _emit(MapDocument.from_object(duality_transpose(obj), {**doc.metadata, "transform": "duality"}).to_json(), out)
    return 0


def cmd_embed(args, out) -> int:
    doc = load_document(args.file)
    obj = embed_pad(doc.to_object())
    _emit(MapDocument.from_object(obj, {**doc.metadata, "transform": "embed"}).to_json(), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grasscurv",
                                description="Constant-curvature holomorphic maps of S^2 into G(m, n).")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("veronese", help="emit the Veronese map of G(m, n)")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--m", type=int, default=1)
    v.add_argument("--parametrization", choices=("frame", "macfarlane"), default="frame")
    v.set_defaults(func=cmd_veronese)

    c = sub.add_parser("check", help="binomial check of the Gram determinant")
    c.add_argument("file")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--expect-constant", action="store_true")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("curvature", help="energy density and curvature on a grid (CSV)")
    k.add_argument("file")
    k.add_argument("--grid", nargs=3, type=float, metavar=("A", "B", "STEPS"), default=(-2.0, 2.0, 5))
    k.set_defaults(func=cmd_curvature)

    s = sub.add_parser("solve", help="search for a G(2, n) map with detM = (1 + |x|^2)^r")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--restarts", type=int, default=search.DEFAULT_RESTARTS)
    s.add_argument("--branch", type=int, nargs="+", metavar="E",
                   help="exponents r1 .. r_{n-2} followed by s1")
    s.add_argument("--pin", nargs="+", metavar="SLOT", help="coefficient slots fixed to 0, e.g. alpha4")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("classify", help="classification table for G(2, n), r = 1 .. rmax")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--rmax", type=int, required=True)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--restarts", type=int, default=search.DEFAULT_RESTARTS)
    t.set_defaults(func=cmd_classify)

    d = sub.add_parser("duality", help="transpose K: G(m, n) -> G(n - m, n)")
    d.add_argument("file")
    d.set_defaults(func=cmd_duality)

    e = sub.add_parser("embed", help="pad with a zero row: G(m, n) -> G(m, n + 1)")
    e.add_argument("file")
    e.set_defaults(func=cmd_embed)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        if getattr(args, "restarts", 1) < 1:
            raise InputError("--restarts must be >= 1")
        if args.command == "solve" and args.branch and len(args.branch) != args.n - 1:
            raise InputError(f"--branch needs {args.n - 2} exponents and s1")
        return args.func(args, out)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except GrassCurvError as exc:
        name = type(exc).__name__
        code = 2 if isinstance(exc, ValueError) else 1
        sys.stderr.write(f"{name}: {exc}\n")
        return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
