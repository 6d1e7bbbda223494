"""Command-line front end.

    mn compute 4_1
    mn bounds "spin(5_2)" [--json]
    mn validate db/seed.txt
    mn export "spin[2](5_2)" report.json

Exit codes: 0 ok, 2 usage/parse, 3 data/schema, 4 inconsistent facts,
5 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from .algebra import DEFAULT_MINOR_CAP, MinorLimitError, is_prime
from .engine import (
    Base,
    DeriveOptions,
    ExprError,
    InconsistentFactsError,
    KnotExpr,
    Spin,
    Sum,
    UnknownKnotError,
    derive,
    explain,
)
from .knotio import (
    KnotRecord,
    NotationError,
    SchemaError,
    braid_to_pd,
    default_db_path,
    load_db,
    save_report,
)
from .novikov import KnotModuleError, fp_lower_bound, knot_profile
from .wirtinger import (
    alexander_polynomial,
    alexander_presentation,
    is_monic,
    validate_knot_polynomial,
    wirtinger_from_pd,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INCONSISTENT = 4
EXIT_RESOURCE = 5


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str):
        if self._peek() != ch:
            raise ExprSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def _int(self) -> int:
        self._ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ExprSyntaxError("expected an integer", start)
        return int(self.text[start:self.pos])

    def _word(self) -> str:
        self._ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_.-"):
            self.pos += 1
        if start == self.pos:
            raise ExprSyntaxError("expected a knot name", start)
        return self.text[start:self.pos]

    def parse(self) -> KnotExpr:
        e = self.expr()
        self._ws()
        if self.pos != len(self.text):
            raise ExprSyntaxError("trailing input", self.pos)
        return e

    def expr(self) -> KnotExpr:
        start = self.pos
        word = self._word()
        nxt = self._peek()
        if word == "spin" and nxt in "([^" and nxt:
            p, m = 1, 1
            if nxt == "[":
                self.pos += 1
                at = self.pos
                p = self._int()
                if p < 1:
                    raise ExprSyntaxError("spin order must be >= 1", at)
                self._expect("]")
            if self._peek() == "^":
                self.pos += 1
                at = self.pos
                m = self._int()
                if m < 1:
                    raise ExprSyntaxError("iteration count must be >= 1", at)
            self._expect("(")
            inner = self.expr()
            self._expect(")")
            for _ in range(m):
                inner = Spin(p, inner)
            return inner
        if word == "sum" and nxt == "(":
            self.pos += 1
            left = self.expr()
            self._expect(",")
            right = self.expr()
            self._expect(")")
            return Sum(left, right)
        if word in ("spin", "sum"):
            raise ExprSyntaxError(f"{word} needs an argument list", start)
        return Base(word)


def parse_expr(text: str) -> KnotExpr:
    """Parse ``name | spin(E) | spin[p](E) | spin[p]^m(E) | sum(E, E)``."""
    return _ExprParser(text).parse()


def _load(args) -> dict[str, KnotRecord]:
    path = Path(args.db) if args.db else default_db_path()
    return {r.name: r for r in load_db(path)}


def _options(args) -> DeriveOptions:
    return DeriveOptions(max_minors=args.max_minors)


def _primes(text: str) -> list[int]:
    try:
        primes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    if not primes or not all(is_prime(p) for p in primes):
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")
    return primes


def _notation_pd(rec: KnotRecord):
    return rec.pd if rec.pd is not None else braid_to_pd(rec.braid)


def cmd_compute(args, out) -> int:
    db = _load(args)
    if args.name not in db:
        raise UnknownKnotError(f"unknown knot {args.name!r}")
    rec = db[args.name]
    if rec.dimension != 1:
        raise SchemaError(f"{rec.name} is not a classical knot; compute needs a diagram")
    alex = alexander_presentation(wirtinger_from_pd(_notation_pd(rec)))
    delta = alexander_polynomial(alex)
    profile = knot_profile(alex, 1, args.max_minors)
    fp = fp_lower_bound(alex, args.primes) if alex.generators else 0
    result = {
        "name": rec.name,
        "alexander": str(delta),
        "monic": is_monic(delta),
        "valid_knot_polynomial": validate_knot_polynomial(delta),
        "torsion": list(profile.torsion),
        "betti": list(profile.betti),
        "fp_lower_bound": fp,
        "primes": list(args.primes),
    }
    if args.json:
        out.write(json.dumps(result, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(f"knot: {rec.name}\n")
        out.write(f"Δ = {delta}\n")
        out.write(f"monic: {'yes' if result['monic'] else 'no'}\n")
        out.write(f"novikov torsion q = ({', '.join(map(str, profile.torsion))})\n")
        out.write(f"q̂₁ = {profile.q(1)}\n")
        out.write(f"F_p corank bound (p in {','.join(map(str, args.primes))}): {fp}\n")
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    db = _load(args)
    exprs = [parse_expr(t) for t in args.expr]
    opts = _options(args)
    if args.parallel and len(exprs) > 1:
        with ThreadPoolExecutor() as pool:
            reports = list(pool.map(lambda e: derive(e, db, opts), exprs))
    else:
        reports = [derive(e, db, opts) for e in exprs]
    if args.json:
        payload = [r.to_dict() for r in reports]
        obj = payload[0] if len(payload) == 1 else payload
        out.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(explain(r) for r in reports))
    return EXIT_OK


def cmd_validate(args, out) -> int:
    records = load_db(Path(args.path))
    failures = 0
    for rec in records:
        if rec.dimension != 1:
            out.write(f"ok   {rec.name}: dimension {rec.dimension}, facts only\n")
            continue
        polys = {}
        if rec.pd is not None:
            polys["pd"] = alexander_polynomial(alexander_presentation(wirtinger_from_pd(rec.pd)))
        if rec.braid is not None:
            polys["braid"] = alexander_polynomial(alexander_presentation(wirtinger_from_pd(braid_to_pd(rec.braid))))
        problems = []
        if len(set(polys.values())) > 1:
            problems.append("notations disagree: " + ", ".join(f"{k} {v}" for k, v in polys.items()))
        for k, v in polys.items():
            if not validate_knot_polynomial(v):
                problems.append(f"{k} polynomial {v} fails Δ(1) = ±1 or symmetry")
        if problems:
            failures += 1
            out.write(f"FAIL {rec.name}: " + "; ".join(problems) + "\n")
        else:
            out.write(f"ok   {rec.name}: Δ = {next(iter(polys.values()))}\n")
    out.write(f"{len(records)} records, {failures} failures\n")
    return EXIT_OK if failures == 0 else EXIT_DATA


def cmd_export(args, out) -> int:
    db = _load(args)
    report = derive(parse_expr(args.expr), db, _options(args))
    save_report(report, args.path)
    out.write(f"wrote {args.path}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--db", help="knot database (default: bundled seed database)")
    common.add_argument("--json", action="store_true", help="structured JSON output")
    common.add_argument("--primes", type=_primes, default=[2, 3, 5, 7],
                        help="primes for the F_p corank cross-check (default 2,3,5,7)")
    common.add_argument("--max-minors", type=int, default=DEFAULT_MINOR_CAP,
                        help="cap on minors enumerated per level")
    common.add_argument("--parallel", action="store_true",
                        help="derive several expressions concurrently (output order unchanged)")

    parser = argparse.ArgumentParser(prog="mn", description="Morse-Novikov bounds for knots and their spins")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", parents=[common], help="Alexander polynomial and Novikov profile of a knot")
    p.add_argument("name")
    p.set_defaults(func=cmd_compute)
    p = sub.add_parser("bounds", parents=[common], help="derive certified MN intervals with a trace")
    p.add_argument("expr", nargs="+")
    p.set_defaults(func=cmd_bounds)
    p = sub.add_parser("validate", parents=[common], help="check a knot database")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("export", parents=[common], help="write a JSON report")
    p.add_argument("expr")
    p.add_argument("path")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out)
    except (ExprSyntaxError, NotationError, ExprError) as exc:
        err.write(f"mn: parse error: {exc}\n")
        return EXIT_USAGE
    except InconsistentFactsError as exc:
        err.write(f"mn: {exc}\n")
        return EXIT_INCONSISTENT
    except MinorLimitError as exc:
        err.write(f"mn: {exc}\n")
        return EXIT_RESOURCE
    except (SchemaError, UnknownKnotError, KnotModuleError, OSError) as exc:
        err.write(f"mn: data error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
