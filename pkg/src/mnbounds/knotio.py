"""Knot notations (braid words, PD codes), braid closure, and the knot
database / report files.

PD convention: each crossing ``X(a,b,c,d)`` lists its four edge labels
counterclockwise starting from the incoming under-strand, so the under
strand runs ``a -> c``.  The over strand runs ``d -> b`` at a positive
crossing and ``b -> d`` at a negative one; the direction is recovered by
walking the knot, not from label arithmetic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .spin import TorsionState, Tri

__all__ = [
    "NotationError",
    "BraidSyntaxError",
    "BraidRangeError",
    "NotAKnotError",
    "PDSyntaxError",
    "PDLabelError",
    "SchemaError",
    "BraidWord",
    "PDCode",
    "KnotRecord",
    "MontesinosData",
    "parse_braid",
    "parse_pd",
    "braid_to_pd",
    "pd_traversal",
    "load_db",
    "save_db",
    "parse_db",
    "render_record",
    "save_report",
    "load_report",
    "default_db_path",
]


class NotationError(ValueError):
    """Base class for knot-notation errors."""


class BraidSyntaxError(NotationError):
    pass


class BraidRangeError(NotationError):
    pass


class NotAKnotError(NotationError):
    """The notation describes a link with more than one component."""


class PDSyntaxError(NotationError):
    pass


class PDLabelError(NotationError):
    pass


class SchemaError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.strands < 2:
            raise BraidRangeError("a braid needs at least 2 strands")
        for x in self.letters:
            if x == 0 or abs(x) > self.strands - 1:
                raise BraidRangeError(f"letter {x} out of range for {self.strands} strands")
        perm = list(range(self.strands))
        for x in self.letters:
            i = abs(x) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        seen, j = 0, 0
        while True:
            j = perm[j]
            seen += 1
            if j == 0:
                break
        if seen != self.strands:
            raise NotAKnotError("braid closure is a link, not a knot")

    def __str__(self) -> str:
        return f"s={self.strands}; w=" + ",".join(str(x) for x in self.letters)


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(tuple(x) for x in self.crossings))
        _validate_pd(self.crossings)

    def __str__(self) -> str:
        return " ".join("X({},{},{},{})".format(*x) for x in self.crossings)

    def __len__(self) -> int:
        return len(self.crossings)


_BRAID_RE = re.compile(r"^\s*s\s*=\s*(\d+)\s*;\s*w\s*=\s*(.*?)\s*$")


def parse_braid(text: str) -> BraidWord:
    """Parse ``s=<strands>; w=<comma separated signed generators>``."""
    m = _BRAID_RE.match(text)
    if m is None:
        raise BraidSyntaxError(f"malformed braid text: {text!r}")
    letters = []
    body = m.group(2)
    if body:
        for tok in body.split(","):
            tok = tok.strip()
            if not re.fullmatch(r"[+-]?\d+", tok):
                raise BraidSyntaxError(f"bad braid letter {tok!r} in {text!r}")
            letters.append(int(tok))
    return BraidWord(int(m.group(1)), tuple(letters))


_X_RE = re.compile(r"X(?:\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)"
                   r"|\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\])")


def parse_pd(text: str) -> PDCode:
    """Parse a whitespace- or comma-separated list of ``X(a,b,c,d)`` (or ``X[a,b,c,d]``)."""
    s = text.strip()
    if not s:
        raise PDSyntaxError("empty PD code")
    crossings = []
    pos = 0
    while pos < len(s):
        if s[pos] in " \t\n,;":
            pos += 1
            continue
        m = _X_RE.match(s, pos)
        if m is None:
            raise PDSyntaxError(f"malformed PD code at position {pos}: {text!r}")
        crossings.append(tuple(int(g) for g in m.groups() if g is not None))
        pos = m.end()
    return PDCode(tuple(crossings))


def _validate_pd(crossings: Sequence[tuple[int, int, int, int]]) -> None:
    c = len(crossings)
    counts: dict[int, int] = {}
    for x in crossings:
        if len(x) != 4:
            raise PDSyntaxError("each crossing needs exactly four labels")
        for a in x:
            counts[a] = counts.get(a, 0) + 1
    expected = set(range(1, 2 * c + 1))
    if set(counts) != expected:
        raise PDLabelError(f"labels must be exactly 1..{2 * c}")
    bad = sorted(a for a, k in counts.items() if k != 2)
    if bad:
        raise PDLabelError(f"labels {bad} do not occur exactly twice")
    if c:
        pd_traversal(crossings)


def pd_traversal(crossings: Sequence[tuple[int, int, int, int]]) -> tuple[list[int], list[int]]:
    """Walk the knot once from the first under-pass.

    Returns ``(signs, order)``: the sign of every crossing and the labels in
    traversal order.  Raises if the diagram has several components or its
    orientation is inconsistent with the PD convention.
    """
    where: dict[int, list[tuple[int, int]]] = {}
    for ci, x in enumerate(crossings):
        for pos, lab in enumerate(x):
            where.setdefault(lab, []).append((ci, pos))
    signs = [0] * len(crossings)
    under_seen = [False] * len(crossings)
    order: list[int] = []
    visited = 0
    ci, pos = 0, 0
    start = (0, 0)
    exit_of = {0: 2, 1: 3, 3: 1}
    while True:
        if pos == 2:
            raise PDLabelError(f"inconsistent orientation at crossing {ci + 1}")
        if pos == 0:
            if under_seen[ci]:
                raise PDLabelError(f"under-strand of crossing {ci + 1} traversed twice")
            under_seen[ci] = True
        else:
            if signs[ci]:
                raise PDLabelError(f"over-strand of crossing {ci + 1} traversed twice")
            signs[ci] = 1 if pos == 3 else -1
        out = exit_of[pos]
        label = crossings[ci][out]
        order.append(label)
        visited += 2
        a, b = where[label]
        ci, pos = b if a == (ci, out) else a
        if (ci, pos) == start:
            break
    if visited != 4 * len(crossings):
        raise NotAKnotError("PD code has more than one component")
    return signs, order


def braid_to_pd(b: BraidWord) -> PDCode:
    """PD code of the braid closure, labels numbered along the orientation.

    A positive letter ``i`` is the crossing where strand ``i`` passes over
    strand ``i+1``; with strands oriented along the word that crossing is
    positive.
    """
    s = b.strands
    pos_edge = list(range(s))
    nxt = s
    raw: list[tuple[int, int, int, int]] = []
    for x in b.letters:
        i = abs(x) - 1
        in_l, in_r = pos_edge[i], pos_edge[i + 1]
        out_r, out_l = nxt, nxt + 1
        nxt += 2
        if x > 0:
            raw.append((in_r, out_r, out_l, in_l))
        else:
            raw.append((in_l, in_r, out_r, out_l))
        pos_edge[i], pos_edge[i + 1] = out_l, out_r
    alias = {pos_edge[j]: j for j in range(s)}
    raw = [tuple(alias.get(e, e) for e in x) for x in raw]
    # follow the orientation from edge 0 to number edges 1..2c
    incoming = {}
    for ci, (a, bb, c, d) in enumerate(raw):
        incoming[a] = c
    for ci, x in enumerate(raw):
        a, bb, c, d = x
        # over strand: positive crossings enter at d, negative at b
        if b.letters[ci] > 0:
            incoming[d] = bb
        else:
            incoming[bb] = d
    label = {}
    e = 0
    while e not in label:
        label[e] = len(label) + 1
        e = incoming[e]
    return PDCode(tuple(tuple(label[e] for e in x) for x in raw))


@dataclass(frozen=True)
class MontesinosData:
    b: int
    tangles: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "tangles", tuple(tuple(t) for t in self.tangles))
        if len(self.tangles) != 3:
            raise ValueError("exactly three rational tangles are required")
        from math import gcd
        for a, bb in self.tangles:
            if a < 2 or gcd(a, bb) != 1:
                raise ValueError(f"tangle ({a}, {bb}) needs alpha >= 2 and gcd(alpha, beta) = 1")

    def fractions(self) -> list[Fraction]:
        return [Fraction(bb, a) for a, bb in self.tangles]


_NUMERIC_FACTS = ("tunnel_number", "bridge_number", "sd", "ch", "crossings")
_KEY_ORDER = ("name", "dimension", "pd", "braid", "crossings", "prime", "tunnel_number",
              "bridge_number", "sd", "ch", "fibred", "goda_mn2", "hm_applicable",
              "montesinos", "f0", "f1", "tau")


@dataclass(frozen=True)
class KnotRecord:
    """One database entry: notation plus curated literature facts."""

    name: str
    dimension: int = 1
    pd: PDCode | None = None
    braid: BraidWord | None = None
    crossings: int | None = None
    prime: bool | None = None
    tunnel_number: int | None = None
    bridge_number: int | None = None
    sd: int | None = None
    ch: int | None = None
    fibred: Tri = Tri.UNKNOWN
    goda_mn2: bool = False
    hm_applicable: bool = False
    montesinos: MontesinosData | None = None
    f0: Tri = Tri.UNKNOWN
    f1: Tri = Tri.UNKNOWN
    tau: TorsionState = TorsionState.UNKNOWN
    provenance: dict[str, str] = field(default_factory=dict, compare=True, hash=False)
    extra: dict[str, Any] = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if not self.name:
            raise SchemaError("record needs a name")
        if self.dimension < 1:
            raise SchemaError("dimension must be >= 1")
        if self.dimension == 1 and self.pd is None and self.braid is None:
            raise SchemaError(f"classical knot {self.name!r} needs a pd or braid notation")
        for key in _NUMERIC_FACTS:
            v = getattr(self, key)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 0):
                raise SchemaError(f"{key} must be a nonnegative integer")

    def provenance_for(self, key: str) -> str:
        return self.provenance.get(key, self.provenance.get("source", "database fact"))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key in _KEY_ORDER:
            v = getattr(self, key)
            if key == "name" or key == "dimension":
                out[key] = v
            elif key in ("pd", "braid"):
                if v is not None:
                    out[key] = str(v)
            elif key in ("fibred", "f0", "f1", "tau"):
                if v.value != "unknown":
                    out[key] = v.value
            elif key in ("goda_mn2", "hm_applicable"):
                if v:
                    out[key] = True
            elif key == "montesinos":
                if v is not None:
                    out[key] = {"b": v.b, "tangles": [list(t) for t in v.tangles]}
            elif v is not None:
                out[key] = v
        for k in sorted(self.provenance):
            out[f"provenance.{k}"] = self.provenance[k]
        for k in sorted(self.extra):
            out[k] = self.extra[k]
        return out

    @classmethod
    def from_dict(cls, obj: dict[str, Any], line: int | None = None) -> "KnotRecord":
        if not isinstance(obj, dict):
            raise SchemaError("record must be a JSON object", line)
        kw: dict[str, Any] = {}
        prov: dict[str, str] = {}
        extra: dict[str, Any] = {}
        try:
            for key, v in obj.items():
                if key.startswith("provenance."):
                    if not isinstance(v, str):
                        raise SchemaError(f"{key} must be a string", line)
                    prov[key[len("provenance."):]] = v
                elif key == "name":
                    if not isinstance(v, str):
                        raise SchemaError("name must be a string", line)
                    kw["name"] = v
                elif key == "dimension":
                    if not isinstance(v, int) or isinstance(v, bool):
                        raise SchemaError("dimension must be an integer", line)
                    kw["dimension"] = v
                elif key == "pd":
                    kw["pd"] = parse_pd(v) if v is not None else None
                elif key == "braid":
                    kw["braid"] = parse_braid(v) if v is not None else None
                elif key in _NUMERIC_FACTS:
                    kw[key] = v
                elif key == "prime":
                    if v is not None and not isinstance(v, bool):
                        raise SchemaError("prime must be a boolean", line)
                    kw[key] = v
                elif key in ("fibred", "f0", "f1"):
                    kw[key] = Tri.parse(v)
                elif key == "tau":
                    kw[key] = TorsionState.parse(v)
                elif key in ("goda_mn2", "hm_applicable"):
                    if not isinstance(v, bool):
                        raise SchemaError(f"{key} must be a boolean", line)
                    kw[key] = v
                elif key == "montesinos":
                    if v is not None:
                        if not isinstance(v, dict) or set(v) != {"b", "tangles"}:
                            raise SchemaError("montesinos needs keys b and tangles", line)
                        kw[key] = MontesinosData(v["b"], tuple(tuple(t) for t in v["tangles"]))
                else:
                    extra[key] = v
            if "name" not in kw:
                raise SchemaError("record needs a name", line)
            return cls(provenance=prov, extra=extra, **kw)
        except SchemaError as exc:
            if exc.line is None and line is not None:
                raise SchemaError(str(exc), line) from None
            raise
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{obj.get('name', '?')}: {exc}", line) from None


def render_record(rec: KnotRecord) -> str:
    return json.dumps(rec.to_dict(), ensure_ascii=False)


def parse_db(text: str) -> list[KnotRecord]:
    """Parse newline-delimited JSON records; blank and ``#`` lines are skipped."""
    records = []
    names: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", lineno) from None
        rec = KnotRecord.from_dict(obj, lineno)
        if rec.name in names:
            raise SchemaError(f"duplicate record name {rec.name!r}", lineno)
        names.add(rec.name)
        records.append(rec)
    return records


def load_db(path: str | Path) -> list[KnotRecord]:
    return parse_db(Path(path).read_text(encoding="utf-8"))


def save_db(records: Iterable[KnotRecord], path: str | Path) -> None:
    Path(path).write_text("".join(render_record(r) + "\n" for r in records), encoding="utf-8")


def default_db_path() -> Path:
    return Path(__file__).parent / "data" / "seed.txt"


def save_report(report, path: str | Path) -> None:
    """Write a report (anything with ``to_dict``) as deterministic JSON."""
    obj = report.to_dict() if hasattr(report, "to_dict") else report
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def load_report(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
