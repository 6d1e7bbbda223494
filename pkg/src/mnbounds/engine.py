"""Rule-based propagation of Morse-Novikov bounds over knot expressions.

A knot expression is built from database knots with superspinning and
connected sum.  Every subexpression becomes a node carrying an interval for
the Morse-Novikov number ``MN``, an interval for the saddle number ``sd``,
a tri-valued fibredness state, and (when computable) a Novikov profile.
Rules only ever narrow intervals or strengthen unknown states; they are
applied until nothing changes, and every narrowing is logged with the rule
that produced it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

from .algebra import DEFAULT_MINOR_CAP, LaurentPoly
from .knotio import KnotRecord, MontesinosData, braid_to_pd
from .novikov import NovikovProfile, knot_profile
from .spin import (
    HIGHDIM_MIN,
    FibredState,
    TorsionState,
    Tri,
    highdim_fibred,
    iterated_spin_transfer,
    spin_parity_transfer,
    spun_torsion,
    suspend_profile,
)
from .wirtinger import alexander_polynomial, alexander_presentation, is_monic, wirtinger_from_pd

__all__ = [
    "Base",
    "Spin",
    "Sum",
    "KnotExpr",
    "render_expr",
    "expr_dimension",
    "Interval",
    "TraceStep",
    "NodeReport",
    "BoundReport",
    "DeriveOptions",
    "ExprError",
    "UnknownKnotError",
    "InconsistentFactsError",
    "RULES",
    "RULE_IDS",
    "novikov_lower_bound",
    "montesinos_tunnel_one",
    "derive",
    "explain",
    "REPORT_VERSION",
]

REPORT_VERSION = 1


class ExprError(ValueError):
    """Malformed or dimensionally inconsistent knot expression."""


class UnknownKnotError(LookupError):
    pass


class InconsistentFactsError(ValueError):
    """Two derivation steps force an empty interval or contradictory states."""

    def __init__(self, node: str, quantity: str, first: "TraceStep | None", second: "TraceStep"):
        a = f"step {first.index} [{first.rule}] {first.conclusion}" if first else "initial state"
        b = f"step {second.index} [{second.rule}] {second.conclusion}"
        super().__init__(f"inconsistent facts for {quantity} of {node}: {a} conflicts with {b}")
        self.node = node
        self.quantity = quantity
        self.first = first
        self.second = second


# -- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class Spin:
    p: int
    inner: "KnotExpr"

    def __post_init__(self):
        if self.p < 1:
            raise ExprError("spin order p must be >= 1")


@dataclass(frozen=True)
class Sum:
    left: "KnotExpr"
    right: "KnotExpr"


KnotExpr = Union[Base, Spin, Sum]


def render_expr(e: KnotExpr) -> str:
    if isinstance(e, Base):
        return e.name
    if isinstance(e, Spin):
        head = "spin" if e.p == 1 else f"spin[{e.p}]"
        return f"{head}({render_expr(e.inner)})"
    return f"sum({render_expr(e.left)}, {render_expr(e.right)})"


def expr_dimension(e: KnotExpr, db: Mapping[str, KnotRecord]) -> int:
    if isinstance(e, Base):
        if e.name not in db:
            raise UnknownKnotError(f"unknown knot {e.name!r}")
        return db[e.name].dimension
    if isinstance(e, Spin):
        return expr_dimension(e.inner, db) + e.p
    dl, dr = expr_dimension(e.left, db), expr_dimension(e.right, db)
    if dl != dr:
        raise ExprError(f"connected sum of knots of dimensions {dl} and {dr}")
    return dl


# -- values ----------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: int = 0
    hi: int | None = None

    def __post_init__(self):
        if self.lo < 0 or (self.hi is not None and self.hi < self.lo):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.hi == self.lo

    def contains(self, other: "Interval") -> bool:
        if other.lo < self.lo:
            return False
        if self.hi is None:
            return True
        return other.hi is not None and other.hi <= self.hi

    def __str__(self) -> str:
        if self.is_point:
            return str(self.lo)
        return f"[{self.lo}, {'inf' if self.hi is None else self.hi}]"

    def to_list(self) -> list:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class TraceStep:
    index: int
    rule: str
    citation: str
    node: str
    quantity: str
    premises: tuple[str, ...]
    conclusion: str

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "rule": self.rule, "citation": self.citation,
                "node": self.node, "quantity": self.quantity,
                "premises": list(self.premises), "conclusion": self.conclusion}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "TraceStep":
        return cls(d["index"], d["rule"], d["citation"], d["node"], d["quantity"],
                   tuple(d["premises"]), d["conclusion"])


@dataclass(frozen=True)
class NodeReport:
    expr: str
    dimension: int
    mn: Interval
    sd: Interval
    fibred: Tri
    profile: NovikovProfile | None = None
    alexander: str | None = None
    tunnel: Interval = Interval()
    f0: Tri = Tri.UNKNOWN
    f1: Tri = Tri.UNKNOWN
    tau: TorsionState = TorsionState.UNKNOWN
    facts: dict[str, Any] = field(default_factory=dict, hash=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "expr": self.expr,
            "dimension": self.dimension,
            "mn": self.mn.to_list(),
            "sd": self.sd.to_list(),
            "tunnel_number": self.tunnel.to_list(),
            "fibred": self.fibred.value,
            "f0": self.f0.value,
            "f1": self.f1.value,
            "tau": self.tau.value,
            "profile": None if self.profile is None else {
                "top_degree": self.profile.top_degree,
                "betti": list(self.profile.betti),
                "torsion": list(self.profile.torsion),
            },
            "alexander": self.alexander,
            "facts": dict(self.facts),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "NodeReport":
        prof = d.get("profile")
        return cls(
            expr=d["expr"],
            dimension=d["dimension"],
            mn=Interval(*d["mn"]),
            sd=Interval(*d["sd"]),
            tunnel=Interval(*d["tunnel_number"]),
            fibred=Tri(d["fibred"]),
            f0=Tri(d["f0"]),
            f1=Tri(d["f1"]),
            tau=TorsionState(d["tau"]),
            profile=None if prof is None else NovikovProfile.from_torsion(prof["torsion"], prof["betti"]),
            alexander=d.get("alexander"),
            facts=dict(d.get("facts", {})),
        )


@dataclass(frozen=True)
class BoundReport:
    root: str
    nodes: tuple[NodeReport, ...]
    trace: tuple[TraceStep, ...]
    report_version: int = REPORT_VERSION

    def node(self, expr: str) -> NodeReport:
        for n in self.nodes:
            if n.expr == expr:
                return n
        raise KeyError(expr)

    @property
    def result(self) -> NodeReport:
        return self.node(self.root)

    @property
    def mn(self) -> Interval:
        return self.result.mn

    def rules_used(self) -> set[str]:
        return {s.rule for s in self.trace}

    def to_dict(self) -> dict[str, Any]:
        return {
            "report_version": self.report_version,
            "root": self.root,
            "nodes": [n.to_dict() for n in self.nodes],
            "trace": [s.to_dict() for s in self.trace],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "BoundReport":
        version = d.get("report_version")
        if version != REPORT_VERSION:
            raise ValueError(f"unsupported report_version {version!r}")
        return cls(d["root"], tuple(NodeReport.from_dict(n) for n in d["nodes"]),
                   tuple(TraceStep.from_dict(s) for s in d["trace"]), version)


# -- closed-form checks ----------------------------------------------------

def novikov_lower_bound(profile: NovikovProfile) -> int:
    """``sum_k (b_k + q_k + q_{k-1})``: every torsion summand in degree k
    needs critical points in degrees k and k+1."""
    return sum(profile.b(k) + profile.q(k) + profile.q(k - 1)
               for k in range(profile.top_degree + 2))


def montesinos_tunnel_one(d: MontesinosData) -> bool:
    """Tunnel-number-one criterion for ``M(b; (a1,b1), (a2,b2), (a3,b3))``."""
    f1, f2, f3 = d.fractions()
    same_class = (f2 - f3).denominator == 1
    a1, a2 = d.tangles[0][0], d.tangles[1][0]
    return same_class and Fraction(d.b) - (f1 + f2 + f3) == Fraction(1, a1 * a2)


# -- derivation state ------------------------------------------------------

@dataclass
class _Node:
    expr: KnotExpr
    key: str
    dimension: int
    record: KnotRecord | None = None
    children: tuple[str, ...] = ()
    mn: list = field(default_factory=lambda: [0, None])
    sd: list = field(default_factory=lambda: [0, None])
    tunnel: list = field(default_factory=lambda: [0, None])
    fibred: Tri = Tri.UNKNOWN
    f0: Tri = Tri.UNKNOWN
    f1: Tri = Tri.UNKNOWN
    tau: TorsionState = TorsionState.UNKNOWN
    profile: NovikovProfile | None = None
    alexander: LaurentPoly | None = None
    # index of the step that last moved each bound, for conflict reports
    origin: dict = field(default_factory=dict)

    @property
    def classical(self) -> bool:
        return self.dimension == 1


@dataclass(frozen=True)
class DeriveOptions:
    max_minors: int = DEFAULT_MINOR_CAP
    rule_order: tuple[str, ...] | None = None


class _Context:
    def __init__(self, nodes: dict[str, _Node]):
        self.nodes = nodes
        self.trace: list[TraceStep] = []

    def _step(self, rule: str, citation: str, node: _Node, quantity: str,
              premises: Sequence[str], conclusion: str) -> TraceStep:
        step = TraceStep(len(self.trace) + 1, rule, citation, node.key, quantity,
                         tuple(premises), conclusion)
        return step

    def _commit(self, step: TraceStep) -> None:
        self.trace.append(step)

    def _prior(self, node: _Node, slot: str) -> TraceStep | None:
        idx = node.origin.get(slot)
        return self.trace[idx - 1] if idx else None

    def raise_lo(self, node: _Node, qty: str, value: int, rule: str, citation: str,
                 premises: Sequence[str]) -> bool:
        iv = getattr(node, qty)
        if value <= iv[0]:
            return False
        step = self._step(rule, citation, node, qty, premises, f"{_LABEL[qty]}({node.key}) >= {value}")
        if iv[1] is not None and value > iv[1]:
            raise InconsistentFactsError(node.key, qty, self._prior(node, qty + ".hi"), step)
        iv[0] = value
        self._commit(step)
        node.origin[qty + ".lo"] = step.index
        return True

    def lower_hi(self, node: _Node, qty: str, value: int, rule: str, citation: str,
                 premises: Sequence[str]) -> bool:
        iv = getattr(node, qty)
        if iv[1] is not None and value >= iv[1]:
            return False
        step = self._step(rule, citation, node, qty, premises, f"{_LABEL[qty]}({node.key}) <= {value}")
        if value < iv[0]:
            raise InconsistentFactsError(node.key, qty, self._prior(node, qty + ".lo"), step)
        iv[1] = value
        self._commit(step)
        node.origin[qty + ".hi"] = step.index
        return True

    def set_state(self, node: _Node, qty: str, value, rule: str, citation: str,
                  premises: Sequence[str]) -> bool:
        current = getattr(node, qty)
        if value.value == "unknown" or current == value:
            return False
        step = self._step(rule, citation, node, qty, premises, f"{qty}({node.key}) = {value.value}")
        if current.value != "unknown":
            raise InconsistentFactsError(node.key, qty, self._prior(node, qty), step)
        setattr(node, qty, value)
        self._commit(step)
        node.origin[qty] = step.index
        return True

    def set_profile(self, node: _Node, profile: NovikovProfile, rule: str, citation: str,
                    premises: Sequence[str]) -> bool:
        if node.profile is not None:
            return False
        self._commit(self._step(rule, citation, node, "profile", premises,
                                f"q({node.key}) = {_fmt_tuple(profile.torsion)}"))
        node.profile = profile
        return True


_LABEL = {"mn": "MN", "sd": "sd", "tunnel": "t"}


def _fmt_tuple(xs: Iterable[int]) -> str:
    return "(" + ", ".join(str(x) for x in xs) + ")"


def _fmt_iv(iv: list) -> str:
    return str(Interval(iv[0], iv[1]))


# -- rules -----------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    id: str
    citation: str
    apply: Callable[[_Context, _Node], bool]


def _r1(ctx: _Context, n: _Node) -> bool:
    if n.profile is None or n.dimension == 2:
        return False
    lb = novikov_lower_bound(n.profile)
    return ctx.raise_lo(n, "mn", lb, "R1", CIT["R1"], [f"q({n.key}) = {_fmt_tuple(n.profile.torsion)}"])


def _r2(ctx: _Context, n: _Node) -> bool:
    if n.profile is None or n.dimension != 2:
        return False
    q1, q2 = n.profile.q(1), n.profile.q(2)
    return ctx.raise_lo(n, "mn", 2 * (q1 + q2), "R2", CIT["R2"],
                        [f"q1({n.key}) = {q1}", f"q2({n.key}) = {q2}"])


def _r3(ctx: _Context, n: _Node) -> bool:
    if not isinstance(n.expr, Spin):
        return False
    k = ctx.nodes[n.children[0]]
    if k.mn[1] is None:
        return False
    return ctx.lower_hi(n, "mn", 2 * k.mn[1], "R3", CIT["R3"], [f"MN({k.key}) <= {k.mn[1]}"])


def _r4(ctx: _Context, n: _Node) -> bool:
    if not (n.classical and isinstance(n.expr, Base)) or n.tunnel[1] is None:
        return False
    return ctx.lower_hi(n, "mn", 2 * n.tunnel[1], "R4", CIT["R4"], [f"t({n.key}) <= {n.tunnel[1]}"])


def _r5(ctx: _Context, n: _Node) -> bool:
    changed = False
    if n.fibred is Tri.YES:
        changed |= ctx.lower_hi(n, "mn", 0, "R5", CIT["R5"], [f"{n.key} fibred"])
    elif n.fibred is Tri.NO:
        changed |= ctx.raise_lo(n, "mn", 1, "R5", CIT["R5"], [f"{n.key} not fibred"])
    if n.mn[1] == 0:
        changed |= ctx.set_state(n, "fibred", Tri.YES, "R5", CIT["R5"], [f"MN({n.key}) = 0"])
    elif n.mn[0] >= 1:
        changed |= ctx.set_state(n, "fibred", Tri.NO, "R5", CIT["R5"], [f"MN({n.key}) >= {n.mn[0]}"])
    return changed


def _spun_classical(ctx: _Context, n: _Node) -> _Node | None:
    if isinstance(n.expr, Spin) and n.expr.p == 1:
        k = ctx.nodes[n.children[0]]
        if k.classical:
            return k
    return None


def _r6(ctx: _Context, n: _Node) -> bool:
    k = _spun_classical(ctx, n)
    if k is None or not (k.mn[0] == 2 and k.mn[1] == 2):
        return False
    prem = [f"MN({k.key}) = 2"]
    changed = ctx.raise_lo(n, "mn", 4, "R6", CIT["R6"], prem)
    changed |= ctx.lower_hi(n, "mn", 4, "R6", CIT["R6"], prem)
    return changed


def _r6b(ctx: _Context, n: _Node) -> bool:
    k = _spun_classical(ctx, n)
    if k is None or k.fibred is not Tri.NO:
        return False
    return ctx.raise_lo(n, "mn", 4, "R6'", CIT["R6'"], [f"{k.key} not fibred"])


def _r7(ctx: _Context, n: _Node) -> bool:
    if n.dimension != 2 or n.sd[1] is None:
        return False
    return ctx.lower_hi(n, "mn", 2 * n.sd[1], "R7", CIT["R7"], [f"sd({n.key}) <= {n.sd[1]}"])


def _r8(ctx: _Context, n: _Node) -> bool:
    k = _spun_classical(ctx, n)
    if k is None or k.record is None or k.record.bridge_number is None:
        return False
    b = k.record.bridge_number
    return ctx.lower_hi(n, "sd", max(0, 2 * (b - 1)), "R8", CIT["R8"], [f"b({k.key}) = {b}"])


def _r9(ctx: _Context, n: _Node) -> bool:
    changed = False
    lo, hi = n.mn
    if lo % 2:
        changed |= ctx.raise_lo(n, "mn", lo + 1, "R9", CIT["R9"], [f"MN({n.key}) >= {lo}"])
    if hi is not None and hi % 2:
        changed |= ctx.lower_hi(n, "mn", hi - 1, "R9", CIT["R9"], [f"MN({n.key}) <= {hi}"])
    return changed


def _r10(ctx: _Context, n: _Node) -> bool:
    if not isinstance(n.expr, Spin):
        return False
    k = ctx.nodes[n.children[0]]
    changed = False
    if k.fibred is Tri.YES:
        changed |= ctx.set_state(n, "fibred", Tri.YES, "R10", CIT["R10"], [f"{k.key} fibred"])
    if n.fibred is Tri.NO:
        changed |= ctx.set_state(k, "fibred", Tri.NO, "R10", CIT["R10"], [f"{n.key} not fibred"])
    if n.expr.p == 1 and k.classical:
        if n.fibred is Tri.YES:
            changed |= ctx.set_state(k, "fibred", Tri.YES, "R10", CIT["R10"], [f"{n.key} fibred"])
        if k.fibred is Tri.NO:
            changed |= ctx.set_state(n, "fibred", Tri.NO, "R10", CIT["R10"], [f"{k.key} not fibred"])
    return changed


def _spin_chain(ctx: _Context, n: _Node) -> tuple[int, int, _Node] | None:
    """(p, m, root) when ``n`` is the m-fold p-spin of a non-p-spin root."""
    if not isinstance(n.expr, Spin):
        return None
    p, m, cur = n.expr.p, 0, n
    while isinstance(cur.expr, Spin) and cur.expr.p == p:
        m += 1
        cur = ctx.nodes[cur.children[0]]
    return p, m, cur


def _r11(ctx: _Context, n: _Node) -> bool:
    changed = False
    cit = CIT["R11"]
    if n.dimension >= HIGHDIM_MIN:
        state = FibredState(n.f0, n.f1, n.tau)
        verdict = highdim_fibred(state, n.dimension)
        prem = [f"F0 {n.f0.value}", f"F1 {n.f1.value}", f"tau {n.tau.value}"]
        changed |= ctx.set_state(n, "fibred", verdict, "R11", cit, prem)
        if n.fibred is Tri.YES:
            changed |= ctx.set_state(n, "f0", Tri.YES, "R11", cit, [f"{n.key} fibred"])
            changed |= ctx.set_state(n, "f1", Tri.YES, "R11", cit, [f"{n.key} fibred"])
            changed |= ctx.set_state(n, "tau", TorsionState.ZERO, "R11", cit, [f"{n.key} fibred"])
        elif n.fibred is Tri.NO and n.f0 is Tri.YES and n.f1 is Tri.YES:
            changed |= ctx.set_state(n, "tau", TorsionState.NONZERO, "R11", cit, prem + [f"{n.key} not fibred"])
    if not isinstance(n.expr, Spin):
        return changed
    k = ctx.nodes[n.children[0]]
    if k.dimension < HIGHDIM_MIN:
        return changed
    p = n.expr.p
    # the complement's fundamental group and Novikov homology vanishing transfer both ways
    for q in ("f0", "f1"):
        changed |= ctx.set_state(n, q, getattr(k, q), "R11", cit, [f"{q.upper()}({k.key}) {getattr(k, q).value}"])
        changed |= ctx.set_state(k, q, getattr(n, q), "R11", cit, [f"{q.upper()}({n.key}) {getattr(n, q).value}"])
    changed |= ctx.set_state(n, "tau", spun_torsion(k.tau, p), "R11", cit, [f"tau({k.key}) {k.tau.value}", f"p = {p}"])
    for other in ctx.nodes.values():
        if other is n or not isinstance(other.expr, Spin) or other.children[0] != k.key:
            continue
        if n.fibred.known:
            v = spin_parity_transfer(p, other.expr.p, n.fibred, k.dimension)
            changed |= ctx.set_state(other, "fibred", v, "R11", cit, [f"{n.key} fibred = {n.fibred.value}", f"p = {p}, p' = {other.expr.p}"])
    chain = _spin_chain(ctx, n)
    if chain and chain[0] % 2 == 1 and chain[2].dimension >= HIGHDIM_MIN and n.fibred.known:
        p, m, root = chain
        for other in ctx.nodes.values():
            oc = _spin_chain(ctx, other)
            if oc and oc[0] == p and oc[2] is root and oc[1] != m:
                v = iterated_spin_transfer(p, oc[1], m, n.fibred, root.dimension)
                changed |= ctx.set_state(other, "fibred", v, "R11", cit, [f"{n.key} fibred = {n.fibred.value}", f"p = {p}, m = {m}, l = {oc[1]}"])
    return changed


def _r12(ctx: _Context, n: _Node) -> bool:
    if not isinstance(n.expr, Spin) or n.profile is not None:
        return False
    k = ctx.nodes[n.children[0]]
    if k.profile is None:
        return False
    prof = suspend_profile(k.profile, n.expr.p)
    return ctx.set_profile(n, prof, "R12", CIT["R12"], [f"q({k.key}) = {_fmt_tuple(k.profile.torsion)}", f"p = {n.expr.p}"])


def _r13(ctx: _Context, n: _Node) -> bool:
    if not isinstance(n.expr, Sum):
        return False
    a, b = (ctx.nodes[c] for c in n.children)
    if a.mn[1] is None or b.mn[1] is None:
        return False
    return ctx.lower_hi(n, "mn", a.mn[1] + b.mn[1], "R13", CIT["R13"],
                        [f"MN({a.key}) <= {a.mn[1]}", f"MN({b.key}) <= {b.mn[1]}"])


def _r13l(ctx: _Context, n: _Node) -> bool:
    if not isinstance(n.expr, Sum):
        return False
    a, b = (ctx.nodes[c] for c in n.children)
    lo = max(a.mn[0], b.mn[0])
    return ctx.raise_lo(n, "mn", lo, "R13L", CIT["R13L"],
                        [f"MN({a.key}) >= {a.mn[0]}", f"MN({b.key}) >= {b.mn[0]}"])


def _r14(ctx: _Context, n: _Node) -> bool:
    rec = n.record
    if rec is None or rec.montesinos is None or not n.classical:
        return False
    if not montesinos_tunnel_one(rec.montesinos):
        return False
    prem = [f"{n.key} = M({rec.montesinos.b}; {rec.montesinos.tangles})"]
    changed = ctx.lower_hi(n, "tunnel", 1, "R14", CIT["R14"], prem)
    changed |= ctx.raise_lo(n, "tunnel", 1, "R14", CIT["R14"], prem)
    return changed


def _r15(ctx: _Context, n: _Node) -> bool:
    rec = n.record
    if rec is None or not rec.hm_applicable or n.alexander is None:
        return False
    monic = is_monic(n.alexander)
    return ctx.set_state(n, "fibred", Tri.YES if monic else Tri.NO, "R15", CIT["R15"],
                         [f"Δ({n.key}) = {n.alexander} is {'monic' if monic else 'not monic'}"])


def _r16(ctx: _Context, n: _Node) -> bool:
    if n.dimension != 2:
        return False
    changed = False
    if n.profile is not None:
        q1, q2 = n.profile.q(1), n.profile.q(2)
        changed |= ctx.raise_lo(n, "sd", q1 + q2, "R16", CIT["R16"], [f"q1({n.key}) = {q1}", f"q2({n.key}) = {q2}"])
    if n.record is not None and n.record.ch is not None:
        changed |= ctx.lower_hi(n, "sd", n.record.ch, "R16", CIT["R16"], [f"ch({n.key}) = {n.record.ch}"])
    return changed


def _r17(ctx: _Context, n: _Node) -> bool:
    rec = n.record
    if rec is None or not rec.goda_mn2 or not n.classical or n.fibred is not Tri.NO:
        return False
    prem = [f"{n.key} flagged goda_mn2", f"{n.key} not fibred"]
    changed = ctx.raise_lo(n, "mn", 2, "R17", CIT["R17"], prem)
    changed |= ctx.lower_hi(n, "mn", 2, "R17", CIT["R17"], prem)
    return changed


CIT = {
    "FACT": "database fact",
    "R0": "Novikov profile of a classical knot complement: q1 = number of non-unit invariant "
          "factors of the Alexander module over Z((t)); all Novikov Betti numbers vanish",
    "R1": "Novikov inequality: sum_k (b_k + q_k + q_(k-1)) <= MN(K)",
    "R2": "Novikov inequality for 2-knots: 2(q1 + q2) <= MN(K)",
    "R3": "spinning bound: MN(S_p(K)) <= 2 MN(K)",
    "R4": "tunnel number bound: MN(K) <= 2 t(K)",
    "R5": "fibred iff MN = 0 (MN counts critical points of a minimal regular circle-valued Morse map)",
    "R6": "spun knot theorem: MN(K) = 2 implies MN(S(K)) = 4; hence MN(S(K)) = 4 for every "
          "non-fibred classical knot with tunnel number 1",
    "R6'": "non-fibred classical K forces m1, m3 >= 1 and m2 >= 2 on S(K), so MN(S(K)) >= 4",
    "R7": "saddle number bound: MN(K) <= 2 sd(K)",
    "R8": "saddle number of a spun knot: sd(S(K)) <= 2(b(K) - 1)",
    "R9": "MN is even: no index-0 or top-index critical points and Euler characteristic 0",
    "R10": "fibredness transfer: K fibred implies S_p(K) fibred; for classical K, S(K) fibred implies K fibred",
    "R11": "high-dimensional fibring (n >= 6): fibred iff F0, F1, F2; tau(S_p K) = (1 + (-1)^p) tau(K); "
           "S_p and S_p' agree for p, p' of equal parity; iterates S_p^m agree for odd p",
    "R12": "Novikov complex of a superspun knot: N(S_p K) = N(K) + sigma^p N(K)",
    "R13": "connected sum: MN(K1 # K2) <= MN(K1) + MN(K2)",
    "R13L": "connected sum lower bound (design rule): MN(K1 # K2) >= max of the summand lower bounds",
    "R14": "Montesinos tunnel-number-one criterion: beta2/alpha2 = beta3/alpha3 mod Z and "
           "b - sum beta_i/alpha_i = 1/(alpha1 alpha2)",
    "R15": "fibredness of tunnel-number-one Montesinos knots detected by monicness of the Alexander polynomial",
    "R16": "saddle number bounds: q1 + q2 <= sd(K) <= ch(K)",
    "R17": "Goda: MN(K) = 2 for every non-fibred prime knot with at most 10 crossings",
}

RULES: tuple[Rule, ...] = tuple(
    Rule(rid, CIT[rid], fn) for rid, fn in (
        ("R1", _r1), ("R2", _r2), ("R3", _r3), ("R4", _r4), ("R5", _r5), ("R6", _r6),
        ("R6'", _r6b), ("R7", _r7), ("R8", _r8), ("R9", _r9), ("R10", _r10), ("R11", _r11),
        ("R12", _r12), ("R13", _r13), ("R13L", _r13l), ("R14", _r14), ("R15", _r15),
        ("R16", _r16), ("R17", _r17),
    )
)
RULE_IDS = tuple(r.id for r in RULES)


# -- driver ----------------------------------------------------------------

def _as_db(db) -> dict[str, KnotRecord]:
    if isinstance(db, Mapping):
        return dict(db)
    return {r.name: r for r in db}


def _collect(expr: KnotExpr, db: Mapping[str, KnotRecord], out: dict[str, _Node]) -> str:
    key = render_expr(expr)
    if key in out:
        return key
    if isinstance(expr, Base):
        if expr.name not in db:
            raise UnknownKnotError(f"unknown knot {expr.name!r}")
        rec = db[expr.name]
        out[key] = _Node(expr, key, rec.dimension, record=rec)
        return key
    if isinstance(expr, Spin):
        child = _collect(expr.inner, db, out)
        out[key] = _Node(expr, key, out[child].dimension + expr.p, children=(child,))
        return key
    left = _collect(expr.left, db, out)
    right = _collect(expr.right, db, out)
    if out[left].dimension != out[right].dimension:
        raise ExprError(f"connected sum of knots of dimensions {out[left].dimension} and {out[right].dimension}")
    out[key] = _Node(expr, key, out[left].dimension, children=(left, right))
    return key


def _seed_facts(ctx: _Context, n: _Node, options: DeriveOptions) -> None:
    rec = n.record
    if rec is None:
        return
    def cite(k):
        return f"{CIT['FACT']}: {rec.provenance_for(k)}"
    if rec.tunnel_number is not None:
        ctx.lower_hi(n, "tunnel", rec.tunnel_number, "FACT", cite("tunnel_number"), [f"record {rec.name}"])
        ctx.raise_lo(n, "tunnel", rec.tunnel_number, "FACT", cite("tunnel_number"), [f"record {rec.name}"])
    if rec.sd is not None:
        ctx.lower_hi(n, "sd", rec.sd, "FACT", cite("sd"), [f"record {rec.name}"])
        ctx.raise_lo(n, "sd", rec.sd, "FACT", cite("sd"), [f"record {rec.name}"])
    for q in ("fibred", "f0", "f1", "tau"):
        ctx.set_state(n, q, getattr(rec, q), "FACT", cite(q), [f"record {rec.name}"])
    if n.classical:
        pd = rec.pd if rec.pd is not None else braid_to_pd(rec.braid)
        alex = alexander_presentation(wirtinger_from_pd(pd))
        n.alexander = alexander_polynomial(alex)
        prof = knot_profile(alex, 1, options.max_minors)
        ctx.set_profile(n, prof, "R0", CIT["R0"], [f"Δ({n.key}) = {n.alexander}"])


def derive(expr: KnotExpr, db, options: DeriveOptions | None = None) -> BoundReport:
    """Propagate every rule over ``expr`` to a fixpoint and report the result."""
    options = options or DeriveOptions()
    records = _as_db(db)
    nodes: dict[str, _Node] = {}
    root = _collect(expr, records, nodes)
    ctx = _Context(nodes)
    for n in nodes.values():
        _seed_facts(ctx, n, options)
    rules = RULES
    if options.rule_order is not None:
        by_id = {r.id: r for r in RULES}
        rules = tuple(by_id[r] for r in options.rule_order)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for n in nodes.values():
                if rule.apply(ctx, n):
                    changed = True
    return BoundReport(root, tuple(_node_report(n) for n in nodes.values()), tuple(ctx.trace))


def shuffled_order(rng: random.Random) -> tuple[str, ...]:
    ids = list(RULE_IDS)
    rng.shuffle(ids)
    return tuple(ids)


def _node_report(n: _Node) -> NodeReport:
    facts: dict[str, Any] = {}
    if n.record is not None:
        facts = {k: v for k, v in n.record.to_dict().items()
                 if k not in ("name", "dimension", "pd", "braid") and not k.startswith("provenance.")}
    return NodeReport(
        expr=n.key,
        dimension=n.dimension,
        mn=Interval(*n.mn),
        sd=Interval(*n.sd),
        tunnel=Interval(*n.tunnel),
        fibred=n.fibred,
        f0=n.f0,
        f1=n.f1,
        tau=n.tau,
        profile=n.profile,
        alexander=None if n.alexander is None else str(n.alexander),
        facts=facts,
    )


def _mn_line(iv: Interval) -> str:
    return f"MN = {iv.lo}" if iv.is_point else f"MN in {iv}"


def explain(report: BoundReport) -> str:
    """Human-readable rendering: result, per-node summary, numbered trace."""
    res = report.result
    lines = [f"expression: {report.root}", _mn_line(res.mn), f"fibred: {res.fibred.value}"]
    if res.profile is not None:
        lines.append(f"novikov torsion q = {_fmt_tuple(res.profile.torsion)}")
    lines.append("")
    lines.append("nodes:")
    for n in report.nodes:
        parts = [f"dim {n.dimension}", _mn_line(n.mn), f"sd in {n.sd}" if not n.sd.is_point else f"sd = {n.sd.lo}",
                 f"fibred {n.fibred.value}"]
        if n.profile is not None:
            parts.append(f"q = {_fmt_tuple(n.profile.torsion)}")
        if n.alexander is not None:
            parts.append(f"Δ = {n.alexander}")
        lines.append(f"  {n.expr}: " + "; ".join(parts))
    lines.append("")
    lines.append("derivation:")
    for s in report.trace:
        prem = ", ".join(s.premises)
        lines.append(f"  {s.index}. [{s.rule}] {s.conclusion}   from {prem}")
        lines.append(f"      -- {s.citation}")
    return "\n".join(lines) + "\n"
