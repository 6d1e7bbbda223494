"""Suspension calculus for spinning and superspinning.

Superspinning an n-knot ``p`` times turns a regular Morse map with counts
``m_i`` on the complement into one with counts ``m_i + m_{i-p}``, and the
Novikov complex into ``N ⊕ σ^p N``.  This module works with those counts and
with the tri-valued fibredness bookkeeping for knots of dimension >= 6.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .novikov import NovikovProfile

__all__ = [
    "Tri",
    "TorsionState",
    "MorseVector",
    "FibredState",
    "suspend_morse",
    "suspend_profile",
    "spun_torsion",
    "highdim_fibred",
    "spin_parity_transfer",
    "iterated_spin_transfer",
    "HIGHDIM_MIN",
]

HIGHDIM_MIN = 6


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, value) -> "Tri":
        if isinstance(value, Tri):
            return value
        if value is None:
            return cls.UNKNOWN
        if value is True:
            return cls.YES
        if value is False:
            return cls.NO
        key = str(value).strip().lower()
        aliases = {"yes": cls.YES, "holds": cls.YES, "true": cls.YES,
                   "no": cls.NO, "fails": cls.NO, "false": cls.NO,
                   "unknown": cls.UNKNOWN}
        if key not in aliases:
            raise ValueError(f"not a tri-valued state: {value!r}")
        return aliases[key]

    @property
    def known(self) -> bool:
        return self is not Tri.UNKNOWN


class TorsionState(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, value) -> "TorsionState":
        if isinstance(value, TorsionState):
            return value
        if value is None:
            return cls.UNKNOWN
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"not a torsion state: {value!r}") from None


@dataclass(frozen=True)
class MorseVector:
    """Critical point counts ``m_0..m_{n+2}`` of a regular Morse map on the
    complement of an n-knot."""

    knot_dimension: int
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(self.counts))
        if self.knot_dimension < 1:
            raise ValueError("knot dimension must be >= 1")
        if len(self.counts) != self.knot_dimension + 3:
            raise ValueError(
                f"a {self.knot_dimension}-knot complement needs {self.knot_dimension + 3} counts"
            )
        if any(m < 0 for m in self.counts):
            raise ValueError("critical point counts must be nonnegative")
        if self.euler_characteristic() != 0:
            raise ValueError("alternating sum of counts must vanish (Euler characteristic 0)")

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * m for i, m in enumerate(self.counts))

    @property
    def total(self) -> int:
        return sum(self.counts)


def suspend_morse(m: MorseVector, p: int) -> MorseVector:
    """Counts for the p-fold superspin: ``m'_i = m_i + m_{i-p}``."""
    if p < 1:
        raise ValueError("spin order p must be >= 1")
    size = len(m.counts) + p
    padded = m.counts + (0,) * p
    new = tuple(padded[i] + (padded[i - p] if i >= p else 0) for i in range(size))
    out = MorseVector(m.knot_dimension + p, new)
    assert out.euler_characteristic() == 0
    return out


def suspend_profile(q: NovikovProfile, p: int) -> NovikovProfile:
    """Profile of ``N ⊕ σ^p N``: entries add with a degree shift of ``p``."""
    if p < 1:
        raise ValueError("spin order p must be >= 1")
    top = q.top_degree + p
    entries = tuple(
        (q.b(k) + q.b(k - p), q.q(k) + q.q(k - p)) for k in range(top + 1)
    )
    return NovikovProfile(top, entries)


def spun_torsion(tau: TorsionState, p: int) -> TorsionState:
    # tau(S_p K) = (1 + (-1)^p) tau(K); 2*tau may vanish, so never claim nonzero.
    if p < 1:
        raise ValueError("spin order p must be >= 1")
    if p % 2 == 1 or tau is TorsionState.ZERO:
        return TorsionState.ZERO
    return TorsionState.UNKNOWN


@dataclass(frozen=True)
class FibredState:
    """Fibredness conditions for a knot of dimension >= 6.

    ``f0``: the kernel of the canonical class is finitely presented;
    ``f1``: Novikov homology of the universal cover vanishes;
    ``f2``: the Whitehead torsion ``tau`` of the completed complex vanishes.
    """

    f0: Tri = Tri.UNKNOWN
    f1: Tri = Tri.UNKNOWN
    tau: TorsionState = TorsionState.UNKNOWN

    @property
    def f2(self) -> Tri:
        return {TorsionState.ZERO: Tri.YES, TorsionState.NONZERO: Tri.NO}.get(self.tau, Tri.UNKNOWN)


def _guard(dimension: int) -> None:
    if dimension < HIGHDIM_MIN:
        raise ValueError(f"criterion valid only for n >= {HIGHDIM_MIN} (got n = {dimension})")


def highdim_fibred(state: FibredState, dimension: int) -> Tri:
    """Fibred iff F0, F1 and F2 all hold."""
    _guard(dimension)
    conds = (state.f0, state.f1, state.f2)
    if any(c is Tri.NO for c in conds):
        return Tri.NO
    if all(c is Tri.YES for c in conds):
        return Tri.YES
    return Tri.UNKNOWN


def spin_parity_transfer(p: int, p_other: int, fibred_p: Tri, dimension: int) -> Tri:
    """Fibredness of ``S_{p_other}(K)`` given that of ``S_p(K)``."""
    _guard(dimension)
    if p < 1 or p_other < 1:
        raise ValueError("spin orders must be >= 1")
    return fibred_p if p % 2 == p_other % 2 else Tri.UNKNOWN


def iterated_spin_transfer(p: int, l: int, m: int, fibred_m: Tri, dimension: int) -> Tri:
    """Fibredness of the l-fold iterate ``S_p^l(K)`` given that of ``S_p^m(K)``."""
    _guard(dimension)
    if p % 2 == 0:
        raise ValueError("proposition requires odd p")
    if p < 1 or l < 1 or m < 1:
        raise ValueError("spin order and iteration counts must be >= 1")
    return fibred_m
