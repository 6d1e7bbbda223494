"""Decision procedures in the Novikov ring Z((t)) and Novikov Betti/torsion
numbers of finitely presented Z[t, 1/t]-modules.

Z((t)) is the ring of integer Laurent series with finitely many negative
exponents; it completes towards positive powers of ``t``.  A series is a
unit exactly when its lowest coefficient is +-1.

Invariant factors over Z((t)) are never materialized.  Only their number is
needed, and it is read off the Fitting ideals: if ``g_k`` is the gcd of the
k-by-k minors, then ``g_k`` is a unit for ``k <= k*`` and not beyond, and the
count of non-unit invariant factors is ``rank - k*``.

Why ``unit_gcd`` is complete for Laurent-polynomial inputs: the maximal
ideals of Z((t)) are ``(p)`` for rational primes ``p`` and ``(pi)`` for
irreducible series with ``|pi(0)| >= 2``.  After dividing out the primitive
Q[t]-gcd ``g`` the cofactors are coprime over Q[t], so their Z[t]-ideal
contains a nonzero integer ``N``; any maximal ideal containing them contains
``N`` and hence is ``(p)`` for some ``p | N``, which is exactly a common
prime of the cofactor contents.  ``g`` itself is a unit iff ``g(0) = +-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from .algebra import (
    DEFAULT_MINOR_CAP,
    LaurentPoly,
    PolyMatrix,
    ZERO,
    content_primitive,
    exact_divide,
    laurent_normalize,
    minors,
    primitive_gcd,
    rank_over_field,
)

__all__ = [
    "ModulePresentation",
    "NovikovProfile",
    "UnitGcdVerdict",
    "UnitElement",
    "IntegerObstruction",
    "PolynomialObstruction",
    "CombinationCertificate",
    "KnotModuleError",
    "is_unit",
    "unit_gcd",
    "torsion_count",
    "fp_lower_bound",
    "knot_profile",
]


class KnotModuleError(ValueError):
    """The module cannot be the Alexander module of a knot."""


@dataclass(frozen=True)
class ModulePresentation:
    """``coker(relations)`` with one column per generator, one row per relator."""

    generators: int
    relations: PolyMatrix

    def __post_init__(self):
        if self.relations.cols != self.generators and self.relations.rows:
            raise ValueError(
                f"relation matrix has {self.relations.cols} columns for {self.generators} generators"
            )

    @classmethod
    def from_matrix(cls, m: PolyMatrix) -> "ModulePresentation":
        return cls(m.cols, m)

    @classmethod
    def cyclic(cls, f: LaurentPoly) -> "ModulePresentation":
        return cls(1, PolyMatrix([[f]]))


@dataclass(frozen=True)
class UnitElement:
    index: int


@dataclass(frozen=True)
class IntegerObstruction:
    prime: int


@dataclass(frozen=True)
class PolynomialObstruction:
    g: LaurentPoly


@dataclass(frozen=True)
class CombinationCertificate:
    """Unit ideal certified by the gcd test without any single unit member."""


Witness = Union[UnitElement, IntegerObstruction, PolynomialObstruction, CombinationCertificate]


@dataclass(frozen=True)
class UnitGcdVerdict:
    is_unit: bool
    witness: Witness


@dataclass(frozen=True)
class NovikovProfile:
    """Per-degree (betti, torsion) counts in degrees ``0..top_degree``."""

    top_degree: int
    entries: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if len(self.entries) != self.top_degree + 1:
            raise ValueError(f"expected {self.top_degree + 1} entries, got {len(self.entries)}")
        for b, q in self.entries:
            if b < 0 or q < 0:
                raise ValueError("profile entries must be nonnegative")

    @classmethod
    def from_torsion(cls, torsion: Sequence[int], betti: Sequence[int] | None = None) -> "NovikovProfile":
        betti = betti if betti is not None else [0] * len(torsion)
        return cls(len(torsion) - 1, tuple(zip(betti, torsion)))

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.entries)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.entries)

    def q(self, k: int) -> int:
        return self.entries[k][1] if 0 <= k <= self.top_degree else 0

    def b(self, k: int) -> int:
        return self.entries[k][0] if 0 <= k <= self.top_degree else 0

    def is_zero(self) -> bool:
        return all(b == 0 and q == 0 for b, q in self.entries)


def is_unit(f: LaurentPoly) -> bool:
    """Unit test in Z((t)): nonzero with lowest coefficient +-1."""
    return not f.is_zero() and abs(f.lowest_coeff) == 1


def _smallest_prime_factor(n: int) -> int:
    n = abs(n)
    if n % 2 == 0:
        return 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return d
        d += 2
    return n


def unit_gcd(S: Sequence[LaurentPoly]) -> UnitGcdVerdict:
    """Decide whether ``S`` generates the unit ideal of Z((t))."""
    if len(S) == 0:
        raise ValueError("unit_gcd needs a nonempty sequence")
    for i, f in enumerate(S):
        if is_unit(f):
            return UnitGcdVerdict(True, UnitElement(i))
    members = [laurent_normalize(f)[1] for f in S if f]
    if not members:
        return UnitGcdVerdict(False, PolynomialObstruction(ZERO))
    g = members[0]
    g = content_primitive(g)[1]
    for f in members[1:]:
        g = primitive_gcd(g, f)
    if abs(g.coeff(0)) != 1:
        return UnitGcdVerdict(False, PolynomialObstruction(g))
    c = 0
    for f in members:
        c = math.gcd(c, content_primitive(exact_divide(f, g))[0])
    if c != 1:
        return UnitGcdVerdict(False, IntegerObstruction(_smallest_prime_factor(c)))
    return UnitGcdVerdict(True, CombinationCertificate())


def torsion_count(P: ModulePresentation, max_minors: int = DEFAULT_MINOR_CAP) -> tuple[int, int]:
    """(free rank, number of non-unit invariant factors) of ``coker ⊗ Z((t))``."""
    M = P.relations
    n = P.generators
    if M.rows == 0 or n == 0:
        return n, 0
    r = rank_over_field(M)
    free_rank = n - r
    for k in range(r, 0, -1):
        if unit_gcd(minors(M, k, max_minors)).is_unit:
            return free_rank, r - k
    return free_rank, r


def fp_lower_bound(P: ModulePresentation, primes: Sequence[int]) -> int:
    """Lower bound for the torsion count from coranks over F_p(t).

    Each residue field F_p((t)) of Z((t)) sees every invariant factor that
    ``p`` divides, so the corank beyond the free rank never exceeds the
    torsion count.
    """
    if not primes:
        raise ValueError("at least one prime is required")
    n = P.generators
    if P.relations.rows == 0:
        return 0
    free_rank = n - rank_over_field(P.relations)
    return max(n - rank_over_field(P.relations, p) for p in primes) - free_rank


def knot_profile(alex: ModulePresentation, dimension: int = 1,
                 max_minors: int = DEFAULT_MINOR_CAP) -> NovikovProfile:
    """Novikov profile of a classical knot complement from its Alexander module."""
    if dimension != 1:
        raise ValueError("knot_profile handles classical knots (dimension 1) only")
    free_rank, q = torsion_count(alex, max_minors)
    if free_rank > 0:
        raise KnotModuleError("input module is not a knot Alexander module (positive free rank)")
    n = alex.generators
    if n and alex.relations.rows:
        order_gcd = 0
        for m in minors(alex.relations, n, max_minors):
            order_gcd = math.gcd(order_gcd, int(m(1)))
        if order_gcd != 1:
            raise KnotModuleError(
                f"input module is not a knot Alexander module (order ideal at t=1 is ({order_gcd}))"
            )
    return NovikovProfile(3, ((0, 0), (0, q), (0, 0), (0, 0)))
