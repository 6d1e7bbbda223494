"""Wirtinger presentations, abelianized Fox calculus and Alexander
polynomials.

Fox derivatives are taken directly in Z[t, 1/t]: each generator ``x_j`` is
sent to ``t**xi[j]`` as soon as it is read, so no free-group arithmetic is
ever done.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import LaurentPoly, PolyMatrix, ZERO, determinant, laurent_normalize
from .knotio import PDCode, pd_traversal
from .novikov import ModulePresentation

__all__ = [
    "GroupWord",
    "WirtingerPresentation",
    "wirtinger_from_pd",
    "fox_derivative",
    "fox_matrix",
    "alexander_presentation",
    "alexander_polynomial",
    "validate_knot_polynomial",
    "is_monic",
    "alexander_from_pd",
]


@dataclass(frozen=True)
class GroupWord:
    """Word in the free group, as (generator index, +-1) letters."""

    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(tuple(x) for x in self.letters))
        for g, e in self.letters:
            if e not in (1, -1) or g < 0:
                raise ValueError(f"bad letter ({g}, {e})")

    def __add__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def exponent_sum(self, xi: tuple[int, ...]) -> int:
        return sum(e * xi[g] for g, e in self.letters)


@dataclass(frozen=True)
class WirtingerPresentation:
    ngens: int
    relators: tuple[GroupWord, ...]
    xi: tuple[int, ...]

    def __post_init__(self):
        if len(self.xi) != self.ngens:
            raise ValueError("xi needs one entry per generator")
        for r in self.relators:
            for g, _ in r.letters:
                if g >= self.ngens:
                    raise ValueError(f"generator {g} out of range")


def _arcs(pd: PDCode) -> dict[int, int]:
    """Map each edge label to its Wirtinger arc index (arcs ordered by least label)."""
    parent = {lab: lab for x in pd.crossings for lab in x}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for _, b, _, d in pd.crossings:
        ra, rb = find(b), find(d)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(lab) for lab in parent})
    index = {r: i for i, r in enumerate(roots)}
    return {lab: index[find(lab)] for lab in parent}


def wirtinger_from_pd(pd: PDCode) -> WirtingerPresentation:
    """One generator per arc, one relator ``x_o^e x_in x_o^-e x_out^-1`` per crossing."""
    if len(pd) == 0:
        return WirtingerPresentation(1, (), (1,))
    signs, _ = pd_traversal(pd.crossings)
    arc = _arcs(pd)
    n = len(set(arc.values()))
    relators = []
    for (a, b, c, _), eps in zip(pd.crossings, signs):
        xo, xin, xout = arc[b], arc[a], arc[c]
        relators.append(GroupWord(((xo, eps), (xin, 1), (xo, -eps), (xout, -1))))
    return WirtingerPresentation(n, tuple(relators), (1,) * n)


def fox_derivative(word: GroupWord, j: int, xi: tuple[int, ...]) -> LaurentPoly:
    """Abelianized ``∂word/∂x_j`` with ``x_k -> t**xi[k]``."""
    acc: dict[int, int] = {}
    prefix = 0
    for g, e in word.letters:
        if g == j:
            if e == 1:
                acc[prefix] = acc.get(prefix, 0) + 1
            else:
                acc[prefix - xi[g]] = acc.get(prefix - xi[g], 0) - 1
        prefix += e * xi[g]
    return LaurentPoly(acc)


def fox_matrix(pres: WirtingerPresentation) -> PolyMatrix:
    return PolyMatrix(
        [[fox_derivative(r, j, pres.xi) for j in range(pres.ngens)] for r in pres.relators],
        ncols=pres.ngens,
    )


def alexander_presentation(pres: WirtingerPresentation, row: int | None = None,
                           col: int | None = None) -> ModulePresentation:
    """Fox matrix with one relator row and one generator column removed.

    Defaults drop the last row and the last column.
    """
    if pres.ngens < 2 or not pres.relators:
        return ModulePresentation(0, PolyMatrix([], ncols=0))
    if any(x != 1 for x in pres.xi):
        raise ValueError("alexander_presentation expects a Wirtinger-type presentation")
    F = fox_matrix(pres)
    row = F.rows - 1 if row is None else row
    col = F.cols - 1 if col is None else col
    M = F.delete(row, col)
    return ModulePresentation(M.cols, M)


def alexander_polynomial(P: ModulePresentation) -> LaurentPoly:
    """Determinant of a square presentation, normalized to ``Δ(0) > 0`` with
    lowest exponent 0."""
    if P.relations.rows != P.relations.cols:
        raise ValueError("alexander_polynomial needs a square presentation")
    d = determinant(P.relations)
    if d.is_zero():
        raise ValueError("presentation is not L-torsion")
    _, g = laurent_normalize(d)
    return g if g.lowest_coeff > 0 else -g


def validate_knot_polynomial(delta: LaurentPoly) -> bool:
    """``Δ(1) = ±1`` and ``Δ(t) = ±t^k Δ(1/t)``."""
    if delta.is_zero() or abs(delta(1)) != 1:
        return False
    _, a = laurent_normalize(delta)
    _, b = laurent_normalize(delta.inverse_variable())
    return a == b or a == -b


def is_monic(delta: LaurentPoly) -> bool:
    return not delta.is_zero() and abs(delta.lowest_coeff) == 1 and abs(delta.highest_coeff) == 1


def alexander_from_pd(pd: PDCode) -> LaurentPoly:
    return alexander_polynomial(alexander_presentation(wirtinger_from_pd(pd)))
