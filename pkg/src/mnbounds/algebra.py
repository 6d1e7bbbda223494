"""Exact Laurent polynomials in one variable ``t`` over the integers, and
matrices of them.

Everything here is immutable and exact: coefficients are Python ints (or
reduced residues when a prime modulus is requested), never floats.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "LaurentPoly",
    "PolyMatrix",
    "MinorLimitError",
    "DEFAULT_MINOR_CAP",
    "laurent_normalize",
    "content_primitive",
    "primitive_gcd",
    "exact_divide",
    "determinant",
    "cofactor_determinant",
    "rank_over_field",
    "minors",
    "is_prime",
]

DEFAULT_MINOR_CAP = 20_000

Scalar = Union[int, "LaurentPoly"]


class MinorLimitError(ValueError):
    """Raised when a minor enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"minor enumeration too large: {count} minors (cap {cap})")
        self.count = count
        self.cap = cap


class LaurentPoly:
    """Sparse integer Laurent polynomial ``sum c_e t^e``.

    Terms are kept sorted by exponent with zero coefficients removed, so two
    equal polynomials always have identical internal state.

    >>> f = LaurentPoly({2: 2, 1: -3, 0: 2})
    >>> str(f)
    '2*t^2 - 3*t + 2'
    >>> f * LaurentPoly.monomial(1, -1)
    LaurentPoly('2*t - 3 + 2*t^-1')
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping[int, int], Iterable[tuple[int, int]], int, None] = None):
        if terms is None:
            items: Iterable[tuple[int, int]] = ()
        elif isinstance(terms, int):
            items = ((0, terms),)
        elif isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict[int, int] = {}
        for e, c in items:
            if not isinstance(e, int) or not isinstance(c, int):
                raise TypeError("exponents and coefficients must be integers")
            acc[e] = acc.get(e, 0) + c
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0))

    @classmethod
    def _raw(cls, items: tuple[tuple[int, int], ...]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._terms = items
        return obj

    @classmethod
    def monomial(cls, coeff: int, exponent: int = 0) -> "LaurentPoly":
        return cls({exponent: coeff})

    @classmethod
    def coerce(cls, value: Scalar) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, int):
            return cls(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to LaurentPoly")

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> tuple[tuple[int, int], ...]:
        """(exponent, coefficient) pairs in ascending exponent order."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def low(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no lowest exponent")
        return self._terms[0][0]

    @property
    def high(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no highest exponent")
        return self._terms[-1][0]

    @property
    def lowest_coeff(self) -> int:
        return self._terms[0][1] if self._terms else 0

    @property
    def highest_coeff(self) -> int:
        return self._terms[-1][1] if self._terms else 0

    def coeff(self, exponent: int) -> int:
        for e, c in self._terms:
            if e == exponent:
                return c
        return 0

    def span(self) -> int:
        """Difference between highest and lowest exponent (0 for zero)."""
        return self.high - self.low if self._terms else 0

    def max_abs_exponent(self) -> int:
        return max((abs(e) for e, _ in self._terms), default=0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Scalar) -> "LaurentPoly":
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(tuple((e, -c) for e, c in self._terms))

    def __sub__(self, other: Scalar) -> "LaurentPoly":
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "LaurentPoly":
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other: Scalar) -> "LaurentPoly":
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return LaurentPoly._raw(tuple((e, c * other) for e, c in self._terms))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self._terms) != 1 or abs(self._terms[0][1]) != 1:
                raise ValueError("only unit monomials have negative powers")
            e, c = self._terms[0]
            return LaurentPoly.monomial(c ** (-n), e * n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t**k``."""
        return LaurentPoly._raw(tuple((e + k, c) for e, c in self._terms))

    def inverse_variable(self) -> "LaurentPoly":
        """Substitute ``t -> 1/t``."""
        return LaurentPoly((-e, c) for e, c in self._terms)

    def reduce_mod(self, p: int) -> "LaurentPoly":
        return LaurentPoly((e, c % p) for e, c in self._terms)

    def __call__(self, x: Union[int, Fraction]) -> Union[int, Fraction]:
        total: Union[int, Fraction] = 0
        for e, c in self._terms:
            total += c * (Fraction(x) ** e if e < 0 else x ** e)
        return total

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (e, c) in enumerate(reversed(self._terms)):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                var = "t" if e == 1 else f"t^{e}"
                body = var if mag == 1 else f"{mag}*{var}"
            if i == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Parse the rendering grammar, e.g. ``2*t^2 - 3*t + 2`` or ``t^-1 + 1``."""
        if re.search(r"[\dt)]\s+[\dt(]", text):
            raise ValueError(f"missing operator in {text!r}")
        s = text.replace(" ", "").replace("\t", "")
        if not s:
            raise ValueError("empty polynomial text")
        pos = 0
        acc: dict[int, int] = {}
        first = True
        while pos < len(s):
            m = _TERM_RE.match(s, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"malformed polynomial at position {pos}: {text!r}")
            sign, coeff, var, exp = m.group("sign", "coeff", "var", "exp")
            if not first and not sign:
                raise ValueError(f"missing operator at position {pos}: {text!r}")
            if coeff is None and var is None:
                raise ValueError(f"empty term at position {pos}: {text!r}")
            if m.group("star") and (coeff is None or var is None):
                raise ValueError(f"stray '*' at position {pos}: {text!r}")
            c = int(coeff) if coeff is not None else 1
            if sign == "-":
                c = -c
            e = 0
            if var is not None:
                e = int(exp.strip("()")) if exp is not None else 1
            acc[e] = acc.get(e, 0) + c
            pos = m.end()
            first = False
        return cls(acc)


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?(?P<coeff>\d+)?(?P<star>\*)?(?:(?P<var>t)(?:\^(?P<exp>-?\d+|\(-?\d+\)))?)?"
)

ZERO = LaurentPoly()
ONE = LaurentPoly(1)
T = LaurentPoly({1: 1})


def laurent_normalize(f: LaurentPoly) -> tuple[int, LaurentPoly]:
    """Split ``f = t**shift * g`` with ``g`` having lowest exponent 0."""
    if f.is_zero():
        raise ValueError("zero has no normalization")
    shift = f.low
    return shift, f.shift(-shift)


def content_primitive(f: LaurentPoly) -> tuple[int, LaurentPoly]:
    """Return ``(content, prim)`` with ``f = ±content * prim``.

    ``prim`` has coprime coefficients and a positive lowest coefficient.
    """
    if f.is_zero():
        raise ValueError("zero has no content")
    content = 0
    for _, c in f.items():
        content = math.gcd(content, c)
    sign = 1 if f.lowest_coeff > 0 else -1
    prim = LaurentPoly._raw(tuple((e, sign * c // content) for e, c in f.items()))
    return content, prim


def _to_qpoly(f: LaurentPoly) -> list[Fraction]:
    """Dense ascending coefficient list of the t-normalized f."""
    _, g = laurent_normalize(f)
    coeffs = [Fraction(0)] * (g.high + 1)
    for e, c in g.items():
        coeffs[e] = Fraction(c)
    return coeffs


def _qpoly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = a[:]
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        q = a[-1] / lead
        off = len(a) - len(b)
        for i, bc in enumerate(b):
            a[off + i] -= q * bc
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _primitive_from_q(coeffs: Sequence[Fraction]) -> LaurentPoly:
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    ints = {e: int(c * denom) for e, c in enumerate(coeffs) if c}
    _, prim = content_primitive(LaurentPoly(ints))
    return prim


def primitive_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Primitive gcd in Z[t] of the t-normalized primitive parts of f and g.

    Computed by the Euclidean algorithm over Q[t]; the result has a nonzero
    constant term and a positive lowest coefficient.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    if f.is_zero():
        f, g = g, f
    a = _to_qpoly(f)
    if g.is_zero():
        return _primitive_from_q(a)
    b = _to_qpoly(g)
    while b:
        a, b = b, _qpoly_rem(a, b)
    return _primitive_from_q(a)


def exact_divide(f: LaurentPoly, g: LaurentPoly, modulus: int | None = None) -> LaurentPoly:
    """Quotient ``f / g`` in Z[t, 1/t] (or F_p[t, 1/t]); raises if inexact."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return ZERO
    fs, fn = laurent_normalize(f)
    gs, gn = laurent_normalize(g)
    rem = dict(fn.items())
    gitems = gn.items()
    gdeg, glead = gn.high, gn.highest_coeff
    inv = pow(glead, -1, modulus) if modulus else None
    quot: dict[int, int] = {}
    deg = fn.high
    while rem:
        deg = max(rem)
        if deg < gdeg:
            raise ArithmeticError(f"{f} is not divisible by {g}")
        lead = rem[deg]
        if modulus:
            q = lead * inv % modulus
        else:
            q, r = divmod(lead, glead)
            if r:
                raise ArithmeticError(f"{f} is not divisible by {g}")
        off = deg - gdeg
        quot[off] = q
        for e, c in gitems:
            v = rem.get(e + off, 0) - q * c
            if modulus:
                v %= modulus
            if v:
                rem[e + off] = v
            else:
                rem.pop(e + off, None)
    return LaurentPoly(quot).shift(fs - gs)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


class PolyMatrix:
    """Immutable rectangular matrix of Laurent polynomials."""

    __slots__ = ("_rows", "_nrows", "_ncols")

    def __init__(self, rows: Iterable[Iterable[Scalar]], ncols: int | None = None):
        data = tuple(tuple(LaurentPoly.coerce(x) for x in row) for row in rows)
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise ValueError("ragged matrix rows")
        if data:
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise ValueError(f"expected {ncols} columns, got {width}")
        else:
            width = ncols or 0
        self._rows = data
        self._nrows = len(data)
        self._ncols = width

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls([[0] * cols for _ in range(rows)], ncols=cols)

    @classmethod
    def diagonal(cls, entries: Sequence[Scalar]) -> "PolyMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @property
    def rows(self) -> int:
        return self._nrows

    @property
    def cols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    def row(self, i: int) -> tuple[LaurentPoly, ...]:
        return self._rows[i]

    def to_lists(self) -> list[list[LaurentPoly]]:
        return [list(r) for r in self._rows]

    def __iter__(self) -> Iterator[tuple[LaurentPoly, ...]]:
        return iter(self._rows)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        if not (0 <= i < self._nrows and 0 <= j < self._ncols):
            raise IndexError(f"entry {ij} out of bounds for shape {self.shape}")
        return self._rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"PolyMatrix([{body}])"

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self._ncols != other._nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for row in self._rows:
            new = []
            for j in range(other._ncols):
                acc = ZERO
                for k, a in enumerate(row):
                    if a:
                        b = other._rows[k][j]
                        if b:
                            acc = acc + a * b
                new.append(acc)
            out.append(new)
        return PolyMatrix(out, ncols=other._ncols)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(zip(*self._rows), ncols=self._nrows) if self._rows else PolyMatrix([], ncols=0)

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(x) for x in r] for r in self._rows], ncols=self._ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self._rows[i][j] for j in cols] for i in rows], ncols=len(cols))

    def delete(self, row: int | None = None, col: int | None = None) -> "PolyMatrix":
        rows = [i for i in range(self._nrows) if i != row]
        cols = [j for j in range(self._ncols) if j != col]
        return self.submatrix(rows, cols)

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "PolyMatrix":
        return self.submatrix(row_perm, col_perm)


def _eliminate(rows: list[list[LaurentPoly]], ncols: int, modulus: int | None) -> tuple[int, int, list[list[LaurentPoly]]]:
    """Fraction-free (Bareiss) row echelon reduction in place.

    Returns (rank, sign of the row permutation, reduced rows).  Every
    division is exact because each intermediate entry is a minor of the
    input.
    """
    m = len(rows)
    r = 0
    sign = 1
    prev = ONE
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        p = rows[r][c]
        for i in range(r + 1, m):
            a = rows[i][c]
            for j in range(c + 1, ncols):
                v = p * rows[i][j] - a * rows[r][j]
                if modulus:
                    v = v.reduce_mod(modulus)
                rows[i][j] = exact_divide(v, prev, modulus) if v else ZERO
            rows[i][c] = ZERO
        prev = p
        r += 1
    return r, sign, rows


def determinant(M: PolyMatrix) -> LaurentPoly:
    """Exact determinant by fraction-free elimination."""
    if M.rows != M.cols:
        raise ValueError(f"determinant of non-square matrix {M.shape}")
    n = M.rows
    if n == 0:
        return ONE
    rank, sign, red = _eliminate(M.to_lists(), n, None)
    if rank < n:
        return ZERO
    return red[n - 1][n - 1] * sign


def cofactor_determinant(M: PolyMatrix) -> LaurentPoly:
    """Laplace expansion along the first row; exponential, for cross-checks."""
    if M.rows != M.cols:
        raise ValueError(f"determinant of non-square matrix {M.shape}")
    n = M.rows
    if n == 0:
        return ONE
    total = ZERO
    for j in range(n):
        a = M[0, j]
        if a:
            sub = M.submatrix(range(1, n), [k for k in range(n) if k != j])
            term = a * cofactor_determinant(sub)
            total = total + term if j % 2 == 0 else total - term
    return total


def rank_over_field(M: PolyMatrix, p: int | None = None) -> int:
    """Rank over Q(t), or over F_p(t) when a prime ``p`` is given."""
    if p is not None and not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows = M.to_lists()
    if p is not None:
        rows = [[x.reduce_mod(p) for x in r] for r in rows]
    rank, _, _ = _eliminate(rows, M.cols, p)
    return rank


def minors(M: PolyMatrix, k: int, cap: int = DEFAULT_MINOR_CAP) -> tuple[LaurentPoly, ...]:
    """All k-by-k minors in lexicographic (row subset, column subset) order."""
    if not 0 <= k <= min(M.rows, M.cols):
        raise ValueError(f"minor size {k} out of range for shape {M.shape}")
    if k == 0:
        return (ONE,)
    count = math.comb(M.rows, k) * math.comb(M.cols, k)
    if count > cap:
        raise MinorLimitError(count, cap)
    col_sets = list(combinations(range(M.cols), k))
    return tuple(
        determinant(M.submatrix(rs, cs))
        for rs in combinations(range(M.rows), k)
        for cs in col_sets
    )
