import random

import pytest
from hypothesis import given, settings, strategies as st

from mnbounds.algebra import (
    LaurentPoly,
    MinorLimitError,
    PolyMatrix,
    cofactor_determinant,
    content_primitive,
    determinant,
    exact_divide,
    laurent_normalize,
    minors,
    primitive_gcd,
    rank_over_field,
)

from conftest import laurent_polys, poly_matrices, random_poly, random_unimodular

P = LaurentPoly.parse


class TestLaurentPoly:
    def test_canonical_form_drops_zeros(self):
        f = LaurentPoly({3: 0, 1: 2, -1: 0})
        assert f.items() == ((1, 2),)
        assert LaurentPoly({0: 0}).is_zero()
        assert LaurentPoly().items() == ()

    def test_render(self):
        assert str(P("2*t^2 - 3*t + 2")) == "2*t^2 - 3*t + 2"
        assert str(LaurentPoly({-1: 1, 0: 1})) == "1 + t^-1"
        assert str(LaurentPoly({1: -1})) == "-t"
        assert str(LaurentPoly()) == "0"

    @pytest.mark.parametrize("text,terms", [
        ("2*t^2 - 3*t + 2", {2: 2, 1: -3, 0: 2}),
        ("t^-1 + 1", {-1: 1, 0: 1}),
        ("  - t ^ 2 +7 ", {2: -1, 0: 7}),
        ("-3*t^-1 - 3", {-1: -3, 0: -3}),
        ("t^(-2)", {-2: 1}),
        ("0", {}),
    ])
    def test_parse(self, text, terms):
        assert P(text) == LaurentPoly(terms)

    @pytest.mark.parametrize("bad", ["", "2**t", "t^", "3 4", "+", "x"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            P(bad)

    @given(laurent_polys())
    def test_parse_render_roundtrip(self, f):
        assert P(str(f)) == f

    def test_shift_multiplies_by_monomial(self):
        f = P("1 - 2*t^2")
        assert f.shift(3) == f * LaurentPoly.monomial(1, 3)

    def test_evaluate(self):
        assert P("2*t^2 - 3*t + 2")(1) == 1
        assert P("t^-1 + 1")(2) == 1.5

    @given(laurent_polys(), laurent_polys(), laurent_polys())
    @settings(max_examples=150)
    def test_ring_axioms(self, f, g, h):
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert f - f == 0


class TestNormalization:
    @pytest.mark.parametrize("f,shift,g", [
        ("t^3 - 2*t^5", 3, "1 - 2*t^2"),
        ("7", 0, "7"),
        ("t^-2 + t^-1", -2, "1 + t"),
    ])
    def test_laurent_normalize(self, f, shift, g):
        assert laurent_normalize(P(f)) == (shift, P(g))

    def test_normalize_zero(self):
        with pytest.raises(ValueError, match="zero has no normalization"):
            laurent_normalize(LaurentPoly())

    @pytest.mark.parametrize("f,c,prim", [
        ("4 - 6*t", 2, "2 - 3*t"),
        ("t^2 - t + 1", 1, "t^2 - t + 1"),
        ("-3*t^-1 - 3", 3, "t^-1 + 1"),
    ])
    def test_content_primitive(self, f, c, prim):
        assert content_primitive(P(f)) == (c, P(prim))

    def test_content_zero(self):
        with pytest.raises(ValueError):
            content_primitive(LaurentPoly())


class TestGcd:
    @pytest.mark.parametrize("f,g,expected", [
        # (t-1)(t+1), (t-1)(t-2): common factor t - 1, sign-normalized to 1 - t
        ("t^2 - 1", "t^2 - 3*t + 2", "1 - t"),
        ("2 - t", "3 - t", "1"),
        ("(2 - t)", "(3 + t)", None),
    ])
    def test_examples(self, f, g, expected):
        if expected is None:
            f = P("2 - t") * P("1 + t")
            g = P("2 - t") * P("3 + t")
            expected = "2 - t"
        else:
            f, g = P(f), P(g)
        assert primitive_gcd(f, g) == P(expected)

    def test_both_zero(self):
        with pytest.raises(ValueError):
            primitive_gcd(LaurentPoly(), LaurentPoly())

    def test_one_zero(self):
        assert primitive_gcd(P("4*t - 6*t^2"), LaurentPoly()) == P("2 - 3*t")

    @given(laurent_polys(max_terms=4, lo=0, hi=5), laurent_polys(max_terms=4, lo=0, hi=5))
    @settings(max_examples=150)
    def test_divides_both(self, f, g):
        if f.is_zero() and g.is_zero():
            return
        d = primitive_gcd(f, g)
        for x in (f, g):
            if x:
                exact_divide(laurent_normalize(x)[1], d)  # raises if inexact over Z

    @given(laurent_polys(max_terms=3, lo=0, hi=4), laurent_polys(max_terms=3, lo=0, hi=4),
           laurent_polys(max_terms=3, lo=0, hi=3))
    @settings(max_examples=150)
    def test_common_factor_pulls_out(self, f, g, h):
        if h.is_zero() or (f.is_zero() and g.is_zero()):
            return
        lhs = primitive_gcd(f * h, g * h)
        rhs = primitive_gcd(f, g) * laurent_normalize(content_primitive(h)[1])[1]
        assert lhs == rhs or lhs == -rhs

    def test_against_sympy(self):
        sympy = pytest.importorskip("sympy")
        t = sympy.Symbol("t")
        rng = random.Random(7)
        for _ in range(60):
            h = random_poly(rng, 2, 3)
            f = random_poly(rng, 3) * h
            g = random_poly(rng, 3) * h
            if f.is_zero() or g.is_zero():
                continue
            ours = primitive_gcd(f, g)
            expr = sympy.gcd(sympy.sympify(str(f).replace("^", "**")), sympy.sympify(str(g).replace("^", "**")))
            poly = sympy.Poly(expr, t)
            # strip t-power and content, then fix the sign of the lowest coefficient
            coeffs = {m[0]: int(c) for m, c in zip(poly.monoms(), poly.coeffs())}
            theirs = content_primitive(laurent_normalize(LaurentPoly(coeffs))[1])[1]
            assert ours == theirs


class TestDeterminant:
    def test_examples(self):
        assert determinant(PolyMatrix([[P("t"), 1], [0, P("t")]])) == P("t^2")
        assert determinant(PolyMatrix.identity(3)) == 1
        # (1 - t) * 1 - t * (-1) = 1
        assert determinant(PolyMatrix([[P("1 - t"), P("t")], [-1, 1]])) == 1

    def test_non_square(self):
        with pytest.raises(ValueError):
            determinant(PolyMatrix([[1, 2]]))

    def test_empty_is_one(self):
        assert determinant(PolyMatrix([], ncols=0)) == 1

    def test_singular(self):
        assert determinant(PolyMatrix([[P("1 + t"), 2], [P("2 + 2*t"), 4]])) == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_bareiss_matches_cofactor(self, n, data):
        M = data.draw(poly_matrices(n, max_terms=3, lo=-2, hi=3, coeff=5))
        assert determinant(M) == cofactor_determinant(M)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_multiplicative(self, n, data):
        A = data.draw(poly_matrices(n, max_terms=2, lo=-1, hi=2, coeff=4))
        B = data.draw(poly_matrices(n, max_terms=2, lo=-1, hi=2, coeff=4))
        assert determinant(A @ B) == determinant(A) * determinant(B)

    def test_unimodular_determinant_is_unit_monomial(self):
        rng = random.Random(3)
        for _ in range(20):
            d = determinant(random_unimodular(rng, 4))
            assert len(d.items()) == 1 and abs(d.lowest_coeff) == 1


class TestRank:
    def test_examples(self):
        assert rank_over_field(PolyMatrix([[2, P("2*t")], [1, P("t")]])) == 1
        assert rank_over_field(PolyMatrix([[2, 0], [0, 1]]), 2) == 1
        assert rank_over_field(PolyMatrix([[P("t^2 - t + 1")]])) == 1

    def test_not_prime(self):
        with pytest.raises(ValueError):
            rank_over_field(PolyMatrix([[1]]), 4)

    def test_rectangular(self):
        M = PolyMatrix([[1, P("t"), 0], [P("t"), P("t^2"), 0]])
        assert rank_over_field(M) == 1
        assert rank_over_field(M.transpose()) == 1
        assert rank_over_field(PolyMatrix.zeros(3, 2)) == 0

    def test_mod_p_vanishing_minor(self):
        # det = 2t - 4 + ... reduces to zero mod 2 only for the row pair
        M = PolyMatrix([[P("1 + t"), P("t")], [P("1 - t"), P("2 - t")]])
        assert determinant(M) == P("2")
        assert rank_over_field(M) == 2
        assert rank_over_field(M, 2) == 1
        assert rank_over_field(M, 3) == 2

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_invariance(self, r, c, seed):
        rng = random.Random(seed)
        M = PolyMatrix([[random_poly(rng, 2, 2) if rng.random() < 0.6 else LaurentPoly()
                         for _ in range(c)] for _ in range(r)], ncols=c)
        base = rank_over_field(M)
        assert 0 <= base <= min(r, c)
        rp = list(range(r)); cp = list(range(c))
        rng.shuffle(rp); rng.shuffle(cp)
        assert rank_over_field(M.permute(rp, cp)) == base
        assert rank_over_field(random_unimodular(rng, r) @ M @ random_unimodular(rng, c)) == base
        for p in (2, 3):
            assert rank_over_field(M.permute(rp, cp), p) == rank_over_field(M, p) <= base


class TestMinors:
    def test_examples(self):
        a, b, c, d = P("1"), P("t"), P("t^2"), P("3")
        assert minors(PolyMatrix([[a, b], [c, d]]), 1) == (a, b, c, d)
        assert minors(PolyMatrix([[a, b], [c, d]]), 0) == (LaurentPoly(1),)
        M = PolyMatrix([[P("1 - t"), P("t"), 0], [-1, 1, P("t")]])
        assert minors(M, 2) == (P("1"), P("t - t^2"), P("t^2"))

    def test_cap(self):
        M = PolyMatrix.identity(6)
        with pytest.raises(MinorLimitError) as exc:
            minors(M, 3, cap=100)
        assert exc.value.count == 400
        assert "minor enumeration too large" in str(exc.value)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            minors(PolyMatrix.identity(2), 3)


class TestMatrix:
    def test_bounds(self):
        M = PolyMatrix([[1, 2]])
        with pytest.raises(IndexError):
            M[1, 0]
        assert M.shape == (1, 2)

    def test_ragged(self):
        with pytest.raises(ValueError):
            PolyMatrix([[1, 2], [3]])

    def test_exact_divide_rejects(self):
        with pytest.raises(ArithmeticError):
            exact_divide(P("t + 1"), P("2"))
        assert exact_divide(P("2*t^-1 + 2"), P("1 + t")) == P("2*t^-1")
