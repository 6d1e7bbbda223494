import pytest
from hypothesis import given, settings, strategies as st

from mnbounds.algebra import LaurentPoly, PolyMatrix, determinant, laurent_normalize
from mnbounds.knotio import braid_to_pd, parse_braid, parse_pd
from mnbounds.novikov import ModulePresentation
from mnbounds.wirtinger import (
    GroupWord,
    WirtingerPresentation,
    alexander_from_pd,
    alexander_polynomial,
    alexander_presentation,
    fox_derivative,
    fox_matrix,
    is_monic,
    validate_knot_polynomial,
    wirtinger_from_pd,
)

from test_knotio import TREFOIL_PD, knot_braids

P = LaurentPoly.parse
X, Y, Z = 0, 1, 2
ONES = (1, 1, 1)

# KnotInfo / Rolfsen table values
TABLE = {
    "unknot": "1",
    "3_1": "t^2 - t + 1",
    "4_1": "t^2 - 3*t + 1",
    "5_1": "t^4 - t^3 + t^2 - t + 1",
    "5_2": "2*t^2 - 3*t + 2",
    "6_1": "2*t^2 - 5*t + 2",
    "6_2": "t^4 - 3*t^3 + 3*t^2 - 3*t + 1",
    "6_3": "t^4 - 3*t^3 + 5*t^2 - 3*t + 1",
    "7_1": "t^6 - t^5 + t^4 - t^3 + t^2 - t + 1",
    "7_2": "3*t^2 - 5*t + 3",
}


def word(*letters):
    return GroupWord(letters)


def burau_alexander(braid):
    """Independent oracle: det(I - reduced Burau) / (1 + t + ... + t^(n-1))."""
    sympy = pytest.importorskip("sympy")
    t = sympy.Symbol("t")
    n = braid.strands
    m = n - 1

    def gen(i):
        M = sympy.eye(m)
        r = i - 1
        M[r, r] = -t
        if r > 0:
            M[r, r - 1] = t
        if r < m - 1:
            M[r, r + 1] = 1
        return M

    B = sympy.eye(m)
    for x in braid.letters:
        g = gen(abs(x))
        B = B * (g if x > 0 else g.inv())
    num = sympy.cancel((sympy.eye(m) - B).det() / sum(t ** k for k in range(n)))
    num, den = sympy.fraction(sympy.together(num))
    poly = sympy.Poly(sympy.expand(num), t)
    den_poly = sympy.Poly(sympy.expand(den), t)
    assert len(den_poly.terms()) == 1
    f = LaurentPoly({e[0]: int(c) for e, c in poly.terms()})
    _, g = laurent_normalize(f)
    return g if g.lowest_coeff > 0 else -g


class TestFox:
    def test_examples(self):
        r = word((X, 1), (Y, 1), (X, 1), (Y, -1), (X, -1), (Y, -1))
        assert fox_derivative(r, X, (1, 1)) == P("1 - t + t^2")
        assert fox_derivative(word((X, 1), (Y, 1), (X, -1), (Y, -1)), X, (1, 1)) == P("1 - t")
        assert fox_derivative(word((X, 1)), Y, (1, 1)) == 0
        assert fox_derivative(word((X, -1)), X, (1, 1)) == P("-t^-1")

    @given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=8),
           st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=8),
           st.integers(0, 2))
    def test_product_rule(self, u, v, j):
        u, v = GroupWord(tuple(u)), GroupWord(tuple(v))
        xi_u = LaurentPoly.monomial(1, u.exponent_sum(ONES))
        assert fox_derivative(u + v, j, ONES) == fox_derivative(u, j, ONES) + xi_u * fox_derivative(v, j, ONES)

    @given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=10))
    def test_fundamental_formula(self, letters):
        w = GroupWord(tuple(letters))
        total = sum((fox_derivative(w, j, ONES) for j in range(3)), LaurentPoly())
        assert total * P("t - 1") == LaurentPoly.monomial(1, w.exponent_sum(ONES)) - 1

    def test_inverse_word(self):
        w = word((X, 1), (Y, -1), (Z, 1))
        for j in range(3):
            lhs = fox_derivative(w.inverse(), j, ONES)
            rhs = -LaurentPoly.monomial(1, -w.exponent_sum(ONES)) * fox_derivative(w, j, ONES)
            assert lhs == rhs

    def test_bad_letters(self):
        with pytest.raises(ValueError):
            GroupWord(((0, 2),))
        with pytest.raises(ValueError):
            WirtingerPresentation(1, (word((1, 1)),), (1,))


class TestWirtinger:
    def test_trefoil_structure(self):
        pres = wirtinger_from_pd(parse_pd(TREFOIL_PD))
        assert pres.ngens == 3 and len(pres.relators) == 3
        assert all(r.exponent_sum(pres.xi) == 0 for r in pres.relators)

    def test_figure_eight(self, seed_db):
        pres = wirtinger_from_pd(seed_db["4_1"].pd)
        assert pres.ngens == 4 and len(pres.relators) == 4

    def test_empty(self):
        from mnbounds.knotio import PDCode
        pres = wirtinger_from_pd(PDCode(()))
        assert (pres.ngens, pres.relators) == (1, ())
        assert alexander_presentation(pres).generators == 0
        assert alexander_polynomial(alexander_presentation(pres)) == 1

    @given(knot_braids(max_strands=4, max_len=9))
    @settings(max_examples=80, deadline=None)
    def test_row_sums_vanish(self, b):
        pres = wirtinger_from_pd(braid_to_pd(b))
        assert pres.ngens == len(pres.relators) or len(b.letters) == 0
        F = fox_matrix(pres)
        for i in range(F.rows):
            assert sum(F.row(i), LaurentPoly()) * P("t - 1") == 0


class TestAlexander:
    def test_trefoil_matrix(self):
        A = alexander_presentation(wirtinger_from_pd(parse_pd(TREFOIL_PD)))
        assert A.relations.shape == (2, 2)
        _, d = laurent_normalize(determinant(A.relations))
        assert d in (P("t^2 - t + 1"), -P("t^2 - t + 1"))

    def test_5_2_matrix(self, seed_db):
        for pd in (seed_db["5_2"].pd, braid_to_pd(seed_db["5_2"].braid)):
            A = alexander_presentation(wirtinger_from_pd(pd))
            assert A.relations.shape == (len(pd) - 1, len(pd) - 1)
            _, d = laurent_normalize(determinant(A.relations))
            assert d in (P("2*t^2 - 3*t + 2"), -P("2*t^2 - 3*t + 2"))

    def test_examples(self):
        assert alexander_from_pd(parse_pd(TREFOIL_PD)) == P("t^2 - t + 1")
        assert alexander_from_pd(braid_to_pd(parse_braid("s=3; w=1,-2,1,-2"))) == P("t^2 - 3*t + 1")

    def test_not_torsion(self):
        with pytest.raises(ValueError, match="presentation is not L-torsion"):
            alexander_polynomial(ModulePresentation(1, PolyMatrix([[0]])))

    def test_non_square(self):
        with pytest.raises(ValueError):
            alexander_polynomial(ModulePresentation(2, PolyMatrix([[1, 2]])))

    def test_seed_table(self, seed_records):
        for rec in seed_records:
            expected = P(TABLE[rec.name])
            for pd in filter(None, (rec.pd, rec.braid and braid_to_pd(rec.braid))):
                delta = alexander_from_pd(pd)
                assert delta == expected, rec.name
                assert validate_knot_polynomial(delta)

    def test_seed_against_burau(self, seed_records):
        for rec in seed_records:
            if rec.braid is not None:
                assert burau_alexander(rec.braid) == P(TABLE[rec.name]), rec.name

    @given(knot_braids(max_strands=4, max_len=8))
    @settings(max_examples=40, deadline=None)
    def test_random_braids_against_burau(self, b):
        delta = alexander_from_pd(braid_to_pd(b))
        assert delta == burau_alexander(b)
        assert validate_knot_polynomial(delta)

    def test_any_deleted_row_and_column(self, seed_db):
        pres = wirtinger_from_pd(seed_db["6_1"].pd)
        for i in range(pres.ngens):
            for j in range(pres.ngens):
                assert alexander_polynomial(alexander_presentation(pres, i, j)) == P(TABLE["6_1"])


class TestPredicates:
    @pytest.mark.parametrize("f,expected", [
        ("t^2 - t + 1", True),
        ("2*t^2 - 3*t + 2", True),
        ("t - 2", False),
        ("t - 1", False),
        ("1", True),
        ("0", False),
        ("t^2 - 3*t + 2", False),
    ])
    def test_validate(self, f, expected):
        assert validate_knot_polynomial(P(f)) is expected

    @pytest.mark.parametrize("f,expected", [
        ("t^2 - t + 1", True),
        ("2*t^2 - 3*t + 2", False),
        ("1", True),
        ("0", False),
        ("2*t^2 - 3*t + 1", False),
        ("-t^4 + 3*t - 1", True),
    ])
    def test_monic(self, f, expected):
        assert is_monic(P(f)) is expected

    def test_monic_matches_seed_fibredness(self, seed_records):
        # monic and fibred coincide for the alternating seed knots
        for rec in seed_records:
            assert is_monic(P(TABLE[rec.name])) == (rec.fibred.value == "yes"), rec.name
