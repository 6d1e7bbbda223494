import random

import pytest
from hypothesis import strategies as st

from mnbounds.algebra import LaurentPoly, PolyMatrix
from mnbounds.knotio import default_db_path, load_db

P = LaurentPoly.parse


@pytest.fixture(scope="session")
def seed_records():
    return load_db(default_db_path())


@pytest.fixture(scope="session")
def seed_db(seed_records):
    return {r.name: r for r in seed_records}


def laurent_polys(max_terms=5, lo=-4, hi=8, coeff=9):
    return st.dictionaries(
        st.integers(lo, hi), st.integers(-coeff, coeff), max_size=max_terms
    ).map(LaurentPoly)


def poly_matrices(n, **kw):
    return st.lists(
        st.lists(laurent_polys(**kw), min_size=n, max_size=n), min_size=n, max_size=n
    ).map(lambda rows: PolyMatrix(rows, ncols=n))


def random_poly(rng: random.Random, max_deg=3, coeff=5, lo=0):
    return LaurentPoly({e: rng.randint(-coeff, coeff) for e in range(lo, max_deg + 1)})


def random_unimodular(rng: random.Random, n: int, ops: int = 6) -> PolyMatrix:
    """Product of elementary matrices over Z[t, 1/t]; determinant is ±t^k."""
    rows = PolyMatrix.identity(n).to_lists()
    for _ in range(ops):
        kind = rng.random()
        i = rng.randrange(n)
        if kind < 0.6 and n > 1:
            j = rng.choice([k for k in range(n) if k != i])
            mult = LaurentPoly.monomial(rng.choice([-2, -1, 1, 2]), rng.choice([-1, 0, 1]))
            rows[i] = [a + mult * b for a, b in zip(rows[i], rows[j])]
        elif kind < 0.8 and n > 1:
            j = rng.randrange(n)
            rows[i], rows[j] = rows[j], rows[i]
        else:
            unit = LaurentPoly.monomial(rng.choice([-1, 1]), rng.choice([-1, 0, 1]))
            rows[i] = [unit * a for a in rows[i]]
    return PolyMatrix(rows, ncols=n)


def invoke(argv, check_determinism=True):
    """Run the CLI in-process; every call is repeated to check byte-identical output."""
    import io

    from mnbounds.cli import main

    def once():
        out, err = io.StringIO(), io.StringIO()
        code = main(list(argv), out=out, err=err)
        return code, out.getvalue(), err.getvalue()

    first = once()
    if check_determinism:
        assert once() == first, f"non-deterministic output for {argv}"
    return first


# Representative invocations, also replayed out-of-process by the acceptance suite.
CLI_CASES = [
    ["bounds", "spin(5_2)"],
    ["bounds", "spin(5_2)", "--json"],
    ["bounds", "spin(3_1)", "spin[2](5_2)", "sum(spin(5_2), spin(5_2))"],
    ["bounds", "spin[3]^2(6_1)", "5_2", "--json", "--parallel"],
    ["compute", "4_1"],
    ["compute", "5_2", "--json", "--primes", "2,3,5"],
    ["validate", "db/seed.txt"],
    ["bounds", "spin(9_99)"],
    ["bounds", "spin((5_2)"],
]


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
