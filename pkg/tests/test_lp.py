from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsregen import lp

scipy_optimize = pytest.importorskip("scipy.optimize")


def test_textbook_minimum():
    # min x + y  s.t.  x + 2y >= 4, 3x + y >= 6
    res = lp.solve((1, 1), A_ge=[(1, 2), (3, 1)], b_ge=(4, 6))
    assert res.x == (Fraction(8, 5), Fraction(6, 5))
    assert res.objective == Fraction(14, 5)


def test_upper_bounds_only_gives_zero():
    res = lp.solve((2, 3), A_le=[(1, 0), (0, 1)], b_le=(5, 5))
    assert res.objective == 0


def test_negative_rhs_is_normalised():
    res = lp.solve((1,), A_le=[(-1,)], b_le=(-3,))
    assert res.x == (3,)


def test_infeasible():
    with pytest.raises(lp.Infeasible):
        lp.solve((1,), A_le=[(1,)], b_le=(1,), A_ge=[(1,)], b_ge=(2,))


def test_unbounded():
    with pytest.raises(lp.Unbounded):
        lp.solve((-1, 0), A_ge=[(1, 1)], b_ge=(1,))


def test_degenerate_problem_terminates():
    # several constraints tight at the optimum
    res = lp.solve((-1, -1), A_le=[(1, 0), (0, 1), (1, 1), (2, 1)], b_le=(1, 1, 2, 3))
    assert res.objective == -2


def test_row_width_checked():
    with pytest.raises(ValueError):
        lp.solve((1, 1), A_le=[(1,)], b_le=(1,))


coef = st.integers(-4, 6)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 5), min_size=n, max_size=n),
    st.lists(st.lists(coef, min_size=n, max_size=n), min_size=0, max_size=3),
    st.lists(st.integers(0, 8), min_size=3, max_size=3),
    st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=0, max_size=3),
    st.lists(st.integers(0, 8), min_size=3, max_size=3),
)))
def test_agrees_with_reference_solver(case):
    c, A_ge, b_ge, A_le, b_le = case
    n = len(c)
    A_le = A_le + [[1] * n]
    b_le = b_le[:len(A_le) - 1] + [10]
    b_ge = b_ge[:len(A_ge)]
    ref = scipy_optimize.linprog(
        c,
        A_ub=[list(r) for r in A_le] + [[-x for x in r] for r in A_ge],
        b_ub=list(b_le) + [-x for x in b_ge],
        bounds=[(0, None)] * n,
        method="highs",
    )
    if ref.status == 2:
        with pytest.raises(lp.Infeasible):
            lp.solve(c, A_le, b_le, A_ge, b_ge)
        return
    assert ref.status == 0
    res = lp.solve(c, A_le, b_le, A_ge, b_ge)
    assert float(res.objective) == pytest.approx(ref.fun, abs=1e-7)
    for row, rhs in zip(A_le, b_le):
        assert sum(a * x for a, x in zip(row, res.x)) <= rhs
    for row, rhs in zip(A_ge, b_ge):
        assert sum(a * x for a, x in zip(row, res.x)) >= rhs
    assert all(x >= 0 for x in res.x)
