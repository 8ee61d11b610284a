from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from nonlocality.simplex import find_feasible, maximize


def _problem(seed, m, n):
    rng = np.random.default_rng(seed)
    return rng, rng.integers(-3, 4, size=(m, n))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.integers(1, 7), st.booleans())
def test_feasibility_matches_scipy(seed, m, n, planted):
    rng, A = _problem(seed, m, n)
    if planted:
        x0 = [Fraction(int(v), 3) for v in rng.integers(0, 4, size=n)]
        b = [sum(Fraction(int(a)) * x for a, x in zip(row, x0)) for row in A]
    else:
        b = [Fraction(int(v), 2) for v in rng.integers(-4, 5, size=m)]
    x = find_feasible(A.tolist(), b)
    ref = linprog(np.zeros(n), A_eq=A, b_eq=np.array(b, dtype=float), bounds=[(0, None)] * n, method="highs")
    assert (x is not None) == (ref.status == 0)
    if x is not None:
        assert all(v >= 0 for v in x)
        assert [sum(Fraction(int(a)) * v for a, v in zip(row, x)) for row in A] == b
    if planted:
        assert x is not None


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.integers(1, 6))
def test_maximize_matches_scipy(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(1, 5, size=(m, n))          # positive rows keep the problem bounded
    b = [Fraction(int(v), 2) for v in rng.integers(0, 9, size=m)]
    c = [Fraction(int(v), 3) for v in rng.integers(-4, 5, size=n)]
    value, x = maximize(c, A.tolist(), b)
    ref = linprog(-np.array(c, dtype=float), A_ub=A, b_ub=np.array(b, dtype=float),
                  bounds=[(0, None)] * n, method="highs")
    assert ref.status == 0
    assert abs(float(value) + ref.fun) < 1e-9
    assert sum(ci * xi for ci, xi in zip(c, x)) == value
    assert all(v >= 0 for v in x)
    for row, bi in zip(A, b):
        assert sum(int(a) * v for a, v in zip(row, x)) <= bi


def test_small_cases():
    assert find_feasible([[1, 1]], [1]) is not None
    assert find_feasible([[1, 1]], [-1]) is None
    assert find_feasible([[1, -1], [1, 1]], [0, 2]) == [1, 1]
    assert maximize([1, 1], [[1, 2], [3, 1]], [4, 6]) == (Fraction(14, 5), [Fraction(8, 5), Fraction(6, 5)])
