"""Exact simplex over the rationals.

The tableau is kept as Python integers with one common positive denominator
and updated by fraction-free (Bareiss) pivots, so there is no rounding and no
``Fraction`` overhead.  Bland's rule guarantees termination.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np


class UnboundedError(ArithmeticError):
    pass


def _to_int_rows(A, b):
    """Scale each row of [A | b] by the lcm of its denominators."""
    A_int, b_int = [], []
    for row, rhs in zip(A, b):
        vals = [Fraction(v) for v in row] + [Fraction(rhs)]
        den = reduce(lambda x, y: x * y // math.gcd(x, y), (v.denominator for v in vals), 1)
        ints = [int(v * den) for v in vals]
        A_int.append(ints[:-1])
        b_int.append(ints[-1])
    return A_int, b_int


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.den = 1
        self.pivots = 0

    def pivot(self, r: int, k: int):
        T = self.T
        row = T[r].copy()
        piv = row[k]
        T[:] = (piv * T - np.outer(T[:, k], row)) // self.den
        T[r] = row
        self.den = piv
        self.basis[r] = k
        self.pivots += 1

    def run(self, n_cols: int):
        """Maximise the objective in the last row; columns >= n_cols never enter."""
        T = self.T
        m = T.shape[0] - 1
        while True:
            obj = T[m]
            k = next((j for j in range(n_cols) if obj[j] > 0), None)
            if k is None:
                return
            best = None
            for i in range(m):
                a = T[i, k]
                if a <= 0:
                    continue
                if best is None:
                    best = i
                    continue
                # T[i,-1]/a vs T[best,-1]/T[best,k]
                lhs = T[i, -1] * T[best, k]
                rhs = T[best, -1] * a
                if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                    best = i
            if best is None:
                raise UnboundedError(f"objective unbounded along column {k}")
            self.pivot(best, k)

    def value(self, j: int) -> Fraction:
        try:
            r = self.basis.index(j)
        except ValueError:
            return Fraction(0)
        return Fraction(int(self.T[r, -1]), int(self.den))


def find_feasible(A: Sequence[Sequence], b: Sequence):
    """A point x >= 0 with A x = b, as a list of Fractions, or None if there is none."""
    m = len(b)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    A_int, b_int = _to_int_rows(A, b)
    for i in range(m):
        if b_int[i] < 0:
            A_int[i] = [-v for v in A_int[i]]
            b_int[i] = -b_int[i]
    T = np.zeros((m + 1, n + m + 1), dtype=object)
    T[:m, :n] = np.array(A_int, dtype=object).reshape(m, n)
    for i in range(m):
        T[i, n + i] = 1
        T[i, -1] = b_int[i]
    if n:
        T[m, :n] = T[:m, :n].sum(axis=0)
    T[m, -1] = sum(b_int)
    tab = _Tableau(T, list(range(n, n + m)))
    tab.run(n)
    if tab.T[m, -1] != 0:
        return None
    return [tab.value(j) for j in range(n)]


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence):
    """max c.x  s.t.  A x <= b, x >= 0, with b >= 0.  Returns (value, x)."""
    m = len(b)
    n = len(c)
    cden = reduce(lambda x, y: x * y // math.gcd(x, y), (Fraction(v).denominator for v in c), 1)
    c_int = [int(Fraction(v) * cden) for v in c]
    A_int, b_int = _to_int_rows(A, b)
    if any(v < 0 for v in b_int):
        raise ValueError("maximize needs a non-negative right-hand side")
    T = np.zeros((m + 1, n + m + 1), dtype=object)
    if m:
        T[:m, :n] = np.array(A_int, dtype=object).reshape(m, n)
    for i in range(m):
        T[i, n + i] = 1
        T[i, -1] = b_int[i]
    T[m, :n] = c_int
    tab = _Tableau(T, list(range(n, n + m)))
    tab.run(n + m)
    value = Fraction(-int(tab.T[m, -1]), int(tab.den) * cden)
    return value, [tab.value(j) for j in range(n)]
