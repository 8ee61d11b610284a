import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from nonlocality.boolfn import BooleanPolynomial, parse_poly
from nonlocality.empirical import Scenario, build_model
from nonlocality.qcore import Observable, StateVector
from nonlocality.states import (StateSpecError, bell, dicke, dictatorship, func_dep_state, ghz, parse_spec,
                                product_zero)


def test_dicke_examples():
    w = dicke(3, 2)
    assert w == StateVector(3, re=[0, 1, 1, 0, 1, 0, 0, 0])
    assert dicke(2, 1) == StateVector(2, re=[0, 1, 1, 0])
    for n in range(2, 7):
        for k in range(1, n):
            s = dicke(n, k)
            assert len(s.support()) == comb(n, k)
            assert s.norm2_total() == 1


@pytest.mark.parametrize("n,k", [(3, 0), (3, 3), (1, 0), (4, 5)])
def test_dicke_rejects(n, k):
    with pytest.raises(StateSpecError):
        dicke(n, k)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 3)])
def test_dicke_permutation_invariant(n, k):
    s = dicke(n, k)
    for perm in itertools.permutations(range(n)):
        assert s.permute_qubits(perm) == s


def test_func_dep_examples():
    assert func_dep_state(parse_poly("q1+q2")) == StateVector(3, re=[1, 0, 0, 1, 0, 1, 1, 0])
    assert func_dep_state(parse_poly("0", 2)) == StateVector(3, re=[1, 0, 1, 0, 1, 0, 1, 0])
    d2 = func_dep_state(parse_poly("q2", 2))
    assert d2 == StateVector(3, re=[1, 0, 0, 1, 1, 0, 0, 1])
    assert dictatorship(3, 2, "+") == d2


def test_dictatorship_minus_first():
    # pair (|01> + |10>) on parties 1 and 3, party 2 in |+>
    d = dictatorship(3, 1, "-")
    amps = [0] * 8
    for q1, q2 in itertools.product((0, 1), repeat=2):
        amps[(q1 << 2) | (q2 << 1) | (1 - q1)] = 1
    assert d == StateVector(3, re=amps)
    with pytest.raises(StateSpecError):
        dictatorship(3, 3, "+")


@given(st.integers(1, 4).flatmap(lambda n: st.integers(0, (1 << (1 << n)) - 1).map(
    lambda m: BooleanPolynomial.from_coefficient_mask(n, m))))
def test_func_dep_z_support(p):
    state = func_dep_state(p)
    n = p.n_vars
    model = build_model(state, Scenario.uniform(Observable("Z"), Observable("X"), n + 1))
    row = model.probs[0]
    expected = {(q << 1) | p.truth_table()[q] for q in range(1 << n)}
    assert {o for o in range(1 << (n + 1)) if row[o]} == expected
    assert all(row[o] == Fraction(1, 1 << n) for o in expected)


def test_bell_ghz():
    assert bell("+") == StateVector(2, re=[1, 0, 0, 1])
    assert bell("-") == StateVector(2, re=[1, 0, 0, -1])
    g = ghz(3)
    assert g.norm2_total() == 1 and g.support() == [0, 7]
    assert product_zero(2) == StateVector.basis("00")


@pytest.mark.parametrize("text", ["dicke:3,2", "ghz:3", "bell:+", "bell:-", "fd:q1+q2", "dict:3,2,+", "zero:2",
                                  "fd:1+q1*q2"])
def test_spec_roundtrip(text):
    spec = parse_spec(text)
    assert parse_spec(str(spec)) == spec
    assert spec.build().n == spec.n_qubits


def test_spec_named_poly():
    assert parse_spec("fd:AND").build() == func_dep_state(parse_poly("q1*q2"))
    assert parse_spec("fd:q2@2").n_qubits == 3


@pytest.mark.parametrize("text", ["dicke:3", "dicke:3,3", "bell:x", "foo:1", "dict:3,0,+", "fd:q1+", "ghz"])
def test_spec_errors(text):
    with pytest.raises(ValueError):
        parse_spec(text)
