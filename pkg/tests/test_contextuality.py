import itertools
import math
from types import SimpleNamespace
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from nonlocality.boolfn import all_polynomials, named, parse_poly
from nonlocality.contextuality import (CertificateError, GlobalAssignment, Label, LPStatus, SizeBoundError,
                                       check_hierarchy, classify, consistent_assignments, dicke_certificate,
                                       dicke_violation, lp_noncontextual, non_extendable_sections)
from nonlocality.empirical import EmpiricalModel, Scenario, build_model, pr_box, support
from nonlocality.qcore import Observable, StateVector
from nonlocality.states import bell, dicke, func_dep_state, ghz, product_zero
from nonlocality.witness import A, B

X, Y, Z = Observable("X"), Observable("Y"), Observable("Z")
YZ3 = Scenario.uniform(Y, Z, 3)
XZ2 = Scenario.uniform(X, Z, 2)


def yz(name):
    return build_model(func_dep_state(parse_poly(name, 2)), YZ3)


# -- global assignments -----------------------------------------------------

def test_global_assignment_roundtrip():
    ga = GlobalAssignment.from_outcomes([(0, 1), (1, 1), (0, 0)])
    assert ga.outcome(0, 1) == 1 and ga.outcome(2, 0) == 0
    assert ga.restrict(0b000) == 0b010 and ga.restrict(0b111) == 0b110
    assert ga.signs() == "+-+--+"  # setting 0 of each party, then setting 1


def test_all_plus_consistent_for_logical_family():
    for name in ("AND", "NAND", "OR", "NOR", "L1", "NL1", "L2", "NL2"):
        res = classify(yz(name))
        assert res.label is Label.Logical
        assert res.n_consistent >= 1
    zero = GlobalAssignment.from_outcomes([(0, 0)] * 3)
    assert zero in consistent_assignments(support(yz("AND")))


def test_non_extendable_examples():
    nonext = non_extendable_sections(support(yz("AND")))
    assert any(nonext.values())
    for c, outs in nonext.items():
        assert outs <= support(yz("AND")).row(c)


@pytest.mark.parametrize("name,label", [
    ("XOR", Label.Strong), ("NXOR", Label.Strong), ("AND", Label.Logical), ("0", Label.NonContextual),
    ("1", Label.NonContextual), ("q1", Label.NonContextual), ("1+q2", Label.NonContextual),
])
def test_three_party_yz_classes(name, label):
    assert classify(yz(name)).label is label


def test_dictatorship_ab_weak():
    for name in ("q1", "q2"):
        model = build_model(func_dep_state(parse_poly(name, 2)), Scenario.uniform(A, B, 3))
        res = classify(model)
        assert res.label is Label.Weak and res.lp.status is LPStatus.Infeasible
        cert = res.lp.certificate
        assert cert.evaluate(model) > cert.bound
        assert cert.vertex_max(3) <= cert.bound


def test_ghz_and_pr_box_strong():
    assert classify(build_model(ghz(3), Scenario.uniform(X, Y, 3))).label is Label.Strong
    res = classify(pr_box())
    assert res.label is Label.Strong and res.n_consistent == 0


def test_phi_plus_ab_weak_exact_and_float():
    model = build_model(bell("+"), Scenario.uniform(A, B, 2))
    assert not model.exact
    lp = lp_noncontextual(model)
    assert lp.status is LPStatus.Infeasible and lp.violation > 1e-3
    assert lp.certificate.evaluate(model) - float(lp.certificate.bound) > 1e-3


def test_trivial_models_feasible():
    theta0 = Scenario.uniform(Observable.bloch(0.0, 0.0), Observable.bloch(0.0, 1.0), 2)
    assert lp_noncontextual(build_model(bell("+"), theta0)).feasible
    for scen in (XZ2, Scenario.uniform(A, B, 2)):
        res = lp_noncontextual(build_model(product_zero(2), scen))
        assert res.feasible
        table = res.marginal_table(2)
        assert np.allclose(table.astype(float), build_model(product_zero(2), scen).probs.astype(float), atol=1e-9)


def test_exact_distribution_reproduces_model():
    model = yz("1+q1")
    res = lp_noncontextual(model)
    assert res.status is LPStatus.Feasible and res.exact
    assert sum(res.distribution.values()) == 1
    assert (res.marginal_table(3) == model.probs).all()


def test_signalling_model_rejected():
    probs = np.full((4, 4), Fraction(0), dtype=object)
    for c in range(4):
        probs[c, 0 if c < 2 else 3] = Fraction(1)
    res = lp_noncontextual(EmpiricalModel(XZ2, probs, True))
    assert res.status is LPStatus.Infeasible and "signalling" in res.note


def test_run_lp_false_is_indeterminate():
    model = build_model(func_dep_state(parse_poly("q1", 2)), Scenario.uniform(A, B, 3))
    assert classify(model, run_lp=False).label is Label.Indeterminate


def test_size_bounds():
    # the bounds are checked before the table is touched
    with pytest.raises(SizeBoundError):
        classify(SimpleNamespace(n=15))
    with pytest.raises(SizeBoundError):
        lp_noncontextual(SimpleNamespace(n=11))


# -- LP vs vertex oracles on two-party rational models ------------------------

def _two_party(a, b, e):
    """Table from marginals a[s], b[t] and correlators e[s][t] (all in [-1, 1])."""
    probs = np.empty((4, 4), dtype=object)
    for s, t in itertools.product((0, 1), repeat=2):
        for x, y in itertools.product((0, 1), repeat=2):
            sx, sy = 1 - 2 * x, 1 - 2 * y
            probs[(s << 1) | t, (x << 1) | y] = (1 + sx * a[s] + sy * b[t] + sx * sy * e[s][t]) / 4
    return probs


def _chsh_local(e):
    vals = []
    for flip in range(4):
        signs = [[1, 1], [1, 1]]
        signs[flip >> 1][flip & 1] = -1
        vals.append(abs(sum(signs[s][t] * e[s][t] for s in (0, 1) for t in (0, 1))))
    return max(vals) <= 2


def _hull_local(probs):
    """Membership in the hull of the 16 deterministic tables, by scipy."""
    verts = []
    for code in range(16):
        o = [[(code >> 3) & 1, (code >> 2) & 1], [(code >> 1) & 1, code & 1]]
        v = np.zeros(16)
        for s, t in itertools.product((0, 1), repeat=2):
            v[((s << 1) | t) * 4 + ((o[0][s] << 1) | o[1][t])] = 1
        verts.append(v)
    V = np.array(verts).T
    target = np.asarray(probs, dtype=float).ravel()
    res = linprog(np.zeros(16), A_eq=np.vstack([V, np.ones(16)]), b_eq=np.append(target, 1),
                  bounds=[(0, None)] * 16, method="highs")
    return res.status == 0


def _grid_models():
    half = Fraction(1, 2)
    margs = (Fraction(0), half, -half)
    corr = (Fraction(-1), -half, Fraction(0), half, Fraction(1))
    out = []
    for a0, b0 in itertools.product(margs, repeat=2):
        for e in itertools.product(corr, repeat=4):
            ee = [[e[0], e[1]], [e[2], e[3]]]
            probs = _two_party([a0, a0], [b0, b0], ee)
            if all(p >= 0 for p in probs.ravel()):
                out.append((probs, ee))
    return out


GRID = _grid_models()


def test_grid_is_substantial():
    local = sum(_chsh_local(e) for _, e in GRID)
    assert len(GRID) > 300 and 0 < local < len(GRID)


@pytest.mark.parametrize("chunk", range(4))
def test_lp_matches_fine_and_hull_exact(chunk):
    for probs, e in GRID[chunk::4]:
        model = EmpiricalModel(XZ2, probs, True)
        fine = _chsh_local(e)
        assert fine == _hull_local(probs)
        res = lp_noncontextual(model)
        assert res.feasible == fine
        if not fine:
            cert = res.certificate
            assert cert.evaluate(model) > cert.bound
            assert cert.vertex_max(2) <= cert.bound


def test_lp_matches_fine_float():
    for probs, e in GRID[::3]:
        model = EmpiricalModel(XZ2, probs.astype(float), False)
        res = lp_noncontextual(model)
        assert res.status is (LPStatus.Feasible if _chsh_local(e) else LPStatus.Infeasible)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_lp_matches_hull_random_quantum(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    obs = [Observable.bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(4)]
    model = build_model(StateVector.from_complex(v), Scenario.from_observables([obs[:2], obs[2:]]))
    res = lp_noncontextual(model)
    if res.status is LPStatus.Indeterminate:
        return
    assert res.feasible == _hull_local(model.probs)


# -- Dicke certificates -----------------------------------------------------

@pytest.mark.parametrize("n,k", [(n, k) for n in range(3, 7) for k in range(1, n)])
def test_dicke_certificate(n, k):
    cert = dicke_certificate(n, k)
    assert cert.x_equal_mass == Fraction(comb(n, k), 2 ** (n - 1))
    assert cert.violation == 1 - cert.x_equal_mass == dicke_violation(n, k)
    assert cert.closure_classes == 1
    assert classify(build_model(dicke(n, k), Scenario.uniform(X, Z, n))).label is Label.Logical


def test_dicke_examples():
    assert dicke_violation(3, 2) == Fraction(1, 4)
    assert dicke_violation(4, 1) == Fraction(1, 2)


def test_epr_rejected():
    with pytest.raises(CertificateError, match="strictness"):
        dicke_certificate(2, 1)
    # and the certificate's failure coincides with the classifier
    assert classify(build_model(dicke(2, 1), XZ2)).label is not Label.Logical


# -- hierarchy ---------------------------------------------------------------

def test_hierarchy_on_every_three_party_state():
    for p in all_polynomials(2):
        for scen in (YZ3, Scenario.uniform(A, B, 3), Scenario.uniform(X, Z, 3)):
            model = build_model(func_dep_state(p), scen)
            assert check_hierarchy(model, classify(model)) == []


def test_label_order():
    ranks = [Label.NonContextual, Label.Indeterminate, Label.Weak, Label.Logical, Label.Strong]
    assert [l.rank for l in ranks] == sorted(l.rank for l in ranks)


def test_check_hierarchy_catches_wrong_label():
    model = yz("XOR")
    res = classify(model)
    res.label = Label.NonContextual
    assert check_hierarchy(model, res)


def test_summary_and_json():
    res = classify(yz("AND"))
    assert "Logical" in res.summary()
    doc = res.to_json_dict()
    assert doc["label"] == "Logical" and doc["consistent_assignments"] == res.n_consistent
    assert doc["non_extendable"]
    assert named("AND").n_vars == 2
