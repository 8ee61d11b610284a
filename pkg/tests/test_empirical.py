import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from golden import ROW_LABELS, TABLES
from nonlocality.boolfn import named, parse_poly
from nonlocality.empirical import (EmpiricalModel, ModelFormatError, Relabeling, Scenario, build_model, deserialize,
                                   format_table, pr_box, relabel, serialize, support, to_json_dict)
from nonlocality.qcore import Observable, SizeBoundError, StateVector
from nonlocality.states import bell, func_dep_state, ghz
from nonlocality.witness import A, B

Y, Z, X = Observable("Y"), Observable("Z"), Observable("X")
YZ3 = Scenario.uniform(Y, Z, 3)


def yz_support(name):
    return support(build_model(func_dep_state(named(name)), YZ3))


@pytest.mark.parametrize("name", sorted(TABLES))
def test_golden_tables(name):
    sup = yz_support(name)
    assert sup.grid() == TABLES[name]
    assert [YZ3.context_label(c) for c in YZ3.context_order()] == ROW_LABELS


def test_scenario_labels():
    assert YZ3.outcome_label(0) == "+++" and YZ3.outcome_label(6) == "--+"
    assert YZ3.outcome_index("+-+") == 2
    assert YZ3.context_label(YZ3.context_index([0, 1, 1])) == "YZZ"
    assert YZ3.settings(YZ3.context_index([1, 0, 1])) == [1, 0, 1]


RELABELINGS = {"NAND": "++-", "OR": "---", "NOR": "--+", "L1": "+--", "NL1": "+-+", "L2": "-+-", "NL2": "-++"}


@pytest.mark.parametrize("target,image", sorted(RELABELINGS.items()))
def test_relabeling_maps_and(target, image):
    assert relabel(yz_support("AND"), Relabeling.from_image(image)) == yz_support(target)


def test_relabel_model_exact():
    and_model = build_model(func_dep_state(named("AND")), YZ3)
    nand_model = build_model(func_dep_state(named("NAND")), YZ3)
    assert relabel(and_model, Relabeling.from_image("+++↦++−")).equals(nand_model)


@given(st.lists(st.booleans(), min_size=3, max_size=3), st.lists(st.booleans(), min_size=3, max_size=3))
def test_relabel_group(f, g):
    sup = yz_support("AND")
    r, s = Relabeling(tuple(f)), Relabeling(tuple(g))
    assert relabel(relabel(sup, r), r) == sup
    assert relabel(relabel(sup, r), s) == relabel(sup, r.compose(s))
    assert relabel(sup, Relabeling.identity(3)) == sup


def test_pr_box():
    box = pr_box()
    assert box.exact and box.is_no_signalling()
    assert box.prob("a0 b0", "++") == Fraction(1, 2)
    assert box.prob("a1 b1", "+-") == Fraction(1, 2)
    assert box.prob("a1 b1", "++") == 0


def test_phi_plus_ab_entries():
    m = build_model(bell("+"), Scenario.uniform(A, B, 2))
    hi, lo = (2 + math.sqrt(2)) / 8, (2 - math.sqrt(2)) / 8
    for v in np.asarray(m.probs, dtype=float).ravel():
        assert min(abs(v - hi), abs(v - lo)) < 1e-9
    text = format_table(m, dp=2)
    assert "0.43" in text and "0.07" in text


def _random_state(rng, n):
    return StateVector.from_complex(rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n))


def _random_obs(rng):
    return Observable.bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_no_signalling_random(seed, n):
    rng = np.random.default_rng(seed)
    m = build_model(_random_state(rng, n), Scenario.from_observables(
        [(_random_obs(rng), _random_obs(rng)) for _ in range(n)]))
    assert max(m.row_sum_errors()) < 1e-9
    assert m.signalling_violation() < 1e-9
    assert (np.asarray(m.probs, dtype=float) >= -1e-12).all()


def test_exact_models_are_exact_no_signalling():
    m = build_model(func_dep_state(parse_poly("q1+q1*q2")), Scenario.uniform(X, Z, 3))
    assert m.exact and m.signalling_violation() == 0
    assert all(e == 0 for e in m.row_sum_errors())


def test_generic_bases_full_support():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = build_model(_random_state(rng, 3), Scenario.from_observables(
            [(_random_obs(rng), _random_obs(rng)) for _ in range(3)]))
        assert all(all(row) for row in support(m).grid())


def test_build_is_deterministic():
    scen = Scenario.uniform(A, B, 3)
    a = build_model(ghz(3), scen)
    b = build_model(ghz(3), scen)
    assert np.array_equal(a.probs, b.probs)
    assert serialize(a) == serialize(b)


def test_party_mismatch_and_size_bound():
    with pytest.raises(ValueError):
        build_model(ghz(3), Scenario.uniform(X, Z, 2))
    with pytest.raises(SizeBoundError):
        build_model(StateVector.basis("0" * 13), Scenario.uniform(X, Z, 13))


@pytest.mark.parametrize("model", [
    pr_box(),
    build_model(func_dep_state(named("AND")), YZ3),
    build_model(bell("+"), Scenario.uniform(A, B, 2)),
])
def test_serialize_roundtrip(model):
    back = deserialize(serialize(model))
    assert back.exact == model.exact
    assert back.scenario.labels == model.scenario.labels
    assert back.equals(model, 0.0 if model.exact else 1e-15)


def test_serialized_layout():
    doc = to_json_dict(build_model(func_dep_state(named("XOR")), YZ3))
    assert doc["mode"] == "exact" and doc["n_parties"] == 3
    assert [r["label"] for r in doc["rows"]] == ROW_LABELS
    assert doc["rows"][0]["probs"][0] == "1/8"


def _bad(doc_edit):
    doc = to_json_dict(pr_box())
    doc_edit(doc)
    return json.dumps(doc)


def test_row_sum_rejected_with_location():
    text = _bad(lambda d: d["rows"][2]["probs"].__setitem__(1, "1/4"))
    with pytest.raises(ModelFormatError) as exc:
        deserialize(text)
    assert exc.value.location == "$.rows[2].probs"


@pytest.mark.parametrize("edit,loc", [
    (lambda d: d.__setitem__("mode", "fuzzy"), "$.mode"),
    (lambda d: d["rows"][0]["probs"].__setitem__(0, "-1/2"), "$.rows[0].probs[0]"),
    (lambda d: d["rows"][1].__setitem__("context", [0, 0]), "$.rows[1].context"),
    (lambda d: d["rows"].pop(), "$.rows"),
])
def test_format_errors(edit, loc):
    with pytest.raises(ModelFormatError) as exc:
        deserialize(_bad(edit))
    assert exc.value.location == loc


def test_invalid_json():
    with pytest.raises(ModelFormatError):
        deserialize("{not json")


def test_formats():
    m = build_model(func_dep_state(named("XOR")), YZ3)
    txt = format_table(m)
    assert "1/8" in txt and "YYY" in txt and "+++" in txt
    csv = format_table(support(m), "csv").splitlines()
    assert len(csv) == 9 and csv[1].split(",")[1:] == list("11111111")
    assert json.loads(format_table(m, "json"))["format"] == "nonlocality.model/1"


def test_float_model_conversion():
    m = build_model(func_dep_state(named("OR")), YZ3)
    f = m.to_float()
    assert not f.exact and f.equals(m, 1e-15)
    assert support(f) == support(m)


def test_float_model_direct():
    probs = np.full((4, 4), 0.25)
    m = EmpiricalModel(Scenario.uniform(X, Z, 2), probs, False)
    assert m.is_no_signalling() and m.prob("XZ", "+-") == 0.25
    with pytest.raises((ValueError, TypeError)):
        m.probs[0, 0] = 1.0
