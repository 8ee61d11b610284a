"""Lifting classifications from models to states.

A state's class is the highest class of any model it generates; everything
here searches over observable choices and therefore only ever certifies a
lower bound on that class.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boolfn import BooleanPolynomial, PredictedClass, all_polynomials, predicted_class
from .contextuality import (ContextualityClass, Label, SizeBoundError, classify,
                            _codes, _non_extendable_mask)
from .empirical import Scenario, SupportTable, build_model
from .qcore import ZERO_TOL, Observable, StateVector
from .states import StateSpec, bell, dicke, func_dep_state

PI = math.pi
MAX_SEARCH_PARTIES = 6

X, Y, Z = Observable("X"), Observable("Y"), Observable("Z")
A = Observable.bloch(PI / 2, PI / 8, "A")
B = Observable.bloch(PI / 2, 5 * PI / 8, "B")
C = Observable.bloch(PI / 8, PI / 2, "C")
D = Observable.bloch(5 * PI / 8, PI / 2, "D")
# the same two observables with their angle arguments exchanged
C_SWAPPED = Observable.bloch(PI / 2, PI / 8, "C'")
D_SWAPPED = Observable.bloch(PI / 2, 5 * PI / 8, "D'")

PRESET_OBSERVABLES = {"X": X, "Y": Y, "Z": Z, "A": A, "B": B, "C": C, "D": D}
SPECIAL_ANGLES = (0.0, PI / 8, PI / 4, PI / 2, 5 * PI / 8, PI)


@dataclass
class WitnessReport:
    spec: str
    observables: tuple          # ((setting 0, setting 1), ...) per party
    result: ContextualityClass
    method: str                 # preset name or "grid:<res>"
    notes: list = field(default_factory=list)
    lower_bound: bool = True
    state: StateVector | None = field(default=None, repr=False)

    @property
    def label(self) -> Label:
        return self.result.label

    def observable_text(self) -> str:
        return ",".join(f"{a.name}/{b.name}" for a, b in self.observables)

    def verify(self) -> bool:
        """Re-run the classification on the recorded state and observables."""
        model = build_model(self.state, Scenario.from_observables(self.observables))
        return classify(model).label is self.label

    def to_json_dict(self) -> dict:
        return {
            "state": self.spec,
            "observables": self.observable_text(),
            "method": self.method,
            "class": self.label.value,
            "lower_bound": self.lower_bound,
            "evidence": self.result.to_json_dict(),
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        head = f"{self.spec}: {self.label.value} under {self.observable_text()} ({self.method})"
        return "\n".join([head] + [f"  note: {n}" for n in self.notes])


def _classify_pairs(state: StateVector, pairs, run_lp=True):
    model = build_model(state, Scenario.from_observables(pairs))
    return model, classify(model, run_lp=run_lp)


def _candidates(spec: StateSpec):
    """(name, per-party observable pairs) tried for a known family, best-first by convention."""
    n = spec.n_qubits
    uni = lambda a, b: tuple([(a, b)] * n)
    k = spec.kind
    if k == "dicke":
        return [("X/Z", uni(X, Z))]
    if k == "fd":
        return [("Y/Z", uni(Y, Z))]
    if k == "ghz":
        return [("X/Y", uni(X, Y))]
    if k == "zero":
        return [("Z/X", uni(Z, X))]
    if k == "dict" or k == "bell":
        sign = spec.params[-1]
        if sign == "+":
            return [("A/B", uni(A, B))]
        return [("C/D", uni(C, D)), ("C'/D' (exchanged angles)", uni(C_SWAPPED, D_SWAPPED)), ("A/B", uni(A, B))]
    raise ValueError(f"no preset observables for state family {k!r}")


def preset_witness(spec: StateSpec) -> WitnessReport:
    """Classify a state under its family's conventional observables."""
    state = spec.build()
    best = None
    notes = []
    for name, pairs in _candidates(spec):
        _, res = _classify_pairs(state, pairs)
        notes.append(f"{name}: {res.label.value}")
        if best is None or res.label.rank > best[2].label.rank:
            best = (name, pairs, res)
    name, pairs, res = best
    rep = WitnessReport(str(spec), pairs, res, f"preset:{name}", notes if len(notes) > 1 else [], state=state)
    if spec.kind == "bell" and spec.params[0] == "-":
        rep.notes.append("Phi- is built as (|00> - |11>)/sqrt2")
    return rep


def grid_angles(resolution: int):
    """(theta list, phi list) over the multiples of pi/resolution plus the special values."""
    if resolution < 4:
        raise ValueError("resolution must divide pi into at least 4 steps")
    thetas = sorted({round(k * PI / resolution, 12) for k in range(resolution + 1)} |
                    {round(t, 12) for t in SPECIAL_ANGLES})
    phis = sorted({round(k * PI / resolution, 12) for k in range(2 * resolution)} |
                  {round(t, 12) for t in SPECIAL_ANGLES if t < 2 * PI})
    return thetas, phis


def grid_observables(resolution: int) -> list[Observable]:
    thetas, phis = grid_angles(resolution)
    out = []
    for t in thetas:
        # the poles do not depend on phi
        ps = [0.0] if (abs(t) < 1e-12 or abs(t - PI) < 1e-12) else phis
        for p in ps:
            out.append(Observable.bloch(t, p))
    return out


_OBJECTIVES = {"Strong": Label.Strong, "Logical": Label.Logical, "AnyContextual": Label.Weak}


def grid_search(state: StateVector, resolution: int = 4, objective: str = "AnyContextual",
                spec: str | None = None) -> WitnessReport | None:
    """First uniform observable pair (same pair at every party) reaching the objective class.

    Pairs are swept in lexicographic order of (theta, phi) of the first and
    then the second setting.  Absence at a given resolution proves nothing.
    """
    if objective not in _OBJECTIVES:
        raise ValueError(f"objective must be one of {sorted(_OBJECTIVES)}")
    if state.n > MAX_SEARCH_PARTIES:
        raise SizeBoundError(f"grid search is limited to {MAX_SEARCH_PARTIES} parties")
    target = _OBJECTIVES[objective]
    need_lp = target is Label.Weak
    obs = grid_observables(resolution)
    for a, b in itertools.combinations(obs, 2):
        pairs = tuple([(a, b)] * state.n)
        _, res = _classify_pairs(state, pairs, run_lp=need_lp)
        if res.label.rank >= target.rank and res.label is not Label.Indeterminate:
            return WitnessReport(spec or f"{state.n}-qubit state", pairs, res, f"grid:{resolution}", state=state)
    return None


def lift_state_class(state: StateVector, presets=None, grid: int | None = None,
                     spec: StateSpec | None = None) -> WitnessReport:
    """Best class over preset observable sets and an optional grid; a lower bound on the state class."""
    tried = []
    if spec is not None:
        tried.extend(_candidates(spec))
    for i, pairs in enumerate(presets or []):
        tried.append((f"given#{i + 1}", tuple(tuple(p) for p in pairs)))
    if not tried and grid is None:
        raise ValueError("nothing to try: pass presets, a known spec or a grid resolution")
    name = str(spec) if spec is not None else f"{state.n}-qubit state"
    best = None
    for label, pairs in tried:
        _, res = _classify_pairs(state, pairs)
        if best is None or res.label.rank > best.label.rank:
            best = WitnessReport(name, pairs, res, f"preset:{label}", state=state)
    if grid is not None:
        floor = best.label.rank if best else -1
        for objective in ("Strong", "Logical", "AnyContextual"):
            if _OBJECTIVES[objective].rank <= floor:
                break
            rep = grid_search(state, grid, objective, name)
            if rep is not None:
                best = rep
                break
        if best is None:
            z = tuple([(Z, X)] * state.n)
            _, res = _classify_pairs(state, z)
            best = WitnessReport(name, z, res, f"grid:{grid} (nothing contextual found)", state=state)
    best.notes.append("lower bound: only the listed observable choices were examined")
    return best


# -- dictatorship factorisation -------------------------------------------------

def dictatorship_factorization(n_parties: int, i: int, sign: str, pair_obs=None) -> float:
    """Largest deviation from "each dictatorship row slice is a multiple of the pair-model row".

    The pair state is (|00>+|11>)/sqrt2 for sign '+' and (|01>+|10>)/sqrt2 for '-'.
    """
    from .states import dictatorship

    if pair_obs is None:
        pair_obs = (A, B) if sign == "+" else (C, D)
    n = n_parties
    full = build_model(dictatorship(n, i, sign), Scenario.uniform(*pair_obs, n)).to_float()
    pair_state = bell("+") if sign == "+" else dicke(2, 1)
    pair = build_model(pair_state, Scenario.uniform(*pair_obs, 2)).to_float().probs
    t = full.probs.reshape([2] * (2 * n))
    pi, pn = i - 1, n - 1
    worst = 0.0
    for c in range(1 << n):
        s = [(c >> (n - 1 - p)) & 1 for p in range(n)]
        row = pair[(s[pi] << 1) | s[pn]]
        sl = t[tuple(s)]
        sl = np.moveaxis(sl, [pi, pn], [n - 2, n - 1]).reshape(-1, 4)
        for vec in sl:
            lam = float(vec @ row) / float(row @ row)
            worst = max(worst, float(np.max(np.abs(vec - lam * row))))
    return worst


# -- Bell-basis logical search ------------------------------------------------------

TWO_PI = 2 * PI


def _mod(x):
    return x % TWO_PI


def _near(x, target, tol=1e-9):
    d = abs(_mod(x - target))
    return min(d, TWO_PI - d) < tol


def _near_any(x, targets):
    return any(_near(x, t) for t in targets)


@dataclass(frozen=True)
class Condition:
    name: str
    text: str
    group: str        # "theta" or "phi"

    def holds(self, t1, t2, p1, p2) -> bool:
        return _CONDITION_TESTS[self.name](t1, t2, p1, p2)


_CONDITION_TESTS = {
    "c": lambda t1, t2, p1, p2: _near_any(t1, (0, PI)),
    "k": lambda t1, t2, p1, p2: _near_any(t2, (0, PI)),
    "f": lambda t1, t2, p1, p2: _near_any(p1, (0, PI / 2, PI, 3 * PI / 2)),
    "v": lambda t1, t2, p1, p2: _near_any(p2, (0, PI / 2, PI, 3 * PI / 2)),
    "fv": lambda t1, t2, p1, p2: _near_any(p1 + p2, (0, PI)),
    "cs": lambda t1, t2, p1, p2: _near_any(t1, (PI / 2, 3 * PI / 2)),
    "kz": lambda t1, t2, p1, p2: _near_any(t2, (PI / 2, 3 * PI / 2)),
    "ck": lambda t1, t2, p1, p2: _near(t1 + t2, PI) or _near(t1 - t2, PI),
    "cz": lambda t1, t2, p1, p2: _near(t1, t2) or _near(t1 + t2, 0),
}


@dataclass(frozen=True)
class ConditionSet:
    """Vanishing conditions on c, s, f (first observable) and k, z, v (second)."""

    conditions: tuple = (
        Condition("c", "c in {0, +-1}", "theta"),
        Condition("k", "k in {0, +-1}", "theta"),
        Condition("f", "f in {+-1, +-i}", "phi"),
        Condition("v", "v in {+-1, +-i}", "phi"),
        Condition("fv", "f = +-1/v", "phi"),
        Condition("cs", "c = +-s", "theta"),
        Condition("kz", "k = +-z", "theta"),
        Condition("ck", "ck = +-sz", "theta"),
        Condition("cz", "cz = +-sk", "theta"),
    )

    @property
    def names(self):
        return [c.name for c in self.conditions]

    def pattern(self, t1, t2, p1, p2) -> frozenset:
        return frozenset(c.name for c in self.conditions if c.holds(t1, t2, p1, p2))

    def subsets(self):
        names = self.names
        for r in range(len(names) + 1):
            for combo in itertools.combinations(names, r):
                yield frozenset(combo)


def parametric_table(t1, p1, t2, p2, sign: str = "+") -> np.ndarray:
    """Closed-form 2-party table of Phi+ (sign '+') or of the Phi- family (sign '-').

    Rows AA, AB, BA, BB; columns ++, +-, -+, --.  The '-' table is the '+'
    table with the second party's outcomes exchanged.
    """
    c, s, f = math.cos(t1 / 2), math.sin(t1 / 2), complex(math.cos(p1), math.sin(p1))
    k, z, v = math.cos(t2 / 2), math.sin(t2 / 2), complex(math.cos(p2), math.sin(p2))
    e = lambda x: abs(x) ** 2 / 2
    T = np.array([
        [e(c * c + f * f * s * s), e(c * s - f * f * c * s), e(c * s - f * f * c * s), e(s * s + f * f * c * c)],
        [e(c * k + f * v * s * z), e(c * z - f * v * s * k), e(s * k - f * v * c * z), e(s * z + f * v * c * k)],
        [e(c * k + f * v * s * z), e(s * k - f * v * c * z), e(c * z - f * v * s * k), e(s * z + f * v * c * k)],
        [e(k * k + v * v * z * z), e(k * z - v * v * k * z), e(k * z - v * v * k * z), e(z * z + v * v * k * k)],
    ])
    if sign == "-":
        T = T[:, [1, 0, 3, 2]]
    return T


def _angle_candidates(resolution, rng, relations):
    """First/second angle pairs: multiples of pi/2, generic samples, and relation-triggered partners."""
    special = [0.0, PI / 2, PI, 3 * PI / 2]
    generic = [rng.uniform(0, TWO_PI) for _ in range(resolution)]
    firsts = special + generic
    out = []
    for a in firsts:
        seconds = special + generic + [_mod(r(a)) for r in relations]
        seen = []
        for b in seconds:
            if not any(_near(b, x, 1e-12) for x in seen):
                seen.append(b)
                out.append((a, b))
    return out


def _logical_bruteforce(mask: np.ndarray) -> bool:
    """Two-party logical-or-strong check straight from the definition (16 assignments)."""
    hit = np.zeros_like(mask)
    for o in itertools.product((0, 1), repeat=4):   # (a0, a1, b0, b1)
        outs = [(o[s] << 1) | o[2 + t] for s in (0, 1) for t in (0, 1)]
        if all(mask[c, outs[c]] for c in range(4)):
            for c in range(4):
                hit[c, outs[c]] = True
    return bool((mask & ~hit).any())


@dataclass
class BellCheckReport:
    resolution: int
    seed: int
    tuples: int
    models: int
    subset_counts: dict            # frozenset of condition names -> number of tuples realising it
    supports: dict                 # 16-bit support mask -> (label, brute-force verdict)
    logical_found: list
    mismatches: list
    notes: list = field(default_factory=list)

    @property
    def subsets_total(self) -> int:
        return 1 << len(ConditionSet().names)

    @property
    def subsets_realised(self) -> int:
        return len(self.subset_counts)

    @property
    def ok(self) -> bool:
        return not self.logical_found and not self.mismatches

    def summary(self) -> str:
        lines = [
            f"condition subsets: {self.subsets_total} total, {self.subsets_realised} realised by parameter tuples, "
            f"{self.subsets_total - self.subsets_realised} unrealisable",
            f"parameter tuples: {self.tuples}; models built: {self.models}; distinct supports: {len(self.supports)}",
            f"logically contextual supports: {len(self.logical_found)}",
            f"brute-force disagreements: {len(self.mismatches)}",
        ]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "resolution": self.resolution, "seed": self.seed, "tuples": self.tuples, "models": self.models,
            "subsets_total": self.subsets_total, "subsets_realised": self.subsets_realised,
            "realised": {",".join(sorted(k)) or "{}": v for k, v in sorted(self.subset_counts.items(),
                                                                          key=lambda kv: sorted(kv[0]))},
            "distinct_supports": len(self.supports),
            "logical_found": len(self.logical_found),
            "mismatches": len(self.mismatches),
            "notes": self.notes,
        }


def bell_basis_logical_search(resolution: int = 8, seed: int = 0) -> BellCheckReport:
    """Check that no vanishing pattern of the Bell-basis tables yields a logically contextual support."""
    rng = random.Random(seed)
    conds = ConditionSet()
    theta_rel = [lambda a: PI - a, lambda a: a - PI, lambda a: a, lambda a: -a]
    phi_rel = [lambda a: -a, lambda a: PI - a]
    thetas = _angle_candidates(resolution, rng, theta_rel)
    phis = _angle_candidates(resolution, rng, phi_rel)

    counts: dict = {}
    tables = []
    for (t1, t2), (p1, p2) in itertools.product(thetas, phis):
        pat = conds.pattern(t1, t2, p1, p2)
        counts[pat] = counts.get(pat, 0) + 1
        tables.append(parametric_table(t1, p1, t2, p2, "+"))
    T = np.array(tables)
    masks = np.concatenate([T >= ZERO_TOL, T[:, :, [1, 0, 3, 2]] >= ZERO_TOL])
    weights = 1 << np.arange(16)
    keys = np.unique(masks.reshape(len(masks), 16).astype(np.int64) @ weights)

    scen = Scenario(2, (("A", "B"), ("A", "B")))
    supports, logical, mismatches = {}, [], []
    for key in keys:
        mask = ((int(key) >> np.arange(16)) & 1).astype(bool).reshape(4, 4)
        sup = SupportTable(scen, mask)
        codes = _codes(sup)
        if len(codes) == 0:
            label = Label.Strong
        elif _non_extendable_mask(sup, codes).any():
            label = Label.Logical
        else:
            label = Label.NonContextual
        brute = _logical_bruteforce(mask)
        supports[int(key)] = (label, brute)
        if label in (Label.Logical, Label.Strong):
            logical.append(int(key))
        if brute != (label in (Label.Logical, Label.Strong)):
            mismatches.append(int(key))
    notes = [
        "the '-' family table is the '+' table with the second party's outcomes exchanged; "
        "it covers both angle parameterisations of the C/D observables, since every symbol "
        "ranges over the same values either way",
        "generic samples illustrate, but do not prove, that no other zeros occur",
    ]
    return BellCheckReport(resolution, seed, len(tables), len(masks), counts, supports, logical, mismatches, notes)


# -- family sweep ---------------------------------------------------------------------

@dataclass
class SweepRow:
    poly: BooleanPolynomial
    predicted: PredictedClass
    empirical: Label
    witness: Label
    witness_obs: str
    agree: bool

    def csv_fields(self):
        return [self.poly.render(), self.predicted.value, self.empirical.value, self.witness.value,
                self.witness_obs, "yes" if self.agree else "NO"]


def _agrees(pred: PredictedClass, yz: Label, wit: Label) -> bool:
    if pred is PredictedClass.NonContextual:
        return yz is Label.NonContextual
    if pred is PredictedClass.Strong:
        return yz is Label.Strong
    if pred is PredictedClass.AtLeastLogical:
        return yz in (Label.Logical, Label.Strong)
    return wit is Label.Weak and yz.rank <= Label.Weak.rank


def sweep_one(poly: BooleanPolynomial) -> SweepRow:
    state = func_dep_state(poly)
    n = state.n
    pred = predicted_class(poly)
    _, res = _classify_pairs(state, tuple([(Y, Z)] * n))
    wit, obs = res.label, "Y/Z"
    if pred is PredictedClass.Weak:
        for name, pair in (("A/B", (A, B)), ("C/D", (C, D))):
            _, r = _classify_pairs(state, tuple([pair] * n))
            if r.label.rank > wit.rank:
                wit, obs = r.label, name
    return SweepRow(poly, pred, res.label, wit, obs, _agrees(pred, res.label, wit))


def family_polynomials(n_vars: int, cap: int = 256, seed: int = 0) -> list[BooleanPolynomial]:
    polys = list(all_polynomials(n_vars)) if n_vars <= 3 else None
    if polys is not None and len(polys) <= cap:
        return polys
    rng = random.Random(seed)
    masks = sorted(rng.sample(range(1 << (1 << n_vars)), cap))
    return [BooleanPolynomial.from_coefficient_mask(n_vars, m) for m in masks]


def family_sweep(n_vars: int, workers: int | None = None, cap: int = 256, seed: int = 0) -> list[SweepRow]:
    """Predicted versus empirical class for every (or a seeded sample of) n_vars-variable polynomial."""
    if not 1 <= n_vars <= 4:
        raise SizeBoundError("family sweeps are limited to 1..4 variables")
    polys = family_polynomials(n_vars, cap, seed)
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(sweep_one, polys, chunksize=8))
    return [sweep_one(p) for p in polys]


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["polynomial", "predicted", "empirical", "witness", "witness_observables", "agree"])
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()
