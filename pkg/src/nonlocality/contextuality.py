"""Classification in the strong / logical / weak hierarchy.

Strong and logical contextuality are decided combinatorially from the support
by enumerating consistent global assignments.  Weak contextuality is decided
by a linear program over the support-consistent assignments, posed in the
reduced coordinates described in ``_coordinate_layout``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import simplex
from ._kernels import consistent_codes, hit_sections, outcome_matrix
from .empirical import EmpiricalModel, Scenario, SupportTable, build_model, support
from .qcore import Observable, SizeBoundError

MAX_ENUM_PARTIES = 14
MAX_LP_PARTIES = 10
FEAS_TOL = 1e-9
INFEAS_TOL = 1e-7
# expanding a certificate over every deterministic vertex is skipped past this many
MAX_VERTEX_EXPANSION = 1 << 20


class CertificateError(ValueError):
    pass


class Label(str, enum.Enum):
    NonContextual = "NonContextual"
    Indeterminate = "Indeterminate"
    Weak = "Weak"
    Logical = "Logical"
    Strong = "Strong"

    @property
    def rank(self) -> int:
        return _RANK[self]

    def __str__(self):
        return self.value


_RANK = {Label.NonContextual: 0, Label.Indeterminate: 1, Label.Weak: 2, Label.Logical: 3, Label.Strong: 4}


@dataclass(frozen=True, order=True)
class GlobalAssignment:
    """One outcome per (party, setting), packed as in the kernels (outcome bit 1 = '-')."""

    n: int
    code: int

    def outcome(self, party: int, setting: int) -> int:
        a = (self.code >> (2 * (self.n - 1 - party))) & 3
        return (a >> setting) & 1

    def restrict(self, context: int) -> int:
        out = 0
        for p in range(self.n):
            s = (context >> (self.n - 1 - p)) & 1
            out = (out << 1) | self.outcome(p, s)
        return out

    @classmethod
    def from_outcomes(cls, pairs) -> "GlobalAssignment":
        """``pairs[p] = (o0, o1)`` with '+'/'-' or 0/1 entries."""
        code = 0
        for o0, o1 in pairs:
            o0, o1 = (1 if x in ("-", 1) else 0 for x in (o0, o1))
            code = code * 4 + (o0 | (o1 << 1))
        return cls(len(pairs), code)

    def signs(self) -> str:
        """First-setting outcomes of every party, then second-setting outcomes."""
        sym = "+-"
        return "".join(sym[self.outcome(p, 0)] for p in range(self.n)) + \
            "".join(sym[self.outcome(p, 1)] for p in range(self.n))

    def __str__(self):
        return self.signs()


def _check_enum(n):
    if n > MAX_ENUM_PARTIES:
        raise SizeBoundError(f"assignment enumeration is limited to {MAX_ENUM_PARTIES} parties (got {n})")


def _as_support(obj) -> SupportTable:
    return support(obj) if isinstance(obj, EmpiricalModel) else obj


def _codes(sup: SupportTable) -> np.ndarray:
    _check_enum(sup.n)
    return consistent_codes(sup.mask, sup.n)


def consistent_assignments(obj) -> list[GlobalAssignment]:
    """Global assignments whose restriction to every context is possible."""
    sup = _as_support(obj)
    return [GlobalAssignment(sup.n, int(c)) for c in _codes(sup)]


def _non_extendable_mask(sup: SupportTable, codes) -> np.ndarray:
    hits = hit_sections(codes, sup.n).astype(bool)
    return sup.mask & ~hits


def non_extendable_sections(obj) -> dict[int, frozenset]:
    """Context -> possible outcomes that no consistent assignment restricts to."""
    sup = _as_support(obj)
    bad = _non_extendable_mask(sup, _codes(sup))
    return {c: frozenset(int(o) for o in np.flatnonzero(bad[c])) for c in range(sup.scenario.n_contexts)}


# -- linear program -----------------------------------------------------------

def _coordinate_layout(n):
    """For each reduced coordinate: (context, mask of parties that must show '+').

    A coordinate assigns each party one of {absent, setting 0, setting 1};
    absent parties sit at setting 0 in the canonical context.
    """
    ctx, pmask = [], []
    for idx in range(3 ** n):
        c = m = 0
        t = idx
        digits = []
        for _ in range(n):
            digits.append(t % 3)
            t //= 3
        for p, d in enumerate(reversed(digits)):
            bit = 1 << (n - 1 - p)
            if d:
                m |= bit
            if d == 2:
                c |= bit
        ctx.append(c)
        pmask.append(m)
    return np.array(ctx), np.array(pmask)


def _model_coordinates(model: EmpiricalModel):
    n = model.n
    ctx, pmask = _coordinate_layout(n)
    outs = np.arange(1 << n)
    sel = (outs[None, :] & pmask[:, None]) == 0
    rows = model.probs[ctx]
    if model.exact:
        return [sum((p for p, keep in zip(r, s) if keep), Fraction(0)) for r, s in zip(rows, sel)]
    return (rows * sel).sum(axis=1)


def _vertex_coordinates(codes, n) -> np.ndarray:
    """0/1 matrix R[v, i]: does assignment v show '+' on every party of coordinate i."""
    codes = np.asarray(codes, dtype=np.int64)
    R = np.ones((codes.size, 1), dtype=np.int8)
    for p in range(n):
        a = (codes >> (2 * (n - 1 - p))) & 3
        f = np.stack([np.ones_like(a), 1 - (a & 1), 1 - (a >> 1)], axis=1).astype(np.int8)
        R = (R[:, :, None] * f[:, None, :]).reshape(codes.size, -1)
    return R


class LPStatus(str, enum.Enum):
    Feasible = "feasible"
    Infeasible = "infeasible"
    Indeterminate = "indeterminate"

    def __str__(self):
        return self.value


@dataclass
class BellInequality:
    """sum(coefficients * table) <= bound for every noncontextual model."""

    coefficients: np.ndarray     # (contexts, outcomes)
    bound: object = 0
    valid_for_all_vertices: bool = True

    def evaluate(self, model: EmpiricalModel):
        coef = self.coefficients
        if model.exact and coef.dtype == object:
            return sum((a * b for a, b in zip(coef.reshape(-1), model.probs.reshape(-1))), Fraction(0))
        return float(np.sum(coef.astype(float) * model.probs.astype(float)))

    def vertex_max(self, n):
        codes = np.arange(1 << (2 * n), dtype=np.int64)
        out = outcome_matrix(codes, n)
        coef = self.coefficients
        ctx = np.arange(1 << n)
        vals = coef[ctx[None, :], out].sum(axis=1)
        return max(vals)


@dataclass
class LPResult:
    status: LPStatus
    exact: bool
    distribution: dict | None = None      # GlobalAssignment -> weight
    certificate: BellInequality | None = None
    violation: object = None
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is LPStatus.Feasible

    def marginal_table(self, n):
        """Context table induced by the distribution."""
        dim = 1 << n
        if self.distribution is None:
            return None
        table = np.zeros((dim, dim), dtype=object if self.exact else float)
        if self.exact:
            table[:] = Fraction(0)
        for ga, w in self.distribution.items():
            for c in range(dim):
                table[c, ga.restrict(c)] += w
        return table


def _expand_certificate(y, n, ctx, pmask, exact, sup: SupportTable | None):
    dim = 1 << n
    coef = np.zeros((dim, dim), dtype=object if exact else float)
    if exact:
        coef[:] = Fraction(0)
    outs = np.arange(dim)
    for i, yi in enumerate(y):
        if yi == 0:
            continue
        cols = outs[(outs & pmask[i]) == 0]
        coef[ctx[i], cols] += yi
    ineq = BellInequality(coef, 0, valid_for_all_vertices=True)
    if sup is None:
        return ineq
    if 4 ** n > MAX_VERTEX_EXPANSION:
        ineq.valid_for_all_vertices = False
        return ineq
    # penalise impossible sections so that support-inconsistent vertices also satisfy it
    peak = ineq.vertex_max(n)
    if peak > 0:
        zero = ~sup.mask
        coef[zero] -= peak
    return ineq


def _exact_certificate(m, R, n):
    L = [Fraction(3 ** n)] + [Fraction(1)] * (len(m) - 1)
    A = [list(map(int, row)) for row in R]
    b = [sum(L[i] for i in np.flatnonzero(row)) for row in R]
    for i in range(len(m)):
        row = [0] * len(m)
        row[i] = 1
        A.append(row)
        b.append(2 * L[i])
    opt, t = simplex.maximize(m, A, b)
    y = [ti - li for ti, li in zip(t, L)]
    return y, opt - sum(mi * li for mi, li in zip(m, L))


def _float_certificate(m, R, n):
    from scipy.optimize import linprog

    k = len(m)
    bounds = [(-float(3 ** n), float(3 ** n))] + [(-1.0, 1.0)] * (k - 1)
    res = linprog(-np.asarray(m, dtype=float), A_ub=R.astype(float) if len(R) else None,
                  b_ub=np.zeros(len(R)) if len(R) else None, bounds=bounds, method="highs")
    if res.status != 0:
        return None, None
    y = res.x
    worst = float(np.max(R @ y)) if len(R) else 0.0
    return y, float(np.dot(m, y)) - max(worst, 0.0)


def _float_primal(m, R):
    from scipy.optimize import linprog

    K = R.shape[0]
    res = linprog(np.zeros(K), A_eq=R.T.astype(float), b_eq=np.asarray(m, dtype=float),
                  bounds=[(0, None)] * K, method="highs")
    if res.status != 0:
        return None
    return res.x


def lp_noncontextual(model: EmpiricalModel, codes=None) -> LPResult:
    """Decide whether the model is a convex mixture of consistent global assignments."""
    n = model.n
    if n > MAX_LP_PARTIES:
        raise SizeBoundError(f"the LP is limited to {MAX_LP_PARTIES} parties (got {n})")
    sup = support(model)
    if not model.is_no_signalling():
        return LPResult(LPStatus.Infeasible, model.exact, violation=model.signalling_violation(),
                        note="model is signalling; no hidden-variable model exists")
    if codes is None:
        codes = _codes(sup)
    ctx, pmask = _coordinate_layout(n)
    m = _model_coordinates(model)
    R = _vertex_coordinates(codes, n) if len(codes) else np.zeros((0, 3 ** n), dtype=np.int8)

    if model.exact:
        x = simplex.find_feasible(R.T.tolist(), m) if len(codes) else None
        if x is not None:
            dist = {GlobalAssignment(n, int(c)): w for c, w in zip(codes, x) if w}
            return LPResult(LPStatus.Feasible, True, distribution=dist, violation=Fraction(0))
        y, viol = _exact_certificate(m, R, n)
        cert = _expand_certificate(y, n, ctx, pmask, True, sup)
        return LPResult(LPStatus.Infeasible, True, certificate=cert, violation=viol)

    y, viol = _float_certificate(m, R, n)
    if y is None:
        return LPResult(LPStatus.Indeterminate, False, note="certificate LP did not solve")
    if viol > INFEAS_TOL:
        cert = _expand_certificate(list(y), n, ctx, pmask, False, sup)
        return LPResult(LPStatus.Infeasible, False, certificate=cert, violation=viol)
    if viol > FEAS_TOL:
        return LPResult(LPStatus.Indeterminate, False, violation=viol,
                        note="separation margin between feasibility and infeasibility tolerances")
    x = _float_primal(m, R) if len(codes) else None
    if x is None:
        return LPResult(LPStatus.Indeterminate, False, violation=viol, note="primal LP did not solve")
    dist = {GlobalAssignment(n, int(c)): float(w) for c, w in zip(codes, x) if w > 1e-12}
    return LPResult(LPStatus.Feasible, False, distribution=dist, violation=viol)


# -- classification -------------------------------------------------------------

@dataclass
class ContextualityClass:
    label: Label
    n_consistent: int
    non_extendable: dict = field(default_factory=dict)   # context -> frozenset of outcomes
    lp: LPResult | None = None
    scenario: Scenario | None = None

    def __str__(self):
        return self.label.value

    @property
    def n_non_extendable(self) -> int:
        return sum(len(v) for v in self.non_extendable.values())

    def summary(self) -> str:
        parts = [f"{self.label.value}", f"consistent assignments: {self.n_consistent}"]
        if self.label in (Label.Logical, Label.Strong):
            parts.append(f"non-extendable sections: {self.n_non_extendable}")
        if self.lp is not None:
            parts.append(f"LP: {self.lp.status}")
            if self.lp.violation is not None and self.lp.status is LPStatus.Infeasible:
                parts.append(f"violation: {_num(self.lp.violation)}")
        return "; ".join(parts)

    def to_json_dict(self) -> dict:
        scen = self.scenario
        lab = (lambda c: scen.context_label(c)) if scen else str
        out_lab = (lambda o: scen.outcome_label(o)) if scen else str
        d = {
            "label": self.label.value,
            "consistent_assignments": self.n_consistent,
            "non_extendable": {lab(c): sorted(out_lab(o) for o in v)
                               for c, v in sorted(self.non_extendable.items()) if v},
        }
        if self.lp is not None:
            d["lp"] = lp_to_json(self.lp, scen)
        return d


def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    return f"{float(v):.10g}"


def lp_to_json(res: LPResult, scen: Scenario | None = None) -> dict:
    d = {"status": res.status.value, "mode": "exact" if res.exact else "float"}
    if res.violation is not None:
        d["violation"] = _num(res.violation)
    if res.note:
        d["note"] = res.note
    if res.distribution is not None:
        d["distribution"] = {str(g): _num(w) for g, w in sorted(res.distribution.items())}
    if res.certificate is not None:
        coef = res.certificate.coefficients
        order = scen.context_order() if scen else range(coef.shape[0])
        d["certificate"] = {
            "bound": _num(res.certificate.bound),
            "valid_for_all_vertices": res.certificate.valid_for_all_vertices,
            "rows": [{"context": scen.context_label(c) if scen else c,
                      "coefficients": [_num(x) for x in coef[c]]} for c in order],
        }
    return d


_observers = []


def add_observer(fn):
    """Call ``fn(model, result)`` after every classification (used for auditing)."""
    _observers.append(fn)
    return fn


def remove_observer(fn):
    if fn in _observers:
        _observers.remove(fn)


def classify(model: EmpiricalModel, run_lp: bool = True) -> ContextualityClass:
    res = _classify(model, run_lp)
    for fn in list(_observers):
        fn(model, res)
    return res


def _classify(model: EmpiricalModel, run_lp: bool) -> ContextualityClass:
    n = model.n
    _check_enum(n)
    sup = support(model)
    codes = consistent_codes(sup.mask, n)
    if len(codes) == 0:
        nonext = {c: frozenset(int(o) for o in np.flatnonzero(sup.mask[c])) for c in range(1 << n)}
        return ContextualityClass(Label.Strong, 0, nonext, scenario=model.scenario)
    bad = _non_extendable_mask(sup, codes)
    nonext = {c: frozenset(int(o) for o in np.flatnonzero(bad[c])) for c in range(1 << n)}
    if bad.any():
        return ContextualityClass(Label.Logical, len(codes), nonext, scenario=model.scenario)
    if not run_lp:
        return ContextualityClass(Label.Indeterminate, len(codes), nonext, scenario=model.scenario)
    lp = lp_noncontextual(model, codes)
    label = {LPStatus.Feasible: Label.NonContextual, LPStatus.Infeasible: Label.Weak,
             LPStatus.Indeterminate: Label.Indeterminate}[lp.status]
    return ContextualityClass(label, len(codes), nonext, lp, scenario=model.scenario)


def check_hierarchy(model: EmpiricalModel, result: ContextualityClass, lp_check: bool = True) -> list[str]:
    """Consistency problems between a classification and its model (empty when sound)."""
    problems = []
    sup = support(model)
    label = result.label
    covered = all(result.non_extendable.get(c, frozenset()) == sup.row(c) for c in range(sup.scenario.n_contexts))
    if label is Label.Strong:
        if result.n_consistent:
            problems.append("Strong with consistent assignments")
        if not covered:
            problems.append("Strong but some possible section extends")
    elif label is Label.Logical:
        if result.n_consistent < 1:
            problems.append("Logical without a consistent assignment")
        if not result.n_non_extendable:
            problems.append("Logical without a non-extendable section")
        for c, outs in result.non_extendable.items():
            for o in outs:
                if not model.probs[c, o] > 0:
                    problems.append(f"non-extendable section {c}/{o} has zero probability")
    else:
        if result.n_non_extendable:
            problems.append(f"{label} but non-extendable sections exist")
    if label is Label.NonContextual:
        table = result.lp.marginal_table(model.n) if result.lp is not None else None
        if table is None:
            problems.append("NonContextual without a hidden-variable distribution")
        elif model.exact:
            if not np.all(table == model.probs):
                problems.append("distribution does not reproduce the model")
        elif not np.allclose(table, model.probs.astype(float), atol=1e-7):
            problems.append("distribution does not reproduce the model")
    if label is Label.Weak and result.lp is not None and result.lp.certificate is not None:
        cert = result.lp.certificate
        if not cert.evaluate(model) > cert.bound:
            problems.append("certificate is not violated by the model")
    if lp_check and label in (Label.Strong, Label.Logical) and model.n <= 4:
        if lp_noncontextual(model).status is LPStatus.Feasible:
            problems.append(f"{label} model has a feasible hidden-variable LP")
    return problems


# -- Dicke certificate --------------------------------------------------------------

@dataclass
class DickeCertificate:
    n: int
    k: int
    implications: list            # (i, j, z-pattern on the other sites) verified on S_ij
    z_disjuncts: list             # all-Z support, as outcome strings
    closure_classes: int          # equivalence classes after merging (1 = all x equal)
    x_equal_mass: Fraction
    violation: Fraction
    label: Label = Label.Logical

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "k": self.k, "label": self.label.value,
            "implications_checked": len(self.implications),
            "z_disjuncts": len(self.z_disjuncts),
            "closure_classes": self.closure_classes,
            "x_equal_mass": str(self.x_equal_mass),
            "violation": str(self.violation),
        }


def _outcome_string(bits, n):
    return "".join("-" if (bits >> (n - 1 - p)) & 1 else "+" for p in range(n))


def dicke_certificate(n: int, k: int) -> DickeCertificate:
    """Verify the logical-contextuality argument for S(n, k) on its X/Z model."""
    from .states import dicke

    if not 0 < k < n:
        raise CertificateError(f"k must satisfy 0 < k < n (got n={n}, k={k})")
    if n > MAX_ENUM_PARTIES:
        raise SizeBoundError(f"certificate limited to {MAX_ENUM_PARTIES} parties")
    scen = Scenario.uniform(Observable("X"), Observable("Z"), n)
    model = build_model(dicke(n, k), scen)
    sup = support(model)
    full = (1 << n) - 1

    # (a) X on i, j and Z elsewhere with k-1 '+' among the Z sites: x_i == x_j
    implications = []
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << (n - 1 - i), 1 << (n - 1 - j)
            ctx = full & ~(bi | bj)
            for o in range(1 << n):
                rest = o & ~(bi | bj)
                plus = n - 2 - bin(rest).count("1")
                if plus != k - 1 or (o & bi) or (o & bj):
                    continue
                for diff in (bi, bj):
                    if sup.mask[ctx, rest | diff]:
                        raise CertificateError(f"S_{i + 1}{j + 1} contains {_outcome_string(rest | diff, n)}")
                implications.append((i + 1, j + 1, _outcome_string(rest, n)))

    # (b) all-Z row: exactly the outcomes with k '+'
    zrow = sup.row(full)
    expected = {o for o in range(1 << n) if n - bin(o).count("1") == k}
    if zrow != expected:
        raise CertificateError("all-Z support differs from the k-out-of-n disjunction")
    disjuncts = sorted(_outcome_string(o, n) for o in zrow)

    # (c) union-find over opposite-polarity pairs of each disjunct
    classes = 0
    for o in sorted(zrow):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        pos = [p for p in range(n) if not (o >> (n - 1 - p)) & 1]
        neg = [p for p in range(n) if (o >> (n - 1 - p)) & 1]
        for a in pos:
            for b in neg:
                parent[find(a)] = find(b)
        classes = max(classes, len({find(a) for a in range(n)}))
    if classes != 1:
        raise CertificateError("closure does not identify all X outcomes")

    # (d) all-X row mass on the two all-equal outcomes
    mass = model.probs[0, 0] + model.probs[0, full]
    if mass != Fraction(comb(n, k), 2 ** (n - 1)):
        raise CertificateError(f"all-X equal-outcome mass {mass} differs from C(n,k)/2^(n-1)")
    if not mass < 1:
        raise CertificateError(
            f"strictness fails: C({n},{k})/2^{n - 1} = {mass} is not below 1, "
            "so the all-equal outcomes exhaust the all-X support")
    return DickeCertificate(n, k, implications, disjuncts, classes, mass, 1 - mass)


def dicke_violation(n: int, k: int) -> Fraction:
    return 1 - Fraction(math.comb(n, k), 2 ** (n - 1))
