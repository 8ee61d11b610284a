"""Empirical models for (n, 2, 2) Bell scenarios.

Storage convention: ``probs[c, o]`` with context ``c`` and joint outcome ``o``
both read as n-bit integers, party 1 in the most significant bit.  A context
bit of 0 picks the party's first setting, an outcome bit of 0 means '+'.  The
display order used for tables and files lists contexts by the number of
second settings and then numerically, which reproduces the row order
YYY, YYZ, YZY, ZYY, YZZ, ... of the printed tables.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .qcore import ZERO_TOL, InexactError, Observable, SizeBoundError, StateVector, _contract

NS_TOL = 1e-9
# a model holds 4^n entries
MAX_MODEL_QUBITS = 12
FORMAT_TAG = "nonlocality.model/1"


class ModelFormatError(ValueError):
    """Malformed or invalid model file; ``location`` points at the offending field."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass(frozen=True)
class Scenario:
    n_parties: int
    labels: tuple          # ((label0, label1), ...) per party
    observables: tuple | None = None

    def __post_init__(self):
        if len(self.labels) != self.n_parties:
            raise ValueError("one label pair per party")
        for p, pair in enumerate(self.labels):
            if len(pair) != 2:
                raise ValueError(f"party {p + 1} needs exactly two settings")
            if pair[0] == pair[1]:
                raise ValueError(f"party {p + 1} has duplicate setting label {pair[0]!r}")
        if self.observables is not None and len(self.observables) != self.n_parties:
            raise ValueError("one observable pair per party")

    @classmethod
    def from_observables(cls, pairs: Sequence[tuple]) -> "Scenario":
        pairs = tuple(tuple(p) for p in pairs)
        labels = tuple((a.name, b.name) for a, b in pairs)
        return cls(len(pairs), labels, pairs)

    @classmethod
    def uniform(cls, first: Observable, second: Observable, n: int) -> "Scenario":
        return cls.from_observables([(first, second)] * n)

    @property
    def n_contexts(self) -> int:
        return 1 << self.n_parties

    def settings(self, context: int) -> list[int]:
        n = self.n_parties
        return [(context >> (n - 1 - p)) & 1 for p in range(n)]

    def context_index(self, settings: Sequence[int]) -> int:
        c = 0
        for s in settings:
            c = (c << 1) | int(s)
        return c

    def context_label(self, context: int) -> str:
        names = [self.labels[p][s] for p, s in enumerate(self.settings(context))]
        if all(len(x) == 1 for x in names):
            return "".join(names)
        return " ".join(names)

    def context_order(self) -> list[int]:
        return sorted(range(self.n_contexts), key=lambda c: (bin(c).count("1"), c))

    def outcome_label(self, outcome: int) -> str:
        n = self.n_parties
        return "".join("-" if (outcome >> (n - 1 - p)) & 1 else "+" for p in range(n))

    def outcome_index(self, label: str) -> int:
        label = label.replace("−", "-")
        if len(label) != self.n_parties or set(label) - {"+", "-"}:
            raise ValueError(f"bad outcome label {label!r}")
        return int(label.replace("+", "0").replace("-", "1"), 2)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class EmpiricalModel:
    """Per-context outcome distributions.  Exact models hold Fractions."""

    def __init__(self, scenario: Scenario, probs, exact: bool):
        probs = np.array(probs, dtype=object if exact else float)
        dim = scenario.n_contexts
        if probs.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} table, got {probs.shape}")
        self.scenario = scenario
        self.exact = exact
        self.probs = _freeze(probs)

    @property
    def n(self) -> int:
        return self.scenario.n_parties

    def prob(self, context, outcome) -> Fraction | float:
        if isinstance(context, str):
            context = self._context_from_label(context)
        if isinstance(outcome, str):
            outcome = self.scenario.outcome_index(outcome)
        return self.probs[context, outcome]

    def _context_from_label(self, label: str) -> int:
        for c in range(self.scenario.n_contexts):
            if self.scenario.context_label(c) == label:
                return c
        raise KeyError(label)

    def to_float(self) -> "EmpiricalModel":
        if not self.exact:
            return self
        return EmpiricalModel(self.scenario, self.probs.astype(float), False)

    def row_sum_errors(self):
        sums = self.probs.sum(axis=1)
        return [abs(s - 1) for s in sums]

    def signalling_violation(self):
        """Largest gap between single-party-marginalised rows of neighbouring contexts."""
        n = self.n
        t = self.probs.reshape([2] * (2 * n))
        worst = 0
        for p in range(n):
            marg = t.sum(axis=n + p)
            a = np.take(marg, 0, axis=p)
            b = np.take(marg, 1, axis=p)
            diff = a - b
            if self.exact:
                worst = max([worst] + [abs(x) for x in diff.reshape(-1)])
            else:
                worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def is_no_signalling(self, tol=NS_TOL) -> bool:
        v = self.signalling_violation()
        return v == 0 if self.exact else v <= tol

    def equals(self, other: "EmpiricalModel", tol=0.0) -> bool:
        if self.scenario.labels != other.scenario.labels:
            return False
        if self.exact and other.exact and tol == 0:
            return bool(np.all(self.probs == other.probs))
        return bool(np.allclose(self.probs.astype(float), other.probs.astype(float), atol=tol, rtol=0))

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"EmpiricalModel(n={self.n}, {mode}, labels={self.scenario.labels})"


class SupportTable:
    """Possibilistic collapse: ``mask[c, o]`` is True for outcomes of nonzero probability."""

    def __init__(self, scenario: Scenario, mask):
        mask = np.array(mask, dtype=bool)
        dim = scenario.n_contexts
        if mask.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} table")
        self.scenario = scenario
        self.mask = _freeze(mask)

    @property
    def n(self) -> int:
        return self.scenario.n_parties

    def row(self, context) -> frozenset:
        if isinstance(context, str):
            context = next(c for c in range(self.scenario.n_contexts)
                           if self.scenario.context_label(c) == context)
        return frozenset(int(o) for o in np.flatnonzero(self.mask[context]))

    def row_labels(self, context) -> set[str]:
        return {self.scenario.outcome_label(o) for o in self.row(context)}

    def __eq__(self, other):
        if not isinstance(other, SupportTable):
            return NotImplemented
        return self.scenario.n_parties == other.scenario.n_parties and bool(np.all(self.mask == other.mask))

    __hash__ = None

    def grid(self) -> list[list[int]]:
        """0/1 rows in display order."""
        return [[int(v) for v in self.mask[c]] for c in self.scenario.context_order()]


def _stacked_bases(scenario: Scenario, exact: bool):
    bases, scales = [], []
    for pair in scenario.observables:
        if exact:
            parts = [obs.gaussian_basis() for obs in pair]
            br = np.concatenate([p[0] for p in parts]).astype(object)
            bi = np.concatenate([p[1] for p in parts]).astype(object)
            bases.append((br, bi))
            scales.append([p[2] for p in parts])
        else:
            bases.append(np.concatenate([obs.complex_basis() for obs in pair]))
    return bases, scales


def _table_from_tensor(t: np.ndarray, n: int) -> np.ndarray:
    # axes per party are (setting*2 + outcome); split and move settings first
    t = t.reshape([2, 2] * n)
    order = [2 * p for p in range(n)] + [2 * p + 1 for p in range(n)]
    return t.transpose(order).reshape(1 << n, 1 << n)


def build_model(state: StateVector, scenario: Scenario) -> EmpiricalModel:
    """Born-rule table of ``state`` under the scenario's observables; exact when possible."""
    if scenario.observables is None:
        raise ValueError("scenario carries no observables")
    if scenario.n_parties != state.n:
        raise ValueError(f"scenario has {scenario.n_parties} parties but the state has {state.n} qubits")
    n = state.n
    if n > MAX_MODEL_QUBITS:
        raise SizeBoundError(f"model tables are limited to {MAX_MODEL_QUBITS} qubits (got {n})")
    exact = state.exact and all(o.exact for pair in scenario.observables for o in pair)
    if exact:
        try:
            bases, scales = _stacked_bases(scenario, True)
        except InexactError:
            exact = False
    if exact:
        tr, ti = _contract(state, bases, True)
        num = _table_from_tensor(tr * tr + ti * ti, n)
        probs = np.empty(num.shape, dtype=object)
        for c in range(1 << n):
            m = sum(scales[p][(c >> (n - 1 - p)) & 1] for p in range(n))
            den = state.norm2 * (1 << m)
            probs[c] = [Fraction(int(v), den) for v in num[c]]
        return EmpiricalModel(scenario, probs, True)
    bases, _ = _stacked_bases(scenario, False)
    t = _contract(state.to_float(), bases, False)
    return EmpiricalModel(scenario, _table_from_tensor(np.abs(t) ** 2, n), False)


def support(model: EmpiricalModel) -> SupportTable:
    if model.exact:
        mask = model.probs != 0
    else:
        mask = model.probs.astype(float) >= ZERO_TOL
    return SupportTable(model.scenario, mask)


@dataclass(frozen=True)
class Relabeling:
    """Per-party outcome swaps, applied to every setting of a flipped party."""

    flags: tuple

    @classmethod
    def from_image(cls, image: str) -> "Relabeling":
        """Relabeling written as the image of the all-'+' outcome, e.g. '++-'."""
        image = image.replace("−", "-").replace("+++↦", "")
        if set(image) - {"+", "-"}:
            raise ValueError(f"bad relabeling {image!r}")
        return cls(tuple(ch == "-" for ch in image))

    @classmethod
    def identity(cls, n: int) -> "Relabeling":
        return cls((False,) * n)

    @property
    def mask(self) -> int:
        m = 0
        for f in self.flags:
            m = (m << 1) | int(f)
        return m

    def compose(self, other: "Relabeling") -> "Relabeling":
        return Relabeling(tuple(a != b for a, b in zip(self.flags, other.flags)))

    def __str__(self):
        return "+" * len(self.flags) + "->" + "".join("-" if f else "+" for f in self.flags)


def relabel(obj, r: Relabeling):
    """Permute outcome columns by the per-party sign swaps in ``r``."""
    if len(r.flags) != obj.scenario.n_parties:
        raise ValueError("relabeling size does not match the scenario")
    perm = np.arange(obj.scenario.n_contexts) ^ r.mask
    if isinstance(obj, SupportTable):
        new = np.empty_like(obj.mask)
        new[:, perm] = obj.mask
        return SupportTable(obj.scenario, new)
    new = np.empty_like(obj.probs)
    new[:, perm] = obj.probs
    return EmpiricalModel(obj.scenario, new, obj.exact)


def pr_box() -> EmpiricalModel:
    """Popescu-Rohrlich box: a xor b = s and t, uniformly."""
    scen = Scenario(2, (("a0", "a1"), ("b0", "b1")))
    probs = np.empty((4, 4), dtype=object)
    for c in range(4):
        s, t = c >> 1, c & 1
        for o in range(4):
            a, b = o >> 1, o & 1
            probs[c, o] = Fraction(1, 2) if (a ^ b) == (s & t) else Fraction(0)
    return EmpiricalModel(scen, probs, True)


# -- serialisation ----------------------------------------------------------

def _observable_to_json(obs):
    d = {"kind": obs.kind}
    if obs.kind == "U":
        d.update(theta=obs.theta, phi=obs.phi)
    if obs.label:
        d["label"] = obs.label
    return d


def _observable_from_json(d, loc):
    if not isinstance(d, dict) or "kind" not in d:
        raise ModelFormatError("observable must be an object with a kind", loc)
    try:
        if d["kind"] == "U":
            return Observable.bloch(float(d["theta"]), float(d["phi"]), d.get("label"))
        return Observable(d["kind"], label=d.get("label"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad observable: {exc}", loc) from None


def _fmt_prob(p, exact):
    if exact:
        p = Fraction(p)
        return f"{p.numerator}/{p.denominator}" if p.denominator != 1 else str(p.numerator)
    return float(f"{float(p):.17g}")


def to_json_dict(model: EmpiricalModel) -> dict:
    scen = model.scenario
    obs = None
    if scen.observables is not None and all(isinstance(o, Observable) for pr in scen.observables for o in pr):
        obs = [[_observable_to_json(o) for o in pair] for pair in scen.observables]
    return {
        "format": FORMAT_TAG,
        "n_parties": scen.n_parties,
        "mode": "exact" if model.exact else "float",
        "scenario": {"labels": [list(p) for p in scen.labels], "observables": obs},
        "outcomes": [scen.outcome_label(o) for o in range(scen.n_contexts)],
        "rows": [
            {
                "context": scen.settings(c),
                "label": scen.context_label(c),
                "probs": [_fmt_prob(p, model.exact) for p in model.probs[c]],
            }
            for c in scen.context_order()
        ],
    }


def serialize(model: EmpiricalModel) -> str:
    return json.dumps(to_json_dict(model), indent=1)


def _parse_prob(v, exact, loc):
    if exact:
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            raise ModelFormatError("exact probabilities must be 'p/q' strings", loc)
        try:
            p = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ModelFormatError(f"bad rational {v!r}", loc) from None
    else:
        if isinstance(v, bool) or not isinstance(v, (int, float, str)):
            raise ModelFormatError("expected a number", loc)
        try:
            p = float(v)
        except ValueError:
            raise ModelFormatError(f"bad number {v!r}", loc) from None
        if not math.isfinite(p):
            raise ModelFormatError("probability is not finite", loc)
    if p < 0:
        raise ModelFormatError("negative probability", loc)
    return p


def from_json_dict(doc) -> EmpiricalModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be an object", "$")
    mode = doc.get("mode")
    if mode not in ("exact", "float"):
        raise ModelFormatError("mode must be 'exact' or 'float'", "$.mode")
    exact = mode == "exact"
    scen_doc = doc.get("scenario")
    if not isinstance(scen_doc, dict) or not isinstance(scen_doc.get("labels"), list):
        raise ModelFormatError("missing scenario.labels", "$.scenario")
    labels = scen_doc["labels"]
    n = doc.get("n_parties", len(labels))
    if not isinstance(n, int) or n < 1 or n != len(labels):
        raise ModelFormatError("n_parties does not match the label list", "$.n_parties")
    for p, pair in enumerate(labels):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise ModelFormatError("each party needs two string labels", f"$.scenario.labels[{p}]")
    obs = None
    if scen_doc.get("observables") is not None:
        raw = scen_doc["observables"]
        if not isinstance(raw, list) or len(raw) != n:
            raise ModelFormatError("one observable pair per party", "$.scenario.observables")
        obs = tuple(
            tuple(_observable_from_json(o, f"$.scenario.observables[{p}][{s}]") for s, o in enumerate(pair))
            for p, pair in enumerate(raw)
        )
    try:
        scen = Scenario(n, tuple(tuple(p) for p in labels), obs)
    except ValueError as exc:
        raise ModelFormatError(str(exc), "$.scenario") from None
    rows = doc.get("rows")
    dim = 1 << n
    if not isinstance(rows, list) or len(rows) != dim:
        raise ModelFormatError(f"expected {dim} rows", "$.rows")
    probs = np.empty((dim, dim), dtype=object if exact else float)
    seen = set()
    for r, row in enumerate(rows):
        loc = f"$.rows[{r}]"
        if not isinstance(row, dict):
            raise ModelFormatError("row must be an object", loc)
        ctx = row.get("context")
        if not (isinstance(ctx, list) and len(ctx) == n and all(s in (0, 1) for s in ctx)):
            raise ModelFormatError("context must list one 0/1 setting per party", loc + ".context")
        c = scen.context_index(ctx)
        if c in seen:
            raise ModelFormatError("duplicate context", loc + ".context")
        seen.add(c)
        vals = row.get("probs")
        if not isinstance(vals, list) or len(vals) != dim:
            raise ModelFormatError(f"expected {dim} probabilities", loc + ".probs")
        parsed = [_parse_prob(v, exact, f"{loc}.probs[{k}]") for k, v in enumerate(vals)]
        total = sum(parsed, Fraction(0) if exact else 0.0)
        if (exact and total != 1) or (not exact and abs(total - 1) > NS_TOL):
            raise ModelFormatError(f"row sums to {total}, not 1", loc + ".probs")
        probs[c] = parsed
    return EmpiricalModel(scen, probs, exact)


def deserialize(text: str) -> EmpiricalModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    return from_json_dict(doc)


# -- rendering --------------------------------------------------------------

def _cell(p, exact, dp):
    if exact and dp is None:
        p = Fraction(p)
        return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
    return f"{float(p):.{6 if dp is None else dp}f}"


def format_table(obj, fmt: str = "text", dp: int | None = None) -> str:
    """Render a model or support table; rows in display order, columns +..+ to -..-."""
    scen = obj.scenario
    header = [scen.outcome_label(o) for o in range(scen.n_contexts)]
    order = scen.context_order()
    if isinstance(obj, SupportTable):
        rows = [[str(int(v)) for v in obj.mask[c]] for c in order]
    else:
        rows = [[_cell(p, obj.exact, dp) for p in obj.probs[c]] for c in order]
    labels = [scen.context_label(c) for c in order]
    if fmt == "csv":
        lines = [",".join(["context"] + header)]
        lines += [",".join([lab] + row) for lab, row in zip(labels, rows)]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        if isinstance(obj, SupportTable):
            return json.dumps({"outcomes": header, "rows": [{"label": l, "support": [int(x) for x in r]}
                                                            for l, r in zip(labels, rows)]}, indent=1) + "\n"
        return serialize(obj) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lw = max(len(l) for l in labels)
    cw = max(max(len(h) for h in header), max(len(x) for r in rows for x in r))
    lines = [" " * lw + " | " + " ".join(h.rjust(cw) for h in header)]
    lines.append("-" * lw + "-+-" + "-" * ((cw + 1) * len(header) - 1))
    for lab, row in zip(labels, rows):
        lines.append(lab.ljust(lw) + " | " + " ".join(x.rjust(cw) for x in row))
    return "\n".join(lines) + "\n"
