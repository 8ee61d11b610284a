"""Constructors for the state families used throughout the package, and their text specs.

Spec strings: ``dicke:n,k``, ``ghz:n``, ``bell:+`` / ``bell:-``, ``fd:<poly>``,
``dict:n_parties,i,+|-``, ``zero:n`` and ``vec:a0,a1,...`` (integer entries
give an exact state, anything else a float one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boolfn import BooleanPolynomial, parse_poly
from .qcore import StateVector


class StateSpecError(ValueError):
    pass


def dicke(n: int, k: int) -> StateVector:
    """Equal superposition of the n-bit kets with exactly k zeros."""
    if n < 2:
        raise StateSpecError("Dicke states need n >= 2")
    if not 0 < k < n:
        raise StateSpecError(f"Dicke S({n},{k}) needs 0 < k < n; the endpoints are product states")
    amps = [1 if n - bin(x).count("1") == k else 0 for x in range(1 << n)]
    return StateVector(n, re=amps)


def func_dep_state(poly: BooleanPolynomial) -> StateVector:
    """Balanced (n+1)-qubit state sum_q |q, F(q)> / 2^(n/2); the function qubit is last."""
    n = poly.n_vars
    if n < 1:
        raise StateSpecError("need at least one variable")
    amps = [0] * (1 << (n + 1))
    for q, f in enumerate(poly.truth_table()):
        amps[(q << 1) | f] = 1
    return StateVector(n + 1, re=amps)


def ghz(n: int) -> StateVector:
    if n < 2:
        raise StateSpecError("GHZ states need n >= 2")
    amps = [0] * (1 << n)
    amps[0] = amps[-1] = 1
    return StateVector(n, re=amps)


def bell(sign: str = "+") -> StateVector:
    """(|00> + |11>)/sqrt2 for '+', (|00> - |11>)/sqrt2 for '-'."""
    if sign not in ("+", "-"):
        raise StateSpecError(f"bell sign must be + or -, got {sign!r}")
    return StateVector(2, re=[1, 0, 0, 1 if sign == "+" else -1])


def dictatorship(n_parties: int, i: int, sign: str = "+") -> StateVector:
    """Last qubit copies (sign '+') or negates (sign '-') qubit ``i``; other qubits in |+>."""
    if n_parties < 2:
        raise StateSpecError("a dictatorship needs at least two parties")
    if not 1 <= i <= n_parties - 1:
        raise StateSpecError(f"dictator index {i} out of range 1..{n_parties - 1}")
    if sign not in ("+", "-"):
        raise StateSpecError(f"dictatorship sign must be + or -, got {sign!r}")
    poly = BooleanPolynomial.variable(n_parties - 1, i)
    if sign == "-":
        poly = poly + 1
    return func_dep_state(poly)


def product_zero(n: int) -> StateVector:
    return StateVector.basis("0" * n)


def explicit(amps) -> StateVector:
    vals = list(amps)
    if all(isinstance(v, (int, np.integer)) for v in vals):
        return StateVector.from_gaussian(vals)
    return StateVector.from_complex(np.array(vals, dtype=complex))


@dataclass(frozen=True)
class StateSpec:
    """Named member of a state family; ``str(spec)`` is its canonical text form."""

    kind: str
    params: tuple = ()
    poly: BooleanPolynomial | None = field(default=None, compare=True)

    def build(self) -> StateVector:
        k, p = self.kind, self.params
        if k == "dicke":
            return dicke(*p)
        if k == "ghz":
            return ghz(*p)
        if k == "bell":
            return bell(*p)
        if k == "fd":
            return func_dep_state(self.poly)
        if k == "dict":
            return dictatorship(*p)
        if k == "zero":
            return product_zero(*p)
        if k == "vec":
            return explicit(p)
        raise StateSpecError(f"unknown state family {k!r}")

    @property
    def n_qubits(self) -> int:
        k, p = self.kind, self.params
        if k in ("dicke", "ghz", "zero"):
            return p[0]
        if k == "bell":
            return 2
        if k == "fd":
            return self.poly.n_vars + 1
        if k == "dict":
            return p[0]
        return int(round(math.log2(len(p))))

    def as_polynomial(self) -> BooleanPolynomial | None:
        """The functional dependency behind fd/dict specs."""
        if self.kind == "fd":
            return self.poly
        if self.kind == "dict":
            n, i, sign = self.params
            poly = BooleanPolynomial.variable(n - 1, i)
            return poly + 1 if sign == "-" else poly
        return None

    def __str__(self):
        k, p = self.kind, self.params
        if k == "fd":
            return f"fd:{self.poly.render()}"
        if k == "vec":
            return "vec:" + ",".join(_fmt_amp(v) for v in p)
        return f"{k}:" + ",".join(str(v) for v in p)


def _fmt_amp(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = complex(v)
    return repr(v.real) if v.imag == 0 else repr(v)


def _ints(text: str, count: int, spec: str) -> list[int]:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != count:
        raise StateSpecError(f"{spec!r}: expected {count} comma-separated integers")
    try:
        return [int(t) for t in parts]
    except ValueError:
        raise StateSpecError(f"{spec!r}: expected integers") from None


def parse_spec(text: str) -> StateSpec:
    if ":" not in text:
        raise StateSpecError(f"state spec {text!r} must look like family:args")
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    arg = arg.strip()
    if kind == "dicke":
        spec = StateSpec("dicke", tuple(_ints(arg, 2, text)))
    elif kind in ("ghz", "zero"):
        spec = StateSpec(kind, tuple(_ints(arg, 1, text)))
    elif kind == "bell":
        if arg not in ("+", "-"):
            raise StateSpecError(f"{text!r}: bell sign must be + or -")
        spec = StateSpec("bell", (arg,))
    elif kind == "fd":
        n_vars = None
        if "@" in arg:
            arg, _, nv = arg.rpartition("@")
            n_vars = int(nv)
        spec = StateSpec("fd", (), parse_poly(arg, n_vars))
    elif kind == "dict":
        parts = [t.strip() for t in arg.split(",")]
        if len(parts) != 3 or parts[2] not in ("+", "-"):
            raise StateSpecError(f"{text!r}: expected dict:n_parties,i,+|-")
        spec = StateSpec("dict", (int(parts[0]), int(parts[1]), parts[2]))
    elif kind == "vec":
        vals = []
        for t in arg.split(","):
            t = t.strip()
            try:
                vals.append(int(t))
            except ValueError:
                try:
                    vals.append(complex(t.replace("i", "j")))
                except ValueError:
                    raise StateSpecError(f"{text!r}: bad amplitude {t!r}") from None
        spec = StateSpec("vec", tuple(vals))
    else:
        raise StateSpecError(f"unknown state family {kind!r}")
    spec.build()  # validate parameters eagerly
    return spec
