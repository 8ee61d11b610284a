"""Boolean functions in algebraic normal form over GF(2).

A polynomial is a set of monomials, each monomial a frozenset of 1-based
variable indices; the empty monomial is the constant 1.  Because the
variables are Boolean, ``q*q == q`` and a repeated monomial cancels.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class PolynomialSyntaxError(ValueError):
    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class PredictedClass(str, enum.Enum):
    NonContextual = "NonContextual"
    Weak = "Weak"
    AtLeastLogical = "AtLeastLogical"
    Strong = "Strong"

    def __str__(self):
        return self.value


def _sort_key(mono):
    return (len(mono), sorted(mono))


@dataclass(frozen=True)
class BooleanPolynomial:
    n_vars: int
    monomials: frozenset

    def __post_init__(self):
        for mono in self.monomials:
            if any(v < 1 or v > self.n_vars for v in mono):
                raise ValueError(f"monomial {sorted(mono)} outside q1..q{self.n_vars}")

    @classmethod
    def from_monomials(cls, n_vars: int, monomials: Iterable[Iterable[int]]) -> "BooleanPolynomial":
        acc: set = set()
        for mono in monomials:
            acc ^= {frozenset(mono)}
        return cls(n_vars, frozenset(acc))

    @classmethod
    def constant(cls, n_vars: int, value: int) -> "BooleanPolynomial":
        return cls(n_vars, frozenset({frozenset()}) if value else frozenset())

    @classmethod
    def variable(cls, n_vars: int, i: int) -> "BooleanPolynomial":
        return cls(n_vars, frozenset({frozenset({i})}))

    @classmethod
    def from_truth_table(cls, n_vars: int, table: Sequence[int]) -> "BooleanPolynomial":
        """Moebius transform; ``table[x]`` is F at the input whose bits read q1 (MSB) .. qn."""
        coeffs = [int(v) & 1 for v in table]
        if len(coeffs) != 1 << n_vars:
            raise ValueError("truth table has the wrong length")
        for k in range(n_vars):
            step = 1 << k
            for x in range(1 << n_vars):
                if x & step:
                    coeffs[x] ^= coeffs[x ^ step]
        return cls(n_vars, frozenset(_mask_to_mono(x, n_vars) for x, c in enumerate(coeffs) if c))

    @classmethod
    def from_coefficient_mask(cls, n_vars: int, mask: int) -> "BooleanPolynomial":
        """Polynomial whose monomial with variable bitmask ``x`` is present iff bit ``x`` of ``mask`` is set."""
        return cls(n_vars, frozenset(_mask_to_mono(x, n_vars) for x in range(1 << n_vars) if mask >> x & 1))

    # -- structure ----------------------------------------------------
    @property
    def degree(self) -> int:
        return max((len(m) for m in self.monomials), default=0)

    @property
    def constant_term(self) -> int:
        return int(frozenset() in self.monomials)

    def is_constant(self) -> bool:
        return self.degree == 0

    def variables(self) -> set[int]:
        return set().union(*self.monomials) if self.monomials else set()

    def sorted_monomials(self) -> list:
        return sorted(self.monomials, key=_sort_key)

    # -- algebra ------------------------------------------------------
    def _check_ring(self, other):
        if not isinstance(other, BooleanPolynomial):
            other = BooleanPolynomial.constant(self.n_vars, int(other))
        if other.n_vars != self.n_vars:
            n = max(self.n_vars, other.n_vars)
            return self.with_n_vars(n), other.with_n_vars(n)
        return self, other

    def with_n_vars(self, n_vars: int) -> "BooleanPolynomial":
        return BooleanPolynomial(n_vars, self.monomials)

    def __add__(self, other):
        a, b = self._check_ring(other)
        return BooleanPolynomial(a.n_vars, a.monomials ^ b.monomials)

    __radd__ = __add__

    def __mul__(self, other):
        a, b = self._check_ring(other)
        acc: set = set()
        for m1 in a.monomials:
            for m2 in b.monomials:
                acc ^= {m1 | m2}
        return BooleanPolynomial(a.n_vars, frozenset(acc))

    __rmul__ = __mul__

    def evaluate(self, bits: Sequence[int]) -> int:
        if len(bits) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} bits, got {len(bits)}")
        total = 0
        for mono in self.monomials:
            if all(bits[v - 1] for v in mono):
                total ^= 1
        return total

    __call__ = evaluate

    def truth_table(self) -> list[int]:
        n = self.n_vars
        return [self.evaluate([(x >> (n - 1 - k)) & 1 for k in range(n)]) for x in range(1 << n)]

    def render(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for mono in self.sorted_monomials():
            parts.append("1" if not mono else "*".join(f"q{v}" for v in sorted(mono)))
        return "+".join(parts)

    def __str__(self):
        return self.render()


def _mask_to_mono(x: int, n_vars: int) -> frozenset:
    # bit (n-1-k) of x stands for q_{k+1}, matching truth-table order
    return frozenset(k + 1 for k in range(n_vars) if x >> (n_vars - 1 - k) & 1)


NAMED = {
    "AND": "q1*q2",
    "NAND": "1+q1*q2",
    "OR": "q1+q2+q1*q2",
    "NOR": "1+q1+q2+q1*q2",
    "XOR": "q1+q2",
    "NXOR": "1+q1+q2",
    "IMP1": "1+q1+q1*q2",
    "IMP2": "1+q2+q1*q2",
    "NIMP1": "q1+q1*q2",
    "NIMP2": "q2+q1*q2",
    "DICT1": "q1",
    "DICT2": "q2",
}
ALIASES = {"L1": "IMP1", "L2": "IMP2", "NL1": "NIMP1", "NL2": "NIMP2"}

_TOKEN = re.compile(r"q(\d+)|([01])|([+*])|(\S)")


def _tokenize(text: str):
    for match in _TOKEN.finditer(text):
        var, const, op, bad = match.groups()
        pos = match.start()
        if bad is not None:
            raise PolynomialSyntaxError(f"unexpected character {bad!r}", text, pos)
        if var is not None:
            if int(var) == 0:
                raise PolynomialSyntaxError("variable index 0 is not allowed", text, pos)
            yield "var", int(var), pos
        elif const is not None:
            yield "const", int(const), pos
        else:
            yield op, None, pos


def parse_poly(text: str, n_vars: int | None = None) -> BooleanPolynomial:
    """Parse ``q1+q2*q3+1`` style input or one of the named two-variable formulas."""
    name = text.strip().upper()
    name = ALIASES.get(name, name)
    if name in NAMED:
        return parse_poly(NAMED[name], max(2, n_vars or 2))

    tokens = list(_tokenize(text)) + [("end", None, len(text))]
    k = 0
    terms: list[list[int]] = []
    while True:
        kind, val, pos = tokens[k]
        if kind == "const":
            if tokens[k + 1][0] in ("*", "var"):
                raise PolynomialSyntaxError("constants cannot be multiplied", text, tokens[k + 1][2])
            if val:
                terms.append([])
            k += 1
        elif kind == "var":
            mono = [val]
            k += 1
            while tokens[k][0] in ("*", "var"):
                if tokens[k][0] == "*":
                    k += 1
                    if tokens[k][0] != "var":
                        raise PolynomialSyntaxError("expected a variable after '*'", text, tokens[k][2])
                mono.append(tokens[k][1])
                k += 1
            terms.append(mono)
        else:
            raise PolynomialSyntaxError("expected a term", text, pos)
        kind, _, pos = tokens[k]
        if kind == "end":
            break
        if kind != "+":
            raise PolynomialSyntaxError("expected '+'", text, pos)
        k += 1

    top = max((max(m) for m in terms if m), default=0)
    if n_vars is None:
        n_vars = max(top, 1)
    elif top > n_vars:
        raise ValueError(f"q{top} exceeds n_vars={n_vars}")
    return BooleanPolynomial.from_monomials(n_vars, terms)


def named(name: str, n_vars: int = 2) -> BooleanPolynomial:
    return parse_poly(name, n_vars)


def xor_pair_form(poly: BooleanPolynomial):
    """(i, j, residual) when poly = q_i + q_j + G with G free of q_i, q_j; else None.

    Picks the smallest qualifying i, then the smallest j.
    """
    lone = []
    for v in range(1, poly.n_vars + 1):
        containing = [m for m in poly.monomials if v in m]
        if containing == [frozenset({v})]:
            lone.append(v)
    if len(lone) < 2:
        return None
    i, j = lone[0], lone[1]
    rest = poly.monomials - {frozenset({i}), frozenset({j})}
    return i, j, BooleanPolynomial(poly.n_vars, rest)


def quadratic_slice(poly: BooleanPolynomial, i: int, j: int):
    """Split F = F1 + q_i F2 + q_j F3 + q_i q_j F4 with F1..F4 free of q_i and q_j."""
    if i == j:
        raise ValueError("slice needs two distinct variables")
    parts: list[set] = [set(), set(), set(), set()]
    for mono in poly.monomials:
        slot = (1 if i in mono else 0) + (2 if j in mono else 0)
        parts[slot].add(mono - {i, j})
    n = poly.n_vars
    return tuple(BooleanPolynomial(n, frozenset(p)) for p in parts)


def predicted_class(poly: BooleanPolynomial) -> PredictedClass:
    if poly.degree == 0:
        return PredictedClass.NonContextual
    if xor_pair_form(poly) is not None:
        return PredictedClass.Strong
    if poly.degree == 1:
        return PredictedClass.Weak
    return PredictedClass.AtLeastLogical


def all_polynomials(n_vars: int) -> Iterator[BooleanPolynomial]:
    """Every polynomial in n_vars variables, ordered by coefficient mask."""
    for mask in range(1 << (1 << n_vars)):
        yield BooleanPolynomial.from_coefficient_mask(n_vars, mask)

