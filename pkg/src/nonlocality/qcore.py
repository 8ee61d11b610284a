"""Complex scalars, qubit state vectors, dichotomic observables and Born probabilities.

Exact mode keeps every amplitude in the ring of Gaussian integers scaled by
half powers of two, so probabilities for X/Y/Z measurements come out as
rationals with no rounding.  Anything involving a Bloch-sphere observable or a
general unitary drops to complex128.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

ZERO_TOL = 1e-10
UNITARY_TOL = 1e-9


class SizeBoundError(ValueError):
    """Input exceeds a documented size bound."""


class InexactError(ArithmeticError):
    """Raised when an exact-mode result would leave the (a+bi)*2^(-m/2) ring."""


class AmplitudeScalar:
    """A complex number, either exact ``(a + b*i) * 2**(-m/2)`` or a float pair."""

    __slots__ = ("exact", "a", "b", "m", "z")

    def __init__(self, a=0, b=0, m=0, *, z=None):
        if z is not None:
            self.exact = False
            self.z = complex(z)
            self.a = self.b = self.m = None
            return
        a, b, m = int(a), int(b), int(m)
        if m < 0:
            raise ValueError("scale exponent must be non-negative")
        if a == 0 and b == 0:
            m = 0
        while m >= 2 and a % 2 == 0 and b % 2 == 0:
            a //= 2
            b //= 2
            m -= 2
        self.exact = True
        self.a, self.b, self.m = a, b, m
        self.z = None

    @classmethod
    def from_complex(cls, z) -> "AmplitudeScalar":
        return cls(z=z)

    @property
    def value(self) -> complex:
        if not self.exact:
            return self.z
        return complex(self.a, self.b) * 2.0 ** (-self.m / 2)

    def __complex__(self):
        return self.value

    def is_zero(self) -> bool:
        if self.exact:
            return self.a == 0 and self.b == 0
        return self.z == 0

    def to_float(self) -> "AmplitudeScalar":
        return AmplitudeScalar(z=self.value)

    def conjugate(self) -> "AmplitudeScalar":
        if self.exact:
            return AmplitudeScalar(self.a, -self.b, self.m)
        return AmplitudeScalar(z=self.z.conjugate())

    def norm2(self):
        """Squared modulus; a Fraction with power-of-two denominator in exact mode."""
        if self.exact:
            return Fraction(self.a * self.a + self.b * self.b, 2 ** self.m)
        return abs(self.z) ** 2

    def __neg__(self):
        if self.exact:
            return AmplitudeScalar(-self.a, -self.b, self.m)
        return AmplitudeScalar(z=-self.z)

    def __add__(self, other):
        other = _coerce(other)
        if not (self.exact and other.exact):
            return AmplitudeScalar(z=self.value + other.value)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if (self.m - other.m) % 2:
            raise InexactError(f"cannot add {self!r} and {other!r} exactly")
        m = max(self.m, other.m)
        s1 = 2 ** ((m - self.m) // 2)
        s2 = 2 ** ((m - other.m) // 2)
        return AmplitudeScalar(self.a * s1 + other.a * s2, self.b * s1 + other.b * s2, m)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if not (self.exact and other.exact):
            return AmplitudeScalar(z=self.value * other.value)
        return AmplitudeScalar(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.m + other.m,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        if self.exact and other.exact:
            return (self.a, self.b, self.m) == (other.a, other.b, other.m)
        return self.value == other.value

    def __hash__(self):
        if self.exact:
            return hash((self.a, self.b, self.m))
        return hash(self.z)

    def __repr__(self):
        if self.exact:
            return f"AmplitudeScalar({self.a}{self.b:+d}i, m={self.m})"
        return f"AmplitudeScalar({self.z!r})"


def _coerce(x) -> AmplitudeScalar:
    if isinstance(x, AmplitudeScalar):
        return x
    if isinstance(x, (int, np.integer)):
        return AmplitudeScalar(int(x))
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        return AmplitudeScalar(z=x)
    raise TypeError(f"cannot use {type(x).__name__} as an amplitude")


SQRT_HALF = AmplitudeScalar(1, 0, 1)
I_UNIT = AmplitudeScalar(0, 1, 0)


def _gcd_reduce(re: np.ndarray, im: np.ndarray):
    g = reduce(math.gcd, (int(v) for v in np.concatenate([re, im])), 0)
    if g > 1:
        re = re // g
        im = im // g
    return re, im


class StateVector:
    """Pure state of ``n`` qubits, amplitudes indexed by the ket ``|q_1 ... q_n>``.

    Exact states are stored as a Gaussian-integer vector ``g`` and represent
    ``g / sqrt(<g|g>)``; that keeps Dicke normalisations such as ``1/sqrt(3)``
    exact without needing the amplitudes themselves to be dyadic.
    """

    __slots__ = ("n", "re", "im", "norm2", "data")

    def __init__(self, n, *, re=None, im=None, data=None):
        self.n = int(n)
        dim = 1 << self.n
        if data is not None:
            data = np.asarray(data, dtype=complex).reshape(-1)
            if data.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got {data.size}")
            nrm = np.linalg.norm(data)
            if nrm == 0:
                raise ValueError("zero vector is not a state")
            self.data = data / nrm
            self.data.flags.writeable = False
            self.re = self.im = self.norm2 = None
            return
        re = np.asarray(re, dtype=object).reshape(-1)
        im = np.zeros(dim, dtype=object) if im is None else np.asarray(im, dtype=object).reshape(-1)
        if re.shape != (dim,) or im.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes")
        re = np.array([int(v) for v in re], dtype=object)
        im = np.array([int(v) for v in im], dtype=object)
        re, im = _gcd_reduce(re, im)
        norm2 = int(sum(int(a) * int(a) + int(b) * int(b) for a, b in zip(re, im)))
        if norm2 == 0:
            raise ValueError("zero vector is not a state")
        self.re, self.im, self.norm2 = re, im, norm2
        self.data = None

    # -- constructors -------------------------------------------------
    @classmethod
    def from_gaussian(cls, re, im=None) -> "StateVector":
        re = np.asarray(re).reshape(-1)
        n = int(round(math.log2(re.size)))
        if 1 << n != re.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, re=re, im=im)

    @classmethod
    def from_complex(cls, data) -> "StateVector":
        data = np.asarray(data, dtype=complex).reshape(-1)
        n = int(round(math.log2(data.size)))
        if 1 << n != data.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, data=data)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[AmplitudeScalar], normalize=False) -> "StateVector":
        """Build from scalars; exact when every entry is exact and they share one scale parity."""
        amps = [_coerce(a) for a in amps]
        if not all(a.exact for a in amps):
            vec = np.array([a.value for a in amps])
            if not normalize and abs(np.vdot(vec, vec).real - 1) > UNITARY_TOL:
                raise ValueError("amplitudes are not normalised")
            return cls.from_complex(vec)
        nz = [a for a in amps if not a.is_zero()]
        if not nz:
            raise ValueError("zero vector is not a state")
        if len({a.m % 2 for a in nz}) > 1:
            raise InexactError("amplitudes mix odd and even half-power scales")
        if not normalize and sum((a.norm2() for a in amps), Fraction(0)) != 1:
            raise ValueError("amplitudes are not normalised")
        m = max(a.m for a in nz)
        re = [a.a * 2 ** ((m - a.m) // 2) if not a.is_zero() else 0 for a in amps]
        im = [a.b * 2 ** ((m - a.m) // 2) if not a.is_zero() else 0 for a in amps]
        return cls.from_gaussian(re, im)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        n = len(bits)
        re = [0] * (1 << n)
        re[int(bits, 2)] = 1
        return cls(n, re=re)

    # -- views --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.data is None

    def as_complex(self) -> np.ndarray:
        if self.data is not None:
            return self.data
        vec = np.array([complex(int(a), int(b)) for a, b in zip(self.re, self.im)])
        return vec / math.sqrt(self.norm2)

    def to_float(self) -> "StateVector":
        return self if not self.exact else StateVector(self.n, data=self.as_complex())

    def amplitude(self, index: int) -> AmplitudeScalar:
        """Amplitude of basis ket ``index``; exact when the normalisation is dyadic."""
        if not self.exact:
            return AmplitudeScalar(z=self.data[index])
        m, sq = _dyadic_sqrt_inverse(self.norm2)
        if sq is None:
            return AmplitudeScalar(z=self.as_complex()[index])
        return AmplitudeScalar(int(self.re[index]) * sq, int(self.im[index]) * sq, m)

    @property
    def amps(self) -> list[AmplitudeScalar]:
        return [self.amplitude(i) for i in range(1 << self.n)]

    def norm2_total(self):
        """Sum of squared amplitude moduli (a Fraction in exact mode)."""
        if not self.exact:
            return float(np.vdot(self.data, self.data).real)
        if _dyadic_sqrt_inverse(self.norm2)[1] is not None:
            return sum((a.norm2() for a in self.amps), Fraction(0))
        return Fraction(sum(int(a) ** 2 + int(b) ** 2 for a, b in zip(self.re, self.im)), self.norm2)

    def support(self) -> list[int]:
        if self.exact:
            return [i for i in range(1 << self.n) if self.re[i] != 0 or self.im[i] != 0]
        return [i for i in range(1 << self.n) if abs(self.data[i]) ** 2 >= ZERO_TOL]

    def permute_qubits(self, perm: Sequence[int]) -> "StateVector":
        """Reorder qubits: new qubit ``k`` is old qubit ``perm[k]``."""
        axes = list(perm)
        if self.exact:
            re = np.transpose(self.re.reshape([2] * self.n), axes).reshape(-1)
            im = np.transpose(self.im.reshape([2] * self.n), axes).reshape(-1)
            return StateVector(self.n, re=re, im=im)
        return StateVector(self.n, data=np.transpose(self.data.reshape([2] * self.n), axes).reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, StateVector) or other.n != self.n:
            return NotImplemented
        if self.exact and other.exact:
            return (self.norm2 == other.norm2 and list(self.re) == list(other.re)
                    and list(self.im) == list(other.im))
        return bool(np.allclose(self.as_complex(), other.as_complex(), atol=1e-12))

    __hash__ = None

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"StateVector(n={self.n}, {mode}, support={len(self.support())})"


def _dyadic_sqrt_inverse(norm2: int):
    """Write 1/sqrt(norm2) as s * 2^(-m/2) with integer s, if possible."""
    m = 0
    rest = norm2
    while rest % 2 == 0:
        rest //= 2
        m += 1
    r = math.isqrt(rest)
    if r * r != rest:
        return m, None
    # 1/sqrt(2^m * r^2) = 1/(r * 2^(m/2)); needs r == 1 to stay in the ring
    if r != 1:
        return m, None
    return m, 1


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product, qubits of ``a`` first."""
    if a.exact and b.exact:
        re = np.array([x * y - u * v for x, u in zip(a.re, a.im) for y, v in zip(b.re, b.im)], dtype=object)
        im = np.array([x * v + u * y for x, u in zip(a.re, a.im) for y, v in zip(b.re, b.im)], dtype=object)
        return StateVector(a.n + b.n, re=re, im=im)
    return StateVector(a.n + b.n, data=np.kron(a.as_complex(), b.as_complex()))


@dataclass(frozen=True)
class Observable:
    """Dichotomic qubit observable: Pauli X, Y, Z or the Bloch direction U(theta, phi).

    ``U(theta, phi) = [[cos t, e^{-i phi} sin t], [e^{i phi} sin t, -cos t]]``.
    """

    kind: str
    theta: float = 0.0
    phi: float = 0.0
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ("X", "Y", "Z", "U"):
            raise ValueError(f"unknown observable kind {self.kind!r}")

    @classmethod
    def bloch(cls, theta, phi, label=None) -> "Observable":
        return cls("U", float(theta), float(phi), label)

    @property
    def exact(self) -> bool:
        return self.kind != "U"

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind != "U":
            return self.kind
        return f"U({self.theta:.6g},{self.phi:.6g})"

    def matrix(self) -> np.ndarray:
        if self.kind == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == "Y":
            return np.array([[0, -1j], [1j, 0]], dtype=complex)
        if self.kind == "Z":
            return np.array([[1, 0], [0, -1]], dtype=complex)
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[c, e.conjugate() * s], [e * s, -c]], dtype=complex)

    def eigenbasis(self):
        """(plus, minus) eigenvectors, each a pair of AmplitudeScalars."""
        if self.kind == "Z":
            one, zero = AmplitudeScalar(1), AmplitudeScalar(0)
            return (one, zero), (zero, one)
        if self.kind == "X":
            return (SQRT_HALF, SQRT_HALF), (SQRT_HALF, -SQRT_HALF)
        if self.kind == "Y":
            return (SQRT_HALF, SQRT_HALF * I_UNIT), (SQRT_HALF, -(SQRT_HALF * I_UNIT))
        vecs = self.complex_basis()
        return tuple(tuple(AmplitudeScalar(z=x) for x in row) for row in vecs)

    def gaussian_basis(self):
        """Rows (+, -) of unnormalised Gaussian-integer eigenvectors and the shared scale m."""
        if self.kind == "Z":
            return np.array([[1, 0], [0, 1]], dtype=object), np.zeros((2, 2), dtype=object), 0
        if self.kind == "X":
            return np.array([[1, 1], [1, -1]], dtype=object), np.zeros((2, 2), dtype=object), 1
        if self.kind == "Y":
            return np.array([[1, 0], [1, 0]], dtype=object), np.array([[0, 1], [0, -1]], dtype=object), 1
        raise InexactError("Bloch observables have no exact eigenbasis")

    def complex_basis(self) -> np.ndarray:
        if self.kind != "U":
            re, im, m = self.gaussian_basis()
            return (re.astype(float) + 1j * im.astype(float)) * 2.0 ** (-m / 2)
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[c, e * s], [s, -e * c]], dtype=complex)

    def transformed(self, u: np.ndarray) -> "TransformedObservable":
        return TransformedObservable(self, np.asarray(u, dtype=complex))

    def __str__(self):
        return self.name


class TransformedObservable:
    """Observable whose eigenvectors are ``U`` applied to another observable's eigenvectors."""

    exact = False
    kind = "T"

    def __init__(self, base: Observable, u: np.ndarray):
        self.base = base
        self.u = u
        self.label = f"{base.name}'"

    @property
    def name(self):
        return self.label

    def complex_basis(self) -> np.ndarray:
        return (self.u @ self.base.complex_basis().T).T

    def matrix(self) -> np.ndarray:
        return self.u @ self.base.matrix() @ self.u.conj().T

    def __str__(self):
        return self.name


def eigenbasis(obs: Observable):
    return obs.eigenbasis()


def _contract(state: StateVector, bases, exact: bool):
    """Apply conj(basis) on every qubit; each basis has shape (k, 2) over components.

    Returns the amplitude tensor with the qubit axes replaced by row axes of
    the bases.  Exact mode expects ``(re, im)`` pairs of object arrays.
    """
    n = state.n
    if exact:
        tr = state.re.reshape([2] * n)
        ti = state.im.reshape([2] * n)
        for p, (br, bi) in enumerate(bases):
            nr = np.tensordot(br, tr, axes=([1], [p])) + np.tensordot(bi, ti, axes=([1], [p]))
            ni = np.tensordot(br, ti, axes=([1], [p])) - np.tensordot(bi, tr, axes=([1], [p]))
            tr = np.moveaxis(nr, 0, p)
            ti = np.moveaxis(ni, 0, p)
        return tr, ti
    t = state.as_complex().reshape([2] * n)
    for p, b in enumerate(bases):
        t = np.moveaxis(np.tensordot(np.conj(b), t, axes=([1], [p])), 0, p)
    return t


def _sign_index(sign) -> int:
    if sign == "+" or (sign == 1 and sign is not True):
        return 0
    if sign in ("-", "\u2212") or sign == -1:
        return 1
    raise ValueError(f"bad outcome sign {sign!r}")


def born_probability(state: StateVector, locals):
    """|<eta_1^{s_1} x ... x eta_n^{s_n} | psi>|^2; a Fraction when everything is exact."""
    if len(locals) != state.n:
        raise ValueError(f"need {state.n} local observables, got {len(locals)}")
    idx = [_sign_index(s) for _, s in locals]
    exact = state.exact and all(getattr(o, "exact", False) for o, _ in locals)
    if exact:
        bases, m = [], 0
        for (obs, _), o in zip(locals, idx):
            br, bi, mo = obs.gaussian_basis()
            bases.append((br[o:o + 1], bi[o:o + 1]))
            m += mo
        tr, ti = _contract(state, bases, True)
        re, im = int(tr.reshape(-1)[0]), int(ti.reshape(-1)[0])
        return Fraction(re * re + im * im, state.norm2 * 2 ** m)
    bases = [obs.complex_basis()[o:o + 1] for (obs, _), o in zip(locals, idx)]
    amp = _contract(state, bases, False).reshape(-1)[0]
    return float(abs(amp) ** 2)


def is_unitary(u, tol=UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), atol=tol)


def apply_local_unitaries(state: StateVector, unitaries) -> StateVector:
    """(U_1 x ... x U_n)|psi>.  Identity lists on exact states stay exact."""
    if len(unitaries) != state.n:
        raise ValueError(f"need {state.n} unitaries, got {len(unitaries)}")
    mats = [np.asarray(u, dtype=complex) for u in unitaries]
    for k, u in enumerate(mats):
        if not is_unitary(u):
            raise ValueError(f"matrix {k} is not unitary")
    if state.exact and all(np.array_equal(u, np.eye(2)) for u in mats):
        return state
    # _contract conjugates its bases, so pass conj(U) to get U itself
    t = _contract(state.to_float(), [np.conj(u) for u in mats], False)
    return StateVector(state.n, data=t.reshape(-1))
