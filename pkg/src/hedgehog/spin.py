"""
Spin operators, coherent spin states and their projectors.

Conventions: hbar = 1, basis |s, m> ordered with m = s, s-1, ..., -s.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np


UNIT_SLACK = 4 * np.finfo(float).eps


@dataclass(frozen=True, order=True)
class SpinLabel:
    """Spin quantum number stored exactly as the integer 2s."""

    doubled_spin: int

    def __post_init__(self):
        if isinstance(self.doubled_spin, bool) or not isinstance(
            self.doubled_spin, (int, np.integer)
        ):
            raise TypeError("doubled_spin must be an integer")
        if self.doubled_spin < 0:
            raise ValueError(f"doubled_spin must be >= 0, got {self.doubled_spin}")
        object.__setattr__(self, "doubled_spin", int(self.doubled_spin))

    @classmethod
    def parse(cls, text):
        """Parse ``"1/2"``, ``"3/2"``, ``"2"`` (or a Fraction / int) into a label."""
        try:
            value = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse spin {text!r}") from None
        doubled = 2 * value
        if doubled.denominator != 1 or doubled < 0:
            raise ValueError(f"spin must be a non-negative multiple of 1/2, got {text!r}")
        return cls(int(doubled))

    @property
    def s(self):
        return self.doubled_spin / 2

    def dimension(self):
        return self.doubled_spin + 1

    def n_points(self):
        return (self.doubled_spin + 1) ** 2

    def __str__(self):
        if self.doubled_spin % 2:
            return f"{self.doubled_spin}/2"
        return str(self.doubled_spin // 2)


def as_spin(s):
    """Coerce a SpinLabel, spin string, Fraction or float multiple of 1/2."""
    if isinstance(s, SpinLabel):
        return s
    if isinstance(s, float):
        if not (2 * s).is_integer():
            raise ValueError(f"spin must be a multiple of 1/2, got {s}")
        return SpinLabel(int(2 * s))
    return SpinLabel.parse(s)


def unit_vector(v):
    """Return ``v`` as a float 3-vector rescaled to unit length."""
    v = np.asarray(v, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError(f"cannot normalize vector {v}")
    if abs(norm - 1.0) <= UNIT_SLACK:
        return v.copy()
    return v / norm


def from_angles(theta, phi):
    """Unit vector with polar angle ``theta`` and azimuth ``phi``."""
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def to_angles(n):
    """Polar angle and azimuth of ``n``; the azimuth is 0 on the z axis."""
    x, y, z = unit_vector(n)
    theta = math.atan2(math.hypot(x, y), z)
    phi = math.atan2(y, x) if (x != 0.0 or y != 0.0) else 0.0
    return theta, phi


def magnetic_numbers(s):
    s = as_spin(s)
    return s.s - np.arange(s.dimension())


def spin_matrices(s):
    """
    Angular momentum matrices ``(Sx, Sy, Sz)`` for spin ``s``.

    Sz is diag(s, s-1, ..., -s); the raising operator has entries
    sqrt(s(s+1) - m(m+1)) just above the diagonal.
    """
    s = as_spin(s)
    m = magnetic_numbers(s)
    ladder = np.sqrt(s.s * (s.s + 1) - m[1:] * (m[1:] + 1))
    s_plus = np.diag(ladder, k=1).astype(complex)
    s_minus = s_plus.conj().T
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def _binomials(doubled):
    k = np.arange(doubled + 1)
    if doubled <= 30:
        return np.array([math.comb(doubled, int(j)) for j in k], dtype=float)
    lg = math.lgamma(doubled + 1)
    return np.exp([lg - math.lgamma(j + 1) - math.lgamma(doubled - j + 1) for j in k])


def coherent_state(s, n):
    """
    Coherent spin state |n>, the top eigenvector of n.S.

    Amplitudes are sqrt(C(2s, s-m)) cos^(s+m)(theta/2) sin^(s-m)(theta/2)
    exp(+i (s-m) phi), with phi = 0 at the poles.
    """
    s = as_spin(s)
    theta, phi = to_angles(n)
    k = np.arange(s.doubled_spin + 1)  # k = s - m
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    amp = np.sqrt(_binomials(s.doubled_spin)) * c ** (s.doubled_spin - k) * sn**k
    state = amp * np.exp(1j * k * phi)
    return state / np.linalg.norm(state)


def projector(v):
    """Rank-one projector |v><v| onto a normalized state."""
    v = np.asarray(v, dtype=complex)
    p = np.outer(v, v.conj())
    # exact Hermitian symmetry; the raw outer product can carry ulp-level
    # imaginary parts on the diagonal
    return 0.5 * (p + p.conj().T)


def coherent_projector(s, n):
    return projector(coherent_state(s, n))


def direction_operator(s, n):
    """The operator n.S."""
    n = unit_vector(n)
    sx, sy, sz = spin_matrices(s)
    return n[0] * sx + n[1] * sy + n[2] * sz


def q_symbol(a, s, n):
    """
    Q-symbol <n|A|n> of the Hermitian operator ``a``.

    Raises ValueError on a dimension mismatch or when the expectation value
    has an imaginary part beyond round-off (``a`` not Hermitian).
    """
    s = as_spin(s)
    a = np.asarray(a)
    dim = s.dimension()
    if a.shape != (dim, dim):
        raise ValueError(f"operator shape {a.shape} does not match spin {s} (dim {dim})")
    v = coherent_state(s, n)
    value = np.vdot(v, a @ v)
    if abs(value.imag) > 1e-12 * max(1.0, np.linalg.norm(a)):
        raise ValueError(f"Q-symbol has imaginary part {value.imag:.3e}; operator not Hermitian")
    return float(value.real)


def overlap_probability(s, n, n2):
    """|<n|n2>|^2 computed from the state amplitudes."""
    return float(abs(np.vdot(coherent_state(s, n), coherent_state(s, n2))) ** 2)


def overlap_closed_form(s, n, n2):
    """((1 + n.n2) / 2)^(2s)."""
    s = as_spin(s)
    return ((1.0 + float(unit_vector(n) @ unit_vector(n2))) / 2.0) ** s.doubled_spin
