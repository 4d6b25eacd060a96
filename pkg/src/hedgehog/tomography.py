"""
Discrete Q-symbol sampling and reconstruction in the projector basis.

An operator A is expanded as A = sum_n c_n Q_n over the coherent-state
projectors Q_n of a constellation; its Q-symbol values p_n = <m_n|A|m_n>
satisfy G c = p, so c follows from one Gram solve.
"""

import csv
from dataclasses import dataclass
import json
import math

import numpy as np

from .constellation import Constellation, FormatError
from .gram import gram, inverse, projectors, solve
from .spin import SpinLabel, as_spin, q_symbol


@dataclass(frozen=True)
class QSample:
    constellation: Constellation
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.constellation),):
            raise ValueError(
                f"need {len(self.constellation)} sample values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def check_hermitian(a, s=None, tol=1e-12):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    if s is not None and a.shape[0] != as_spin(s).dimension():
        raise ValueError(f"operator dimension {a.shape[0]} does not match spin {as_spin(s)}")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * max(1.0, np.abs(a).max()):
        raise ValueError("operator is not Hermitian")
    return a


def sample_q(a, m):
    """Q-symbol of ``a`` at every spike of ``m``."""
    a = check_hermitian(a, m.s)
    return QSample(m, [q_symbol(a, m.s, n) for n in m.vectors])


def _values(p, m):
    if isinstance(p, QSample):
        if p.constellation != m:
            raise ValueError("sample was taken on a different constellation")
        return p.values
    return np.asarray(p, dtype=float)


def expansion_coefficients(p, m, tau=None):
    """Coefficients c with G c = p; raises SingularGram."""
    return solve(gram(m), _values(p, m), tau)


def reconstruct(p, m, tau=None):
    """
    Operator sum_n c_n Q_n reproducing the Q-symbol values ``p`` on ``m``.

    ``p`` may be a QSample or a plain length-N_s sequence. Raises
    SingularGram when the constellation fails the basis test; see
    ``hedgehog.flow.repair`` for moving to a nearby invertible one.
    """
    c = expansion_coefficients(p, m, tau)
    return np.einsum("n,nij->ij", c, projectors(m))


def round_trip_error(a, m, tau=None):
    """||reconstruct(sample_q(a, m), m) - a||_F / max(||a||_F, 1)."""
    a = check_hermitian(a, m.s)
    back = reconstruct(sample_q(a, m), m, tau)
    return float(np.linalg.norm(back - a) / max(np.linalg.norm(a), 1.0))


def dual_frame(m, tau=None):
    """
    Dual operators D_n = sum_k (G^-1)_{nk} Q_k with Tr[D_n Q_k] = delta_nk.

    Any operator then expands as A = sum_n Tr[Q_n A] D_n.
    """
    ginv = inverse(gram(m), tau)
    return np.einsum("nk,kij->nij", ginv, projectors(m))


def reconstruct_dual(p, m, tau=None):
    """Same operator as ``reconstruct`` via the dual frame: sum_n p_n D_n."""
    return np.einsum("n,nij->ij", _values(p, m), dual_frame(m, tau))


def negative_eigenvalues(a, tol=1e-12):
    """Eigenvalues of ``a`` below -tol; non-empty means not a (scaled) state."""
    eig = np.linalg.eigvalsh(check_hermitian(a))
    return eig[eig < -tol]


def random_hermitian(s, seed):
    """Real N(0,1) diagonal, complex N(0,1) + i N(0,1) upper triangle mirrored."""
    dim = as_spin(s).dimension()
    rng = np.random.default_rng(seed)
    a = np.diag(rng.standard_normal(dim)).astype(complex)
    iu = np.triu_indices(dim, k=1)
    a[iu] = rng.standard_normal(len(iu[0])) + 1j * rng.standard_normal(len(iu[0]))
    a[(iu[1], iu[0])] = a[iu].conj()
    return a


# --- file formats -----------------------------------------------------------

def save_samples_csv(sample, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "x", "y", "z", "p"])
        for n, (vec, p) in enumerate(zip(sample.constellation.vectors, sample.values)):
            writer.writerow([n] + [repr(float(c)) for c in vec] + [repr(float(p))])


def load_samples_csv(path, s=None):
    """Read a QSample CSV; the spin is inferred from the row count when not given."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if not rows or [h.strip() for h in rows[0]] != ["n", "x", "y", "z", "p"]:
        raise FormatError(f"{path}: expected header n,x,y,z,p")
    try:
        body = [[float(c) for c in row] for row in rows[1:] if row]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    data = np.array(body, dtype=float).reshape(-1, 5)
    if not np.array_equal(data[:, 0], np.arange(len(data))):
        raise FormatError(f"{path}: rows must be numbered 0..N-1 in order")
    root = math.isqrt(len(data))
    if s is None:
        if root * root != len(data) or root == 0:
            raise FormatError(f"{path}: {len(data)} rows is not a square (2s+1)^2")
        s = SpinLabel(root - 1)
    s = as_spin(s)
    if len(data) != s.n_points():
        raise FormatError(f"{path}: spin {s} needs {s.n_points()} rows, got {len(data)}")
    norms = np.linalg.norm(data[:, 1:4], axis=1)
    if np.any(~(np.abs(norms - 1.0) <= 1e-9)):
        raise FormatError(f"{path}: direction vectors must be unit within 1e-9")
    m = Constellation(s, data[:, 1:4], label=f"samples from {path}")
    return QSample(m, data[:, 4])


def operator_to_dict(a, s):
    a = np.asarray(a, dtype=complex)
    return {
        "doubled_spin": as_spin(s).doubled_spin,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def operator_from_dict(data):
    try:
        s = SpinLabel(data["doubled_spin"])
        raw = np.asarray(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad operator record: {exc}") from None
    dim = s.dimension()
    if raw.shape != (dim, dim, 2):
        raise FormatError(f"matrix must be {dim}x{dim} of [re, im] pairs, got {raw.shape}")
    a = raw[..., 0] + 1j * raw[..., 1]
    try:
        check_hermitian(a, s, tol=1e-9)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return a, s


def save_operator_json(a, s, path):
    with open(path, "w") as fh:
        json.dump(operator_to_dict(a, s), fh, indent=1)
        fh.write("\n")


def load_operator_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return operator_from_dict(data)
