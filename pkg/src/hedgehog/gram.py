"""
Gram matrix of coherent-state projectors and its spectral diagnostics.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .spin import as_spin, coherent_projector


EPS = np.finfo(float).eps
SOLVE_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    s: object

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "s", as_spin(self.s))

    @property
    def size(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class FrameDiagnostics:
    """
    Spectral summary of a Gram matrix.

    ``singular`` flags numerical rank deficiency (smallest eigenvalue at or
    below N_s * eps * lambda_max); in that case ``log_abs_det`` is still the
    finite sum of log|lambda| but should be read as -inf, and
    ``condition_number`` is inf. ``is_basis`` compares the smallest
    eigenvalue with ``tau`` (strictly greater passes); ``tau_is_default``
    records whether the threshold was chosen automatically.
    """

    det: float
    log_abs_det: float
    eigenvalues: tuple
    condition_number: float
    is_basis: bool
    tau: float
    singular: bool
    tau_is_default: bool

    @property
    def min_eigenvalue(self):
        return self.eigenvalues[0]

    @property
    def max_eigenvalue(self):
        return self.eigenvalues[-1]

    def to_dict(self):
        return {
            "det": _finite_or_none(self.det),
            "log_abs_det": _finite_or_none(self.log_abs_det),
            "eigenvalues": list(self.eigenvalues),
            "condition_number": _finite_or_none(self.condition_number),
            "is_basis": self.is_basis,
            "tau": self.tau,
            "singular": self.singular,
            "tau_is_default": self.tau_is_default,
        }


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


class SingularGram(ArithmeticError):
    """Gram matrix fails the basis test; carries the diagnostics."""

    def __init__(self, diagnostics, message=None):
        self.diagnostics = diagnostics
        if message is None:
            message = (
                f"Gram matrix is not a basis: min eigenvalue "
                f"{diagnostics.min_eigenvalue:.3e} <= tau {diagnostics.tau:.3e}"
            )
        super().__init__(message)


def gram(m):
    """Closed form G[n, n'] = ((1 + m_n . m_n') / 2)^(2s)."""
    v = m.vectors
    base = np.clip((1.0 + v @ v.T) / 2.0, 0.0, 1.0)
    g = base ** m.s.doubled_spin
    np.fill_diagonal(g, 1.0)
    return GramMatrix(g, m.s)


def projectors(m):
    """Stack of coherent-state projectors, shape (N_s, 2s+1, 2s+1)."""
    return np.array([coherent_projector(m.s, n) for n in m.vectors])


def gram_via_traces(m):
    """G[n, n'] = Tr[Q_n Q_n'] from explicit projector matrices."""
    q = projectors(m)
    # Tr[A B] = sum_ij A_ij conj(B_ij) for Hermitian B
    g = np.einsum("aij,bij->ab", q, q.conj())
    return GramMatrix(g.real, m.s)


def numerical_rank_tau(eigenvalues):
    n = len(eigenvalues)
    return n * EPS * max(float(np.max(np.abs(eigenvalues))), EPS)


def diagnostics(g, tau=None, relative=False):
    """
    Eigenvalue-based diagnostics of a Gram matrix.

    Parameters
    ----------
    g : GramMatrix
    tau : float, optional
        Basis threshold on the smallest eigenvalue. Defaults to
        N_s * eps * lambda_max.
    relative : bool
        Interpret ``tau`` as a fraction of lambda_max.
    """
    eig = np.linalg.eigvalsh(g.entries)
    rank_tau = numerical_rank_tau(eig)
    if tau is None:
        threshold = rank_tau
    else:
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")
        threshold = tau * eig[-1] if relative else float(tau)
    singular = bool(eig[0] <= rank_tau)
    with np.errstate(divide="ignore"):
        log_abs_det = float(np.sum(np.log(np.abs(eig))))
    cond = math.inf if singular else float(eig[-1] / eig[0])
    return FrameDiagnostics(
        det=float(np.prod(eig)),
        log_abs_det=log_abs_det,
        eigenvalues=tuple(float(x) for x in eig),
        condition_number=cond,
        is_basis=bool(eig[0] > threshold),
        tau=float(threshold),
        singular=singular,
        tau_is_default=tau is None,
    )


def solve(g, p, tau=None, relative=False):
    """
    Solve G c = p with a pivoted symmetric factorization.

    Raises SingularGram when the basis test fails or the residual
    ||G c - p|| / max(||p||, 1) exceeds 1e-10. The residual floor of a
    backward-stable solve is about eps ||G|| ||c||, so the second case marks
    a Gram matrix too ill-conditioned for this right-hand side.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (g.size,):
        raise ValueError(f"right-hand side must have length {g.size}, got {p.shape}")
    diag = diagnostics(g, tau, relative)
    if not diag.is_basis:
        raise SingularGram(diag)
    c = scipy.linalg.solve(g.entries, p, assume_a="sym")
    residual = np.linalg.norm(g.entries @ c - p) / max(np.linalg.norm(p), 1.0)
    if not residual < SOLVE_RESIDUAL_TOL:
        raise SingularGram(
            diag,
            f"solve residual {residual:.3e} exceeds {SOLVE_RESIDUAL_TOL} "
            f"(condition number {diag.condition_number:.3e})",
        )
    return c


def inverse(g, tau=None):
    """G^-1 from the same pivoted symmetric factorization; raises SingularGram."""
    diag = diagnostics(g, tau)
    if not diag.is_basis:
        raise SingularGram(diag)
    return scipy.linalg.solve(g.entries, np.eye(g.size), assume_a="sym")
