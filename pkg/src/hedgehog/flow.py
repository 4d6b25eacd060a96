"""
det G as the energy of one moving spike, its precession flow, and repair of
singular constellations by small spike moves.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .constellation import Constellation, distance, replace_vector
from .gram import diagnostics, gram
from .spin import unit_vector


DEFAULT_FD_STEP = 1e-5
MAX_ATTEMPTS = 64


class SpikeHamiltonian:
    """
    H(v) = det G with spike ``k`` of ``m`` replaced by ``v``.

    The Gram entries involving ``v`` use the polynomial ((1 + a.v) / 2)^(2s)
    without renormalizing ``v``, so H is defined (and smooth) on all of R^3
    and agrees with the constellation determinant on the unit sphere.
    """

    def __init__(self, m, k, fd_step=DEFAULT_FD_STEP):
        if not 0 <= k < len(m):
            raise IndexError(f"spike index {k} out of range [0, {len(m)})")
        self.m = m
        self.k = k
        self.fd_step = fd_step
        self._power = m.s.doubled_spin
        self._g = np.array(gram(m).entries)
        self._others = np.delete(np.arange(len(m)), k)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        row = ((1.0 + self.m.vectors @ v) / 2.0) ** self._power
        row[self.k] = ((1.0 + v @ v) / 2.0) ** self._power
        g = self._g.copy()
        g[self.k, :] = row
        g[:, self.k] = row
        return float(np.linalg.det(g))

    def gradient(self, v, h=None):
        """Central-difference gradient in the ambient coordinates."""
        v = np.asarray(v, dtype=float)
        if h is None:
            h = self.fd_step * max(1.0, abs(self(v)))
        grad = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            grad[i] = (self(v + e) - self(v - e)) / (2 * h)
        return grad

    def velocity(self, v):
        return np.cross(v, self.gradient(v))


def hamiltonian(m, k, v):
    """det G of ``m`` with spike ``k`` set to the unit vector ``v``."""
    return SpikeHamiltonian(m, k)(unit_vector(v))


def grad_hamiltonian(m, k, v, h=None):
    return SpikeHamiltonian(m, k).gradient(unit_vector(v), h)


def is_fixed_point(m, k, v, tol=1e-9):
    """True when the gradient at ``v`` is parallel to ``v``."""
    v = unit_vector(v)
    grad = grad_hamiltonian(m, k, v)
    return bool(np.linalg.norm(np.cross(v, grad)) <= tol * max(1.0, np.linalg.norm(grad)))


@dataclass(frozen=True)
class FlowState:
    t: float
    v: np.ndarray
    energy: float
    norm_drift: float  # |1 - |v|| just before this step's renormalization
    active_index: int
    constellation: Constellation = field(repr=False, compare=False)


def integrate_flow(m, k, v0, dt, steps, fd_step=DEFAULT_FD_STEP):
    """
    RK4 trajectory of dv/dt = v x dH/dv, projected back to the sphere each step.

    Returns ``steps + 1`` states including the initial one.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    ham = SpikeHamiltonian(m, k, fd_step)
    f = ham.velocity
    v = unit_vector(v0)
    states = [FlowState(0.0, v, ham(v), 0.0, k, m)]
    for i in range(1, steps + 1):
        k1 = f(v)
        k2 = f(v + 0.5 * dt * k1)
        k3 = f(v + 0.5 * dt * k2)
        k4 = f(v + dt * k3)
        w = v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        norm = np.linalg.norm(w)
        v = w / norm
        states.append(FlowState(i * dt, v, ham(v), float(abs(1.0 - norm)), k, m))
    return states


# --- repair -----------------------------------------------------------------

class RepairFailed(RuntimeError):
    def __init__(self, report, message):
        self.report = report
        super().__init__(message)


@dataclass(frozen=True)
class RepairReport:
    moved_indices: list
    total_displacement: float
    final_log_abs_det: float
    attempts: int
    epsilon: float
    tau: float
    final_min_eigenvalue: float
    max_spike_displacement: float
    strategy: str
    seed: int
    success: bool

    def to_dict(self):
        out = dict(self.__dict__)
        out["moved_indices"] = list(self.moved_indices)
        if not math.isfinite(out["final_log_abs_det"]):
            out["final_log_abs_det"] = None
        return out


def _random_tangent(rng, v):
    while True:
        u = rng.standard_normal(3)
        u -= (u @ v) * v
        norm = np.linalg.norm(u)
        if norm > 1e-8:
            return u / norm


def _numerical_rank(m, tau):
    diag = diagnostics(gram(m), tau)
    return int(np.sum(np.asarray(diag.eigenvalues) > diag.tau)), diag


def _propose(strategy, current, n, rng, step):
    v = current.vectors[n]
    if strategy == "random":
        return unit_vector(v + step * _random_tangent(rng, v))
    # "gradient": random half kick, then half a step up the tangential gradient of det
    w = unit_vector(v + 0.5 * step * _random_tangent(rng, v))
    grad = SpikeHamiltonian(current, n).gradient(w)
    grad -= (grad @ w) * w
    norm = np.linalg.norm(grad)
    if norm == 0.0 or not np.isfinite(norm):
        return w
    return unit_vector(w + 0.5 * step * grad / norm)


def repair(m, epsilon, tau=None, seed=0, strategy="random", max_attempts=MAX_ATTEMPTS):
    """
    Move spikes of a singular constellation by less than ``epsilon / N_s`` each
    until its Gram matrix passes the basis test.

    Spikes are visited in order. Each visited spike gets up to
    ``max_attempts`` random tangent moves of length epsilon / (2 N_s)
    (``strategy="random"``), or a random half-kick followed by half a step up
    the gradient of det G (``strategy="gradient"``); the first move that raises
    the numerical rank is kept. Spike ``n`` draws from its own stream spawned
    from ``seed``. A constellation that already passes is returned as is.

    Raises RepairFailed if the constellation is still not a basis after the
    last spike.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if strategy not in ("random", "gradient"):
        raise ValueError(f"unknown repair strategy {strategy!r}")
    n_points = len(m)
    step = epsilon / (2 * n_points)
    rank, diag = _numerical_rank(m, tau)
    current = m
    moved = []
    attempts = 0
    streams = np.random.SeedSequence(seed).spawn(n_points)
    for n in range(n_points):
        if diag.is_basis:
            break
        rng = np.random.default_rng(streams[n])
        for _ in range(max_attempts):
            attempts += 1
            candidate = replace_vector(current, n, _propose(strategy, current, n, rng, step))
            cand_rank, cand_diag = _numerical_rank(candidate, tau)
            if cand_rank > rank:
                current, rank, diag = candidate, cand_rank, cand_diag
                moved.append(n)
                break

    per_spike = np.linalg.norm(current.vectors - m.vectors, axis=1)
    report = RepairReport(
        moved_indices=moved,
        total_displacement=distance(m, current),
        final_log_abs_det=-math.inf if diag.singular else diag.log_abs_det,
        attempts=attempts,
        epsilon=float(epsilon),
        tau=diag.tau,
        final_min_eigenvalue=diag.min_eigenvalue,
        max_spike_displacement=float(per_spike.max()),
        strategy=strategy,
        seed=int(seed),
        success=diag.is_basis,
    )
    if not diag.is_basis:
        raise RepairFailed(
            report,
            f"constellation still singular after {attempts} attempts "
            f"(rank {rank} of {n_points}); epsilon={epsilon} or tau={diag.tau:.3e} "
            f"may be too tight",
        )
    return current, report
