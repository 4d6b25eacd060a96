import json

import numpy as np
import pytest

from hedgehog.constellation import Constellation, distance, random_constellation, replace_vector
from hedgehog.flow import (
    RepairFailed,
    SpikeHamiltonian,
    grad_hamiltonian,
    hamiltonian,
    integrate_flow,
    is_fixed_point,
    repair,
)
from hedgehog.gram import diagnostics, gram
from hedgehog.spin import SpinLabel

from conftest import HALF, TETRAHEDRON, random_unit, well_conditioned


def _tangent(rng, v):
    u = rng.standard_normal(3)
    u -= (u @ v) * v
    return u / np.linalg.norm(u)


@pytest.mark.parametrize("k", range(4))
def test_hamiltonian_tetrahedron(tetrahedron, k):
    assert abs(hamiltonian(tetrahedron, k, TETRAHEDRON[k]) - 16 / 27) < 1e-12


def test_hamiltonian_matches_gram_det():
    rng = np.random.default_rng(0)
    for d in range(1, 4):
        m = random_constellation(SpinLabel(d), d)
        v = random_unit(rng)
        expected = diagnostics(gram(replace_vector(m, 2, v))).det
        assert abs(hamiltonian(m, 2, v) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_hamiltonian_vanishes_on_other_spike(tetrahedron):
    assert abs(hamiltonian(tetrahedron, 0, TETRAHEDRON[2])) < 1e-15
    grad = grad_hamiltonian(tetrahedron, 0, TETRAHEDRON[2])
    assert np.all(np.isfinite(grad)) and np.linalg.norm(grad) > 0


def test_hamiltonian_index_checked(tetrahedron):
    with pytest.raises(IndexError):
        SpikeHamiltonian(tetrahedron, 4)


@pytest.mark.parametrize("d", [1, 2])
def test_hamiltonian_is_trig_polynomial_on_great_circle(d):
    # Gram entries are degree 2s in v and the diagonal 4s, so det has degree <= 4s
    # and restricted to a great circle is a trigonometric polynomial of that degree.
    m = well_conditioned(SpinLabel(d), 3)
    rng = np.random.default_rng(d)
    a = random_unit(rng)
    b = _tangent(rng, a)
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    values = np.array([hamiltonian(m, 1, np.cos(t) * a + np.sin(t) * b) for t in theta])
    degree = 2 * d
    basis = [np.ones_like(theta)]
    for j in range(1, degree + 1):
        basis += [np.cos(j * theta), np.sin(j * theta)]
    basis = np.array(basis).T
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    assert np.abs(basis @ coef - values).max() < 1e-8
    # one degree lower cannot fit, so the bound is tight
    coef, *_ = np.linalg.lstsq(basis[:, :-2], values, rcond=None)
    assert np.abs(basis[:, :-2] @ coef - values).max() > 1e-6


@pytest.mark.parametrize("d", [1, 2])
def test_gradient_matches_directional_derivative(d):
    rng = np.random.default_rng(10 + d)
    for trial in range(10):
        m = random_constellation(SpinLabel(d), [d, trial])
        k = trial % len(m)
        v = random_unit(rng)
        u = _tangent(rng, v)
        h = 1e-5
        ham = SpikeHamiltonian(m, k)
        directional = (ham(v + h * u) - ham(v - h * u)) / (2 * h)
        assert abs(directional - grad_hamiltonian(m, k, v) @ u) < 1e-6


def test_gradient_quadratic_exact_at_spin_half(tetrahedron):
    # at s = 1/2, H is quadratic in v: central differences are exact
    ham = SpikeHamiltonian(tetrahedron, 0)
    v = TETRAHEDRON[0]
    g1, g2 = ham.gradient(v, 1e-2), ham.gradient(v, 1e-3)
    assert np.abs(g1 - g2).max() < 1e-12


def test_gradient_richardson_ratio_spin_one():
    m = random_constellation(SpinLabel(2), 4)
    ham = SpikeHamiltonian(m, 3)
    v = random_unit(np.random.default_rng(1))
    h = 1e-2
    g = [ham.gradient(v, h / 2**j) for j in range(3)]
    ratio = np.linalg.norm(g[0] - g[1]) / np.linalg.norm(g[1] - g[2])
    assert 4 / 3 <= ratio <= 12
    assert abs(ratio - 4) < 0.05


def test_flow_conserves_norm_and_energy(tetrahedron):
    v0 = TETRAHEDRON[0] + 0.2 * np.array([0.0, 1.0, -1.0])
    states = integrate_flow(tetrahedron, 0, v0, 1e-3, 1000)
    assert len(states) == 1001
    assert states[0].t == 0.0 and states[-1].t == pytest.approx(1.0)
    energies = np.array([st.energy for st in states])
    assert np.abs(energies - energies[0]).max() < 1e-8
    assert max(st.norm_drift for st in states) < 1e-9
    for st in states:
        assert abs(np.linalg.norm(st.v) - 1) < 1e-12
        assert st.active_index == 0
    # the spike actually moves
    assert np.linalg.norm(states[-1].v - states[0].v) > 1e-3


def test_flow_norm_drift_coarse_step(tetrahedron):
    v0 = TETRAHEDRON[1] + 0.3 * np.array([1.0, 0.0, 0.0])
    states = integrate_flow(tetrahedron, 1, v0, 1e-2, 200)
    assert max(st.norm_drift for st in states) < 1e-9


def test_flow_halving_dt(tetrahedron):
    # at dt = 1e-3 the error is already round-off; compare coarse steps over the same span
    m = tetrahedron
    v0 = TETRAHEDRON[0] + 0.2 * np.array([0.0, 1.0, -1.0])

    def energy_error(dt):
        states = integrate_flow(m, 0, v0, dt, int(round(1 / dt)))
        return max(abs(st.energy - states[0].energy) for st in states)

    coarse, fine = energy_error(0.1), energy_error(0.05)
    assert coarse > 1e-12
    assert coarse / fine >= 8


def test_fixed_point_does_not_move(tetrahedron):
    # the original vertex maximizes det with the other three spikes fixed
    v = TETRAHEDRON[0]
    assert is_fixed_point(tetrahedron, 0, v)
    states = integrate_flow(tetrahedron, 0, v, 1e-3, 10)
    assert np.linalg.norm(states[1].v - v) < 1e-12
    assert not is_fixed_point(tetrahedron, 0, v + [0.0, 0.2, -0.2])


def test_flow_rejects_bad_arguments(tetrahedron):
    with pytest.raises(ValueError):
        integrate_flow(tetrahedron, 0, TETRAHEDRON[0], 0.0, 10)
    with pytest.raises(ValueError):
        integrate_flow(tetrahedron, 0, TETRAHEDRON[0], 1e-3, 0)


# --- repair -------------------------------------------------------------------

def _check_repair(m, epsilon, out, report, tau=None):
    assert diagnostics(gram(out), tau).is_basis
    assert report.success
    assert report.total_displacement == distance(m, out)
    assert report.total_displacement < epsilon
    per_spike = np.linalg.norm(out.vectors - m.vectors, axis=1)
    assert per_spike.max() < epsilon / len(m)
    assert report.max_spike_displacement == per_spike.max()
    assert sorted(set(report.moved_indices)) == sorted(np.flatnonzero(per_spike > 0).tolist())


def test_repair_leaves_basis_unchanged(tetrahedron):
    out, report = repair(tetrahedron, 1e-3, seed=0)
    assert out is tetrahedron
    assert report.total_displacement == 0 and report.moved_indices == [] and report.attempts == 0


def test_repair_duplicate_spike(tetrahedron):
    v = TETRAHEDRON.copy()
    v[1] = v[0]
    m = Constellation(HALF, v)
    out, report = repair(m, 1e-3, tau=1e-12, seed=3)
    _check_repair(m, 1e-3, out, report, tau=1e-12)
    assert report.final_min_eigenvalue > 1e-12
    json.dumps(report.to_dict())


def test_repair_all_coincident_spin_half():
    m = Constellation(HALF, [[0.0, 0.0, 1.0]] * 4)
    out, report = repair(m, 0.1, seed=0)
    _check_repair(m, 0.1, out, report)


def test_repair_is_deterministic(duplicate):
    a, ra = repair(duplicate, 1e-3, seed=8)
    b, rb = repair(duplicate, 1e-3, seed=8)
    assert a == b and ra == rb
    c, _ = repair(duplicate, 1e-3, seed=9)
    assert c != a


def test_repair_gradient_strategy(duplicate):
    out, report = repair(duplicate, 1e-3, seed=2, strategy="gradient")
    _check_repair(duplicate, 1e-3, out, report)
    assert report.strategy == "gradient"


def test_repair_failure_carries_report():
    m = Constellation(HALF, [[0.0, 0.0, 1.0]] * 4)
    with pytest.raises(RepairFailed) as info:
        repair(m, 1e-3, tau=0.5, seed=0, max_attempts=4)
    report = info.value.report
    assert not report.success
    assert report.total_displacement < 1e-3
    json.dumps(report.to_dict())


def test_repair_rejects_bad_arguments(tetrahedron):
    with pytest.raises(ValueError):
        repair(tetrahedron, 0.0)
    with pytest.raises(ValueError):
        repair(tetrahedron, 1e-3, strategy="annealing")
