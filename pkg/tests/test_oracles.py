import numpy as np
import pytest

from lindpath.adm import SimulationConfig, SystemModel, run, step_propagators
from lindpath.bath import GaAsDeformation, MemoryKernelTable, compute_kernel_table
from lindpath.errors import ValidationError
from lindpath.influence import build_influence_table
from lindpath.liouville import (DensityMatrix, HamiltonianSpec, LindbladChannel, apply,
                                build_step_propagator)
from lindpath.models import DrivenDotModel, build_driven_dot, stationary_occupation_no_phonons
from lindpath.oracles import full_path_sum, lindblad_ode_solve

LOWER = np.array([[0, 1], [0, 0]], dtype=complex)
ZERO_H = HamiltonianSpec.static(np.zeros((2, 2)))


def test_single_step_without_coupling_is_one_propagator():
    h = HamiltonianSpec.static(np.array([[0.0, 0.3], [0.3, -0.2]]))
    M = build_step_propagator(h, [LindbladChannel(LOWER, 0.2)], 0.0, 0.5)
    rho0 = DensityMatrix(np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]]))
    inf = build_influence_table(MemoryKernelTable(1, 0.5, 0.0), 2)
    out = full_path_sum(1, [M], inf, rho0)
    np.testing.assert_allclose(out.entries, apply(M, rho0).entries, atol=1e-15)


def test_summation_order_does_not_matter():
    model = build_driven_dot(DrivenDotModel(1.0, 0.5, 0.05, 100.0))
    cfg = SimulationConfig(0.5, 4, 4, DensityMatrix.pure(2, 0))
    props, _ = step_propagators(model, cfg)
    inf = build_influence_table(compute_kernel_table(GaAsDeformation(), 0.5, 4, 100.0), 2)
    ref = full_path_sum(4, props, inf, cfg.initial_state, order="lexicographic").entries
    for order in ("reversed", "shuffled"):
        other = full_path_sum(4, props, inf, cfg.initial_state, order=order).entries
        np.testing.assert_allclose(other, ref, rtol=1e-13, atol=0)


def test_enumeration_guard():
    inf = build_influence_table(MemoryKernelTable(1, 0.5, 0.0), 3)
    M = build_step_propagator(HamiltonianSpec.static(np.zeros((3, 3))), [], 0.0, 0.5)
    with pytest.raises(ValidationError):
        full_path_sum(9, [M] * 9, inf, DensityMatrix.pure(3, 0))


def test_ode_constant_without_generator():
    rho0 = DensityMatrix(np.array([[0.3, 0.1j], [-0.1j, 0.7]]))
    ts = lindblad_ode_solve(ZERO_H, [], rho0, np.linspace(0, 5, 11))
    assert np.all(ts.states == rho0.entries)


def test_ode_pure_decay():
    t = np.linspace(0.0, 20.0, 201)
    # 100 substeps per 0.1 ps interval: RK4 step of 1e-3 ps
    ts = lindblad_ode_solve(ZERO_H, [LindbladChannel(LOWER, 0.05)], DensityMatrix.pure(2, 1), t,
                            substeps=100)
    np.testing.assert_allclose(ts.population(1), np.exp(-0.05 * t), rtol=0, atol=1e-10)


def test_ode_damped_rabi_reaches_stationary_value():
    model = build_driven_dot(DrivenDotModel(1.0, 0.0, 0.05, phonons=False))
    t = np.linspace(0.0, 300.0, 3001)
    ts = lindblad_ode_solve(model.hamiltonian, model.channels, DensityMatrix.pure(2, 0), t)
    assert ts.population(1)[-1] == pytest.approx(0.499376, abs=1e-4)
    assert stationary_occupation_no_phonons(1.0, 0.05, 0.0) == pytest.approx(0.49937578, rel=1e-7)


def test_ode_rejects_coarse_grids():
    with pytest.raises(ValidationError):
        lindblad_ode_solve(ZERO_H, [], DensityMatrix.pure(2, 0), [0.0, 1.0], substeps=5)
    with pytest.raises(ValidationError):
        lindblad_ode_solve(ZERO_H, [], DensityMatrix.pure(2, 0), [0.0, 0.0])


def test_path_sum_agrees_with_ode_without_coupling():
    rng = np.random.default_rng(11)
    H = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = HamiltonianSpec.static(0.3 * (H + H.conj().T))
    ch = [LindbladChannel(rng.normal(size=(2, 2)), 0.2)]
    rho0 = DensityMatrix.pure(2, 0)
    inf = build_influence_table(MemoryKernelTable(3, 0.1, 0.0), 2)
    errs = []
    for dt in (0.1, 0.05):
        props = [build_step_propagator(h, ch, k * dt, dt) for k in range(3)]
        paths = full_path_sum(3, props, inf, rho0).entries
        ode = lindblad_ode_solve(h, ch, rho0, [0.0, 3 * dt], substeps=200).states[-1]
        errs.append(np.max(np.abs(paths - ode)))
    # constant generator: the step propagator is exact
    assert max(errs) < 1e-12
