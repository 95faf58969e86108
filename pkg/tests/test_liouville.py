import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from lindpath.errors import ConfigurationError, ValidationError
from lindpath.liouville import (HBAR, DensityMatrix, HamiltonianSpec, LindbladChannel,
                                Superoperator, apply, build_liouvillian, build_step_propagator,
                                propagator_element, trace_defect, unvec, vec)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)   # |0><1|


def random_hermitian(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2


def random_state(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def test_vectorization_is_column_major():
    X = np.arange(9).reshape(3, 3)
    assert vec(X)[1] == X[1, 0]
    assert vec(X)[3] == X[0, 1]
    np.testing.assert_array_equal(unvec(vec(X), 3), X)


def test_zero_generator():
    h = HamiltonianSpec.static(np.zeros((3, 3)))
    L = build_liouvillian(h, [], 0.7)
    assert np.all(L.matrix == 0)


def test_pure_decay_rate():
    h = HamiltonianSpec.static(np.zeros((2, 2)))
    L = build_liouvillian(h, [LindbladChannel(LOWER, 0.05)], 0.0)
    drho = unvec(L.matrix @ vec(np.diag([0, 1.0])), 2)
    assert drho[1, 1].real == pytest.approx(-0.05, abs=1e-15)
    assert drho[0, 0].real == pytest.approx(0.05, abs=1e-15)


def test_drive_commutator():
    # d rho/dt = -i f/2 [sx, |0><0|]: populations static, coherence of size f/2
    f = 1.0
    h = HamiltonianSpec.static(0.5 * HBAR * f * SX)
    drho = unvec(build_liouvillian(h, [], 0.0).matrix @ vec(np.diag([1.0, 0])), 2)
    assert abs(drho[0, 0]) < 1e-15 and abs(drho[1, 1]) < 1e-15
    assert abs(drho[0, 1]) == pytest.approx(0.5, rel=1e-14)
    assert drho[1, 0] == pytest.approx(-0.5j, abs=1e-15)
    assert drho[0, 1] == pytest.approx(0.5j, abs=1e-15)


def test_liouvillian_errors():
    h = HamiltonianSpec.static(np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        build_liouvillian(h, [LindbladChannel(np.zeros((3, 3)), 0.1)], 0.0)
    with pytest.raises(ValidationError):
        build_liouvillian(h, [LindbladChannel(LOWER, lambda t: -1.0)], 0.0)
    with pytest.raises(ValidationError):
        build_step_propagator(h, [], 0.0, 0.0)


def test_identity_propagator_for_zero_generator():
    M = build_step_propagator(HamiltonianSpec.static(np.zeros((2, 2))), [], 0.0, 0.3)
    np.testing.assert_allclose(M.matrix, np.eye(4), atol=0)


def test_decay_propagator_elements():
    h = HamiltonianSpec.static(np.zeros((2, 2)))
    M = build_step_propagator(h, [LindbladChannel(LOWER, 0.05)], 0.0, 0.1)
    assert propagator_element(M, 1, 1, 1, 1) == pytest.approx(np.exp(-0.005), rel=1e-14)
    assert propagator_element(M, 0, 0, 1, 1) == pytest.approx(1 - np.exp(-0.005), rel=1e-12)
    out = apply(M, DensityMatrix.pure(2, 1))
    assert out.entries[1, 1].real == pytest.approx(0.9950124791926823, rel=1e-14)
    with pytest.raises(IndexError):
        propagator_element(M, 2, 0, 0, 0)


def test_identity_element_is_delta():
    I = Superoperator.identity(3)
    for a, b, c, d in np.ndindex(3, 3, 3, 3):
        assert propagator_element(I, a, b, c, d) == (a == c and b == d)


def test_apply_trivial_maps():
    rng = np.random.default_rng(0)
    rho = DensityMatrix(random_state(rng, 3))
    np.testing.assert_allclose(apply(Superoperator.identity(3), rho).entries, rho.entries, atol=1e-15)
    assert np.all(apply(Superoperator(3, np.zeros((9, 9))), rho).entries == 0)
    with pytest.raises(ConfigurationError):
        apply(Superoperator.identity(2), rho)


def test_rabi_composition_matches_sin_squared():
    f, dt = 1.0, 0.01
    h = HamiltonianSpec.static(0.5 * HBAR * f * SX)
    M = build_step_propagator(h, [], 0.0, dt)
    rho = DensityMatrix.pure(2, 0)
    for k in range(1, 315):
        rho = apply(M, rho)
        if k % 50 == 0:
            assert rho.entries[1, 1].real == pytest.approx(np.sin(f * k * dt / 2) ** 2, abs=1e-12)


def test_unitary_limit_matches_direct_exponential():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        H = random_hermitian(rng, n)
        dt = 0.37
        M = build_step_propagator(HamiltonianSpec.static(H), [], 0.0, dt)
        U = expm(-1j * H * dt / HBAR)
        X = random_state(rng, n)
        np.testing.assert_allclose(unvec(M.matrix @ vec(X), n), U @ X @ U.conj().T, atol=1e-13)


def test_composition_exact_for_constant_generator():
    rng = np.random.default_rng(4)
    H = random_hermitian(rng, 3)
    ch = [LindbladChannel(rng.normal(size=(3, 3)), 0.2)]
    h = HamiltonianSpec.static(H)
    M1 = build_step_propagator(h, ch, 0.0, 0.2)
    M2 = build_step_propagator(h, ch, 0.0, 0.4)
    np.testing.assert_allclose((M1 @ M1).matrix, M2.matrix, atol=1e-13)


def test_composition_second_order_for_time_dependent_generator():
    h = HamiltonianSpec(2, lambda t: 0.5 * HBAR * np.cos(0.8 * t) * SX + 0.3 * t * np.diag([0, 1.0]))
    errs = []
    for dt in (0.2, 0.1, 0.05):
        # M(t + dt) applied after M(t)
        two =build_step_propagator(h, [], dt, dt) @ build_step_propagator(h, [], 0.0, dt)
        errs.append(np.max(np.abs(two.matrix - build_step_propagator(h, [], 0.0, 2 * dt).matrix)))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(slopes > 2.7)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([2, 3]),
       n_ch=st.integers(0, 3), dt=st.floats(0.01, 2.0))
def test_propagator_physicality(seed, n, n_ch, dt):
    rng = np.random.default_rng(seed)
    h = HamiltonianSpec.static(random_hermitian(rng, n))
    ch = [LindbladChannel(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), rng.uniform(0, 1))
          for _ in range(n_ch)]
    M = build_step_propagator(h, ch, 0.0, dt)
    assert trace_defect(M) < 1e-12
    rho = DensityMatrix(random_state(rng, n))
    out = apply(M, rho)
    assert abs(out.trace() - 1) < 1e-12
    assert np.linalg.eigvalsh(out.entries).min() > -1e-10
    assert out.hermitian_correction < 1e-12


def test_density_matrix_validation():
    DensityMatrix.pure(2, 0).validate()
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.7, 0.7])).validate()
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.5, -0.5])).validate()
    with pytest.raises(ValidationError):
        DensityMatrix(np.array([[0.5, 0.5], [0.1, 0.5]])).validate()
