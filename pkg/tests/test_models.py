import numpy as np
import pytest
from scipy.integrate import trapezoid

from lindpath.adm import SimulationConfig, run
from lindpath.bath import polaron_shift
from lindpath.errors import ValidationError
from lindpath.liouville import HBAR, DensityMatrix
from lindpath.models import (CAV_G, CAV_P, CAV_X, EXCITON, GROUND, DotCavityModel,
                             DrivenDotModel, build_dot_cavity, build_driven_dot,
                             gaussian_envelope, stationary_occupation_no_phonons)


def test_stationary_occupation_values():
    assert stationary_occupation_no_phonons(1.0, 0.0, 0.0) == 0.5
    assert stationary_occupation_no_phonons(1.0, 0.05, 0.0) == pytest.approx(1 / 2.0025, rel=1e-15)
    expected = 1 / (2 + 0.05**2 + (2 / HBAR) ** 2)
    assert stationary_occupation_no_phonons(1.0, 0.05, 1.0) == pytest.approx(expected, rel=1e-15)
    assert stationary_occupation_no_phonons(1.0, 0.05, 1.0) == pytest.approx(0.0890, abs=5e-4)
    with pytest.raises(ValidationError):
        stationary_occupation_no_phonons(0.0, 0.0, 0.0)


def test_driven_dot_hamiltonian_layout():
    model = build_driven_dot(DrivenDotModel(2.0, 0.5, 0.05, 4.0))
    H = model.hamiltonian(0.0)
    shift = polaron_shift(model.spectral_density)[EXCITON]
    assert H[GROUND, EXCITON] == H[EXCITON, GROUND] == pytest.approx(HBAR)
    assert H[EXCITON, EXCITON] == pytest.approx(-0.5 - shift)
    assert model.channels[0].operator[GROUND, EXCITON] == 1
    assert build_driven_dot(DrivenDotModel(phonons=False)).spectral_density is None
    assert build_driven_dot(DrivenDotModel(phonons=False)).channels == ()


def test_phonon_free_detuning_symmetry():
    a = build_driven_dot(DrivenDotModel(1.0, 0.7, 0.1, phonons=False))
    b = build_driven_dot(DrivenDotModel(1.0, -0.7, 0.1, phonons=False))
    cfg = SimulationConfig(0.05, 400, 1, DensityMatrix.pure(2, 0))
    np.testing.assert_allclose(run(cfg, a).population(1), run(cfg, b).population(1), atol=1e-12)


def test_gaussian_envelope_area():
    pulse = gaussian_envelope(np.pi, 2.0, 10.0)
    t = np.linspace(0, 20, 20001)
    vals = np.array([pulse(x) for x in t])
    assert trapezoid(vals, t) == pytest.approx(np.pi, rel=1e-9)
    half = vals.max() / 2
    above = t[vals >= half]
    assert above[-1] - above[0] == pytest.approx(2.0, abs=2e-3)


def test_cavity_conserves_excitation_without_loss():
    model = build_dot_cavity(DotCavityModel(0.3, 0.5, 0.0, phonons=False))
    ts = run(SimulationConfig(0.1, 300, 1, DensityMatrix.pure(3, CAV_X)), model)
    np.testing.assert_allclose(ts.population(CAV_P) + ts.population(CAV_X), 1.0, atol=1e-10)
    assert np.max(ts.population(CAV_G)) == 0


def test_cavity_without_coupling_stays_excited():
    model = build_dot_cavity(DotCavityModel(0.0, 0.0, 0.0, phonons=False))
    ts = run(SimulationConfig(0.5, 20, 1, DensityMatrix.pure(3, CAV_X)), model)
    np.testing.assert_allclose(ts.population(CAV_X), 1.0, atol=1e-15)


def test_cavity_layout_and_loss():
    model = build_dot_cavity(DotCavityModel(0.2, 1.0, 0.1, 1.0))
    H = model.hamiltonian(0.0)
    assert H[CAV_P, CAV_X] == pytest.approx(0.2 * HBAR)
    assert H[CAV_G].tolist() == [0, 0, 0]
    assert model.channels[0].operator[CAV_G, CAV_P] == 1
    assert model.spectral_density.active_pairs == ((CAV_X, CAV_X),)


@pytest.mark.parametrize("kw", [dict(radiative_rate=-0.1), dict(temperature=-1.0)])
def test_driven_dot_validation(kw):
    with pytest.raises(ValidationError):
        DrivenDotModel(**kw)


def test_cavity_validation():
    with pytest.raises(ValidationError):
        DotCavityModel(cavity_loss=-1.0)
