"""Quantum-dot presets: laser-driven two-level dot and dot-cavity system.

Both work in the rotating frame with energies in meV. The detuning ``delta``
is measured from the polaron-shifted exciton line: when phonons are on, the
builder raises the bare exciton energy by the bath's polaron shift so that
the shift generated by the influence functional cancels it.

Bases: driven dot ``{|0>, |X>}``; dot-cavity ``{|G>, |P>, |X>}`` with
``|P>`` = dot ground state plus one photon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .adm import SystemModel
from .bath import GaAsDeformation, polaron_shift
from .errors import ValidationError
from .liouville import HBAR, HamiltonianSpec, LindbladChannel

GROUND, EXCITON = 0, 1
CAV_G, CAV_P, CAV_X = 0, 1, 2

Envelope = Union[float, Callable[[float], float]]


def gaussian_envelope(area, fwhm, center):
    """Gaussian field envelope (1/ps) with pulse area ``area`` (rad) and field FWHM ``fwhm`` (ps)."""
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    norm = area / (math.sqrt(2.0 * math.pi) * sigma)

    def f(t):
        return norm * math.exp(-0.5 * ((t - center) / sigma) ** 2)

    f.params = {"shape": "gaussian", "area_rad": area, "fwhm_ps": fwhm, "center_ps": center}
    return f


def _shifted_exciton_energy(delta, sd, state):
    if sd is None:
        return -delta
    return -delta - polaron_shift(sd).get(state, 0.0)


@dataclass(frozen=True)
class DrivenDotModel:
    """Laser-driven dot with radiative decay.

    field_strength : constant value or envelope ``f(t)`` in 1/ps
    detuning : meV, from the polaron-shifted exciton resonance
    radiative_rate : 1/ps
    temperature : K
    """

    field_strength: Envelope = 1.0
    detuning: float = 0.0
    radiative_rate: float = 0.0
    temperature: float = 0.0
    phonons: bool = True
    gaas: GaAsDeformation = field(default_factory=lambda: GaAsDeformation(active_pairs=((1, 1),)))

    def __post_init__(self):
        if self.radiative_rate < 0:
            raise ValidationError("radiative rate must be >= 0")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")


@dataclass(frozen=True)
class DotCavityModel:
    """Dot in a single-mode cavity, single-photon limit.

    coupling : light-matter coupling g in 1/ps (hbar g in meV is ``coupling * HBAR``)
    detuning : meV, from the polaron-shifted exciton resonance
    cavity_loss : photon loss rate kappa in 1/ps
    """

    coupling: float = 0.1
    detuning: float = 0.0
    cavity_loss: float = 0.0
    temperature: float = 0.0
    phonons: bool = True
    gaas: GaAsDeformation = field(default_factory=lambda: GaAsDeformation(active_pairs=((2, 2),)))

    def __post_init__(self):
        if self.cavity_loss < 0:
            raise ValidationError("cavity loss rate must be >= 0")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")


def build_driven_dot(model: DrivenDotModel) -> SystemModel:
    """``H = hbar f(t)/2 (|0><X| + |X><0|) - delta |X><X|`` plus decay ``|0><X|``."""
    sd = model.gaas if model.phonons else None
    if sd is not None and tuple(sd.active_pairs) != ((EXCITON, EXCITON),):
        raise ValidationError("driven-dot phonon coupling must act on the exciton only")
    e_x = _shifted_exciton_energy(model.detuning, sd, EXCITON)
    f = model.field_strength

    if callable(f):
        def H(t):
            half = 0.5 * HBAR * f(t)
            return np.array([[0.0, half], [half, e_x]], dtype=complex)
        ham = HamiltonianSpec(2, H)
    else:
        half = 0.5 * HBAR * float(f)
        ham = HamiltonianSpec.static([[0.0, half], [half, e_x]])
    decay = np.zeros((2, 2))
    decay[GROUND, EXCITON] = 1.0
    channels = (LindbladChannel(decay, model.radiative_rate),) if model.radiative_rate else ()
    info = {"exciton_energy_mev": e_x,
            "polaron_shift_mev": (polaron_shift(sd).get(EXCITON, 0.0) if sd is not None else 0.0)}
    return SystemModel(ham, channels, sd, model.temperature, "driven_dot", info)


def build_dot_cavity(model: DotCavityModel) -> SystemModel:
    """``H = hbar g (|P><X| + |X><P|) - delta |X><X|`` plus loss ``|G><P|``."""
    sd = model.gaas if model.phonons else None
    if sd is not None and tuple(sd.active_pairs) != ((CAV_X, CAV_X),):
        raise ValidationError("dot-cavity phonon coupling must act on |X> only")
    e_x = _shifted_exciton_energy(model.detuning, sd, CAV_X)
    hg = HBAR * model.coupling
    H = np.zeros((3, 3), dtype=complex)
    H[CAV_P, CAV_X] = H[CAV_X, CAV_P] = hg
    H[CAV_X, CAV_X] = e_x
    loss = np.zeros((3, 3))
    loss[CAV_G, CAV_P] = 1.0
    channels = (LindbladChannel(loss, model.cavity_loss),) if model.cavity_loss else ()
    info = {"exciton_energy_mev": e_x, "coupling_mev": hg}
    return SystemModel(HamiltonianSpec.static(H), channels, sd, model.temperature, "dot_cavity", info)


def stationary_occupation_no_phonons(f, gamma, delta):
    """Steady exciton occupation ``f^2 / (2 f^2 + gamma^2 + (2 delta / hbar)^2)``."""
    if f == 0 and gamma == 0 and delta == 0:
        raise ValidationError("stationary occupation undefined for f = gamma = delta = 0")
    return f**2 / (2 * f**2 + gamma**2 + (2 * delta / HBAR) ** 2)
