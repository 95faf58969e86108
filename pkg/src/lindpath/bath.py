"""Spectral densities and memory kernels of a pure-dephasing oscillator bath.

Frequencies are angular frequencies in 1/ps, spectral densities are in 1/ps
(the coupling Hamiltonian is ``hbar * sum_j (g_j b_j^+ + g_j^* b_j)``), and
kernels are dimensionless.

For a step ``dt`` and lag ``tau = l * dt`` with ``l >= 1``::

    K(tau) = 2 int_0^inf J(w)/w^2 (1 - cos w dt) (coth(hbar w / 2 kT) cos w tau - i sin w tau) dw

and at equal times::

    K(0) = int_0^inf J(w)/w^2 (coth(hbar w / 2 kT)(1 - cos w dt) + i sin w dt - i w dt) dw

The last term of ``K(0)`` carries the polaron shift ``-hbar int J(w)/w dw``.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, QuadratureError, ValidationError
from .liouville import ELEMENTARY_CHARGE, HBAR, PLANCK_SI

# SI, exact by definition.
HBAR_SI = PLANCK_SI / (2.0 * math.pi)   # J s, 1.054571818e-34
BOLTZMANN = 1.380649e-23                # J/K
#: hbar / k_B in K ps.
HBAR_OVER_KB = HBAR_SI / BOLTZMANN * 1e12
PER_PS = 1e12                   # 1/ps in 1/s
NM = 1e-9

KERNEL_FORMAT_VERSION = 1

#: Default cache directory for kernel tables, if set.
CACHE_ENV_VAR = "LINDPATH_CACHE_DIR"


def _normalize_pairs(pairs):
    out = []
    for p in pairs:
        nu, mu = (int(p[0]), int(p[1]))
        if nu < 0 or mu < 0:
            raise ConfigurationError(f"negative state index in active pair {p}")
        out.append((nu, mu))
    return tuple(sorted(set(out)))


class SpectralDensity:
    """Base class; subclasses implement ``_evaluate`` on arrays of ``w >= 0``."""

    active_pairs: tuple = ((1, 1),)

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise ValidationError("spectral density is defined for w >= 0 only")
        out = self._evaluate(w)
        return float(out) if np.ndim(out) == 0 else out

    def _evaluate(self, w):
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    def support_limit(self, rel=1e-22):
        """Frequency beyond which ``J(w) <= rel * max J`` (searched numerically)."""
        grid = np.geomspace(1e-4, 1e4, 4001)
        vals = self._evaluate(grid)
        ipk = int(np.argmax(vals))
        if vals[ipk] <= 0:
            return 0.0
        below = np.nonzero(vals[ipk:] <= rel * vals[ipk])[0]
        if below.size == 0:
            raise ValidationError("spectral density does not decay within w < 1e4 / ps")
        return float(grid[ipk + below[0]])


@dataclass(frozen=True)
class GaAsDeformation(SpectralDensity):
    """LA-phonon deformation-potential coupling of an exciton in a spherical
    Gaussian dot::

        J(w) = w^3 / (4 pi^2 rho hbar c^5) (D_e exp(-w^2 a_e^2 / 4c^2) - D_h exp(-w^2 a_h^2 / 4c^2))^2

    Parameters are in SI-friendly units (kg/m^3, m/s, eV, nm); the formula is
    evaluated in SI with ``hbar = h / 2 pi = 1.054571818e-34 J s`` and the result
    returned in 1/ps.
    """

    mass_density: float = 5370.0
    sound_velocity: float = 5110.0
    d_e: float = 7.0
    d_h: float = -3.5
    a_e: float = 4.0
    a_h: float = 4.0 / 1.15
    active_pairs: tuple = ((1, 1),)

    def __post_init__(self):
        if self.mass_density <= 0 or self.sound_velocity <= 0 or self.a_e <= 0 or self.a_h <= 0:
            raise ValidationError("GaAs parameters must be positive (except deformation potentials)")
        object.__setattr__(self, "active_pairs", _normalize_pairs(self.active_pairs))

    def scaled(self, s):
        """Copy with both deformation potentials multiplied by ``s``."""
        return GaAsDeformation(self.mass_density, self.sound_velocity, s * self.d_e,
                               s * self.d_h, self.a_e, self.a_h, self.active_pairs)

    def _evaluate(self, w):
        w_si = w * PER_PS
        c = self.sound_velocity
        ae, ah = self.a_e * NM, self.a_h * NM
        de, dh = self.d_e * ELEMENTARY_CHARGE, self.d_h * ELEMENTARY_CHARGE
        form = de * np.exp(-w_si**2 * ae**2 / (4 * c**2)) - dh * np.exp(-w_si**2 * ah**2 / (4 * c**2))
        j_si = w_si**3 / (4 * np.pi**2 * self.mass_density * HBAR_SI * c**5) * form**2
        return j_si / PER_PS

    def params(self):
        return {"variant": "gaas", "mass_density": self.mass_density,
                "sound_velocity": self.sound_velocity, "d_e": self.d_e, "d_h": self.d_h,
                "a_e": self.a_e, "a_h": self.a_h, "active_pairs": [list(p) for p in self.active_pairs]}


@dataclass(frozen=True)
class PowerLawCutoff(SpectralDensity):
    """``J(w) = alpha w^a exp(-(w/wc)^2)`` or ``alpha w^a exp(-w/wc)``."""

    alpha: float
    exponent: float
    cutoff: float
    cutoff_shape: str = "gaussian"
    active_pairs: tuple = ((1, 1),)

    def __post_init__(self):
        if self.cutoff_shape not in ("gaussian", "exponential"):
            raise ValidationError(f"unknown cutoff shape {self.cutoff_shape!r}")
        if self.exponent <= 0 or self.cutoff <= 0:
            raise ValidationError("exponent and cutoff must be positive")
        object.__setattr__(self, "active_pairs", _normalize_pairs(self.active_pairs))

    def _evaluate(self, w):
        x = w / self.cutoff
        env = np.exp(-x**2) if self.cutoff_shape == "gaussian" else np.exp(-x)
        return self.alpha * w**self.exponent * env

    def params(self):
        return {"variant": "power_law", "alpha": self.alpha, "exponent": self.exponent,
                "cutoff": self.cutoff, "cutoff_shape": self.cutoff_shape,
                "active_pairs": [list(p) for p in self.active_pairs]}


@dataclass(frozen=True)
class Tabulated(SpectralDensity):
    """Piecewise-linear spectral density on a grid starting at ``w = 0``."""

    omega: tuple
    values: tuple
    active_pairs: tuple = ((1, 1),)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        j = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != j.shape or w.size < 2:
            raise ValidationError("tabulated spectral density needs matching 1-d grids")
        if w[0] != 0.0 or j[0] != 0.0:
            raise ValidationError("tabulated spectral density must start at J(0) = 0")
        if np.any(np.diff(w) <= 0):
            raise ValidationError("tabulated frequency grid must be strictly increasing")
        object.__setattr__(self, "omega", tuple(w.tolist()))
        object.__setattr__(self, "values", tuple(j.tolist()))
        object.__setattr__(self, "active_pairs", _normalize_pairs(self.active_pairs))

    def _evaluate(self, w):
        if np.any(w > self.omega[-1]):
            raise ValidationError(
                f"frequency beyond tabulated range (max {self.omega[-1]} / ps); no extrapolation")
        return np.interp(w, self.omega, self.values)

    def support_limit(self, rel=1e-22):
        return float(self.omega[-1])

    def params(self):
        return {"variant": "tabulated", "omega": list(self.omega), "values": list(self.values),
                "active_pairs": [list(p) for p in self.active_pairs]}


@dataclass(frozen=True)
class ZeroSpectralDensity(SpectralDensity):
    """No coupling at all."""

    active_pairs: tuple = ()

    def _evaluate(self, w):
        return np.zeros_like(w)

    def support_limit(self, rel=1e-22):
        return 0.0

    def params(self):
        return {"variant": "zero"}


def evaluate_spectral_density(sd: SpectralDensity, omega):
    """``J(w)`` in 1/ps; raises ``ValidationError`` for ``w < 0``."""
    return sd(omega)


def _coth_factor(w, temperature):
    if temperature == 0:
        return np.ones_like(w)
    x = HBAR_OVER_KB * w / (2.0 * temperature)
    with np.errstate(divide="ignore"):
        return 1.0 / np.tanh(x)


def _kernel_integrands(sd, dt, lag, temperature):
    """Real and imaginary integrands for one kernel entry (scalar ``w > 0``)."""
    tau = lag * dt

    def weight(w):
        # J(w) (1 - cos w dt) / w^2 evaluated without cancellation
        s = math.sin(0.5 * w * dt)
        return sd._evaluate(np.float64(w)) * 2.0 * s * s / (w * w)

    if lag == 0:
        def re(w):
            return weight(w) * _coth_factor(w, temperature)

        def im(w):
            x = w * dt
            return sd._evaluate(np.float64(w)) * (math.sin(x) - x) / (w * w)
    else:
        def re(w):
            return 2.0 * weight(w) * _coth_factor(w, temperature) * math.cos(w * tau)

        def im(w):
            return -2.0 * weight(w) * math.sin(w * tau)
    return re, im


def _integrate_oscillatory(func, upper, period_scale, tol):
    """Integrate ``func`` on ``[0, upper]`` split at half periods ``pi/period_scale``.

    Each piece is handled by adaptive Gauss-Kronrod (QUADPACK QAGS). Returns
    ``(value, error_estimate)``; pieces are summed with ``math.fsum``.
    """
    if upper <= 0:
        return 0.0, 0.0
    width = math.pi / period_scale
    n_pieces = max(1, math.ceil(upper / width))
    edges = np.linspace(0.0, upper, n_pieces + 1)
    values, errors = [], []
    piece_tol = tol / n_pieces
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                v, e = integrate.quad(func, a, b, epsabs=piece_tol, epsrel=1e-13, limit=200)
            except integrate.IntegrationWarning:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", integrate.IntegrationWarning)
                    v, e = integrate.quad(func, a, b, epsabs=piece_tol, epsrel=1e-13, limit=1000)
            values.append(v)
            errors.append(e)
    return math.fsum(values), math.fsum(errors)


def polaron_shift(sd: SpectralDensity, tol=1e-13):
    """Energy shift ``-hbar int J(w)/w dw`` (meV) of every coupled state."""
    upper = sd.support_limit()
    shifts = {}
    if upper > 0:
        val, _ = integrate.quad(lambda w: sd._evaluate(np.float64(w)) / w, 0.0, upper,
                                epsabs=tol, epsrel=1e-13, limit=500)
        for nu, mu in sd.active_pairs:
            if nu == mu:
                shifts[nu] = -HBAR * val
    return shifts


@dataclass(frozen=True)
class MemoryKernelTable:
    """Kernels ``K_{nu mu}(l dt)`` for ``l = 0 .. n_c - 1``.

    ``entries`` maps each active pair to a complex array of length ``n_c``;
    pairs not present (in either order) have vanishing kernels.
    ``polaron_shift`` maps coupled states to their energy shift in meV.
    """

    n_c: int
    dt: float
    temperature: float
    entries: Mapping = field(default_factory=dict)
    polaron_shift: Mapping = field(default_factory=dict)
    residual: float = 0.0
    key: str = ""

    def __post_init__(self):
        if self.n_c < 1:
            raise ValidationError("memory depth n_c must be >= 1")
        frozen = {}
        for pair, vals in dict(self.entries).items():
            arr = np.array(vals, dtype=complex)
            if arr.shape != (self.n_c,):
                raise ConfigurationError(
                    f"kernel entries for pair {pair} have shape {arr.shape}, expected ({self.n_c},)")
            arr.setflags(write=False)
            frozen[(int(pair[0]), int(pair[1]))] = arr
        object.__setattr__(self, "entries", frozen)
        object.__setattr__(self, "polaron_shift", {int(k): float(v) for k, v in dict(self.polaron_shift).items()})

    def kernel(self, nu, mu, lag):
        """``K_{nu mu}(lag dt)``; symmetric in the pair, zero if uncoupled."""
        if not 0 <= lag < self.n_c:
            raise IndexError(f"lag {lag} outside kernel table of depth {self.n_c}")
        vals = self.entries.get((nu, mu))
        if vals is None:
            vals = self.entries.get((mu, nu))
        return 0j if vals is None else complex(vals[lag])

    def max_state(self):
        idx = [max(p) for p in self.entries] + list(self.polaron_shift)
        return max(idx) if idx else -1

    def magnitudes(self):
        """``max over pairs |K(l dt)|`` for every lag."""
        if not self.entries:
            return np.zeros(self.n_c)
        return np.max(np.abs(np.array(list(self.entries.values()))), axis=0)


def kernel_cache_key(sd: SpectralDensity, dt, n_c, temperature):
    payload = {"version": KERNEL_FORMAT_VERSION, "sd": sd.params(), "dt": float(dt),
               "n_c": int(n_c), "temperature": float(temperature)}
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def compute_kernel_table(sd: SpectralDensity, dt, n_c, temperature, tol=1e-12) -> MemoryKernelTable:
    """Evaluate every kernel entry by oscillation-aware adaptive quadrature.

    The frequency axis is truncated at ``sd.support_limit()``, where ``J``
    has dropped below ``1e-22`` of its maximum; the neglected tail is bounded
    and added to the reported residual. Each entry is split into half-period
    pieces of ``cos/sin(w (tau + dt))`` and integrated to absolute tolerance
    ``tol``. Raises ``QuadratureError`` if the error estimate of any entry
    exceeds ``100 * tol``.
    """
    if not dt > 0:
        raise ValidationError(f"time step must be positive, got {dt}")
    if int(n_c) != n_c or n_c < 1:
        raise ValidationError(f"memory depth must be a positive integer, got {n_c}")
    if temperature < 0:
        raise ValidationError(f"temperature must be >= 0, got {temperature}")
    n_c = int(n_c)
    upper = sd.support_limit()
    key = kernel_cache_key(sd, dt, n_c, temperature)
    if upper == 0.0 or not sd.active_pairs:
        return MemoryKernelTable(n_c, dt, temperature, {}, {}, 0.0, key)

    values = np.empty(n_c, dtype=complex)
    worst = 0.0
    tail_w = upper
    tail = float(sd._evaluate(np.float64(tail_w))) * (4.0 / tail_w**2 + dt / tail_w) \
        * float(_coth_factor(np.float64(tail_w), temperature)) * tail_w
    for lag in range(n_c):
        re_f, im_f = _kernel_integrands(sd, dt, lag, temperature)
        scale = (lag + 1) * dt
        re, re_err = _integrate_oscillatory(re_f, upper, scale, tol)
        im, im_err = _integrate_oscillatory(im_f, upper, scale, tol)
        values[lag] = complex(re, im)
        err = math.hypot(re_err, im_err) + tail
        worst = max(worst, err)
    if worst > 100 * tol:
        raise QuadratureError(f"kernel quadrature did not converge (residual {worst:.3e})", worst)

    entries = {pair: values.copy() for pair in sd.active_pairs}
    return MemoryKernelTable(n_c, float(dt), float(temperature), entries, polaron_shift(sd), worst, key)


def memory_time_estimate(table: MemoryKernelTable, threshold) -> int:
    """Smallest lag after which all ``|K|`` stay below ``threshold * max |K|``.

    Returns ``table.n_c`` if the table never decays below the threshold.
    """
    if not 0 < threshold <= 1:
        raise ValidationError("threshold must lie in (0, 1]")
    mags = table.magnitudes()
    peak = mags.max() if mags.size else 0.0
    if peak == 0.0:
        return 0
    above = np.nonzero(mags > threshold * peak)[0]
    if above.size == 0:
        return 0
    return int(min(above[-1] + 1, table.n_c))


def save_kernel_table(table: MemoryKernelTable, path):
    """Write ``table`` as a compressed ``.npz`` archive with JSON metadata."""
    path = Path(path)
    pairs = sorted(table.entries)
    meta = {"version": KERNEL_FORMAT_VERSION, "n_c": table.n_c, "dt": table.dt,
            "temperature": table.temperature, "key": table.key, "residual": table.residual,
            "pairs": [list(p) for p in pairs],
            "polaron_shift": {str(k): v for k, v in sorted(table.polaron_shift.items())}}
    values = np.array([table.entries[p] for p in pairs], dtype=complex).reshape(len(pairs), table.n_c)
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8),
                 values=values)
    return path


def load_kernel_table(path) -> MemoryKernelTable:
    with np.load(Path(path)) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        values = data["values"]
    if meta.get("version") != KERNEL_FORMAT_VERSION:
        raise ConfigurationError(f"kernel cache {path} has unsupported version {meta.get('version')}")
    entries = {tuple(p): values[i] for i, p in enumerate(meta["pairs"])}
    shifts = {int(k): v for k, v in meta["polaron_shift"].items()}
    return MemoryKernelTable(meta["n_c"], meta["dt"], meta["temperature"], entries, shifts,
                             meta["residual"], meta["key"])


def cached_kernel_table(sd, dt, n_c, temperature, cache_dir=None):
    """Load the table from ``cache_dir`` (or ``$LINDPATH_CACHE_DIR``) or compute and store it."""
    cache_dir = cache_dir or os.environ.get(CACHE_ENV_VAR)
    if not cache_dir:
        return compute_kernel_table(sd, dt, n_c, temperature)
    key = kernel_cache_key(sd, dt, n_c, temperature)
    path = Path(cache_dir) / f"kernel-{key[:16]}.npz"
    if path.exists():
        table = load_kernel_table(path)
        if table.key == key:
            return table
    table = compute_kernel_table(sd, dt, n_c, temperature)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_kernel_table(table, path)
    return table
