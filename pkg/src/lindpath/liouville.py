"""Dense Liouville-space algebra for few-level systems.

Units: energies in meV, times in ps, rates in 1/ps.

Vectorization convention
------------------------
Operators are stacked column by column (column-major, Fortran order)::

    vec(X)[i + j * N] = X[i, j]

so that ``vec(A X B) = kron(B.T, A) @ vec(X)``. A superoperator matrix ``S``
therefore maps the basis operator ``|a><b|`` (column ``a + b*N``) onto the
matrix element ``<c|S[|a><b|]|d>`` stored at row ``c + d*N``. The same
combined index ``p = nu + mu * N`` labels ket/bra pairs throughout the
path-integral engine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import math

import numpy as np
from scipy.linalg import expm

from .errors import ConfigurationError, ValidationError

# Exact SI values of h and e; hbar = 0.6582119570 meV ps.
PLANCK_SI = 6.62607015e-34
ELEMENTARY_CHARGE = 1.602176634e-19
#: Reduced Planck constant in meV ps.
HBAR = PLANCK_SI / (2.0 * math.pi) / ELEMENTARY_CHARGE * 1e15

RateLike = Union[float, Callable[[float], float]]


def vec(X):
    """Column-major vectorization of a square matrix."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape((dim, dim), order="F")


def pair_index(nu, mu, dim):
    """Combined ket/bra index ``nu + mu * dim`` matching :func:`vec`."""
    return nu + mu * dim


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix of the few-level system.

    ``hermitian_correction`` is the size of the anti-Hermitian part removed
    by :func:`apply` (zero for matrices built directly).
    """

    entries: np.ndarray
    hermitian_correction: float = 0.0

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def pure(cls, dim, index):
        rho = np.zeros((dim, dim), dtype=complex)
        rho[index, index] = 1.0
        return cls(rho)

    @classmethod
    def from_state(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self):
        return self.entries.shape[0]

    def trace(self):
        return complex(np.trace(self.entries))

    def populations(self):
        return self.entries.diagonal().real.copy()

    def validate(self, trace_tol=1e-9, herm_tol=1e-12, psd_tol=1e-9):
        """Raise ``ValidationError`` if the matrix is not a physical state."""
        rho = self.entries
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > herm_tol:
            raise ValidationError(f"density matrix not Hermitian (deviation {herm:.3e})")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValidationError(f"density matrix trace {self.trace():.12g} differs from 1")
        lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if lam.min() < -psd_tol:
            raise ValidationError(f"density matrix has negative eigenvalue {lam.min():.3e}")
        return self


@dataclass(frozen=True)
class HamiltonianSpec:
    """Time-dependent Hermitian Hamiltonian ``matrix_fn(t)`` in meV (t in ps)."""

    dim: int
    matrix_fn: Callable[[float], np.ndarray]
    constant: bool = False

    @classmethod
    def static(cls, matrix):
        H = np.array(matrix, dtype=complex)
        H.setflags(write=False)
        return cls(H.shape[0], lambda t: H, constant=True)

    def __call__(self, t):
        H = np.asarray(self.matrix_fn(t), dtype=complex)
        if H.shape != (self.dim, self.dim):
            raise ConfigurationError(
                f"Hamiltonian at t={t} has shape {H.shape}, expected {(self.dim, self.dim)}")
        if not np.allclose(H, H.conj().T, rtol=0.0, atol=1e-12):
            raise ValidationError(f"Hamiltonian at t={t} is not Hermitian")
        return H


@dataclass(frozen=True)
class LindbladChannel:
    """Dissipator ``rate(t) (A rho A^+ - {A^+A, rho}/2)`` with rate in 1/ps."""

    operator: np.ndarray
    rate: RateLike = 0.0

    def __post_init__(self):
        A = np.array(self.operator, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ConfigurationError(f"Lindblad operator must be square, got {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "operator", A)

    @property
    def dim(self):
        return self.operator.shape[0]

    @property
    def constant(self):
        return not callable(self.rate)

    def rate_at(self, t):
        g = float(self.rate(t)) if callable(self.rate) else float(self.rate)
        if g < 0 or not np.isfinite(g):
            raise ValidationError(f"Lindblad rate at t={t} is {g}, must be finite and >= 0")
        return g


@dataclass(frozen=True)
class Superoperator:
    """Linear map on column-vectorized ``dim x dim`` operators."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        S = np.array(self.matrix, dtype=complex)
        n = self.dim * self.dim
        if S.shape != (n, n):
            raise ConfigurationError(f"superoperator for dim {self.dim} must be {n}x{n}, got {S.shape}")
        S.setflags(write=False)
        object.__setattr__(self, "matrix", S)

    @classmethod
    def identity(cls, dim):
        return cls(dim, np.eye(dim * dim))

    def __matmul__(self, other):
        if not isinstance(other, Superoperator) or other.dim != self.dim:
            return NotImplemented
        return Superoperator(self.dim, self.matrix @ other.matrix)


def commutator_superop(H):
    """Matrix of ``X -> H X - X H``."""
    H = np.asarray(H, dtype=complex)
    eye = np.eye(H.shape[0])
    return np.kron(eye, H) - np.kron(H.T, eye)


def dissipator_superop(A):
    """Matrix of ``X -> A X A^+ - (A^+A X + X A^+A) / 2``."""
    A = np.asarray(A, dtype=complex)
    eye = np.eye(A.shape[0])
    AdA = A.conj().T @ A
    return np.kron(A.conj(), A) - 0.5 * np.kron(eye, AdA) - 0.5 * np.kron(AdA.T, eye)


def build_liouvillian(h: HamiltonianSpec, channels: Sequence[LindbladChannel], t: float,
                      extra: Callable[[float], np.ndarray] | None = None) -> Superoperator:
    """Generator ``L(t)[X] = [H(t), X]/(i hbar) + sum_i g_i(t) D[A_i](X)`` in 1/ps.

    ``extra`` optionally adds a raw ``N^2 x N^2`` generator matrix (same
    vectorization); only trace preservation is expected of it.
    """
    for ch in channels:
        if ch.dim != h.dim:
            raise ConfigurationError(
                f"Lindblad operator dimension {ch.dim} does not match Hamiltonian dimension {h.dim}")
    L = commutator_superop(h(t)) / (1j * HBAR)
    for ch in channels:
        g = ch.rate_at(t)
        if g:
            L = L + g * dissipator_superop(ch.operator)
    if extra is not None:
        L = L + np.asarray(extra(t), dtype=complex)
    return Superoperator(h.dim, L)


def build_step_propagator(h: HamiltonianSpec, channels: Sequence[LindbladChannel], t: float,
                          dt: float, extra=None) -> Superoperator:
    """Propagator over ``[t, t + dt]`` as ``expm(dt * L(t + dt/2))``.

    The generator is sampled once at the step midpoint; the exponential is
    exact (scaling and squaring with Pade approximant), so trace
    preservation and complete positivity hold to machine precision.
    """
    if not dt > 0:
        raise ValidationError(f"time step must be positive, got {dt}")
    L = build_liouvillian(h, channels, t + 0.5 * dt, extra=extra)
    return Superoperator(h.dim, expm(dt * L.matrix))


def apply(superop: Superoperator, rho: DensityMatrix) -> DensityMatrix:
    """Apply ``superop`` to ``rho`` and re-Hermitize the result."""
    if superop.dim != rho.dim:
        raise ConfigurationError(f"superoperator dim {superop.dim} != density matrix dim {rho.dim}")
    out = unvec(superop.matrix @ vec(rho.entries), rho.dim)
    herm = 0.5 * (out + out.conj().T)
    return DensityMatrix(herm, hermitian_correction=float(np.max(np.abs(out - herm))))


def propagator_element(superop: Superoperator, nu_out, mu_out, nu_in, mu_in):
    """``<nu_out| M[|nu_in><mu_in|] |mu_out>``."""
    n = superop.dim
    for idx in (nu_out, mu_out, nu_in, mu_in):
        if not 0 <= idx < n:
            raise IndexError(f"state index {idx} out of range for dimension {n}")
    return complex(superop.matrix[pair_index(nu_out, mu_out, n), pair_index(nu_in, mu_in, n)])


def trace_defect(superop: Superoperator):
    """Largest ``|Tr M[E_ab] - delta_ab|`` over basis operators."""
    n = superop.dim
    diag_rows = [pair_index(k, k, n) for k in range(n)]
    traces = superop.matrix[diag_rows, :].sum(axis=0)
    return float(np.max(np.abs(traces - vec(np.eye(n)))))
