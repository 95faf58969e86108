"""Reference solutions that share no propagation code with the ADM engine.

* :func:`full_path_sum` enumerates every ket/bra path of ``n`` steps
  literally, without memory truncation.
* :func:`lindblad_ode_solve` integrates the phonon-free master equation with
  classic fixed-step RK4 on the generator itself (no matrix exponential).
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import ValidationError
from .influence import InfluenceTable, truncated_action
from .liouville import HBAR, DensityMatrix, propagator_element
from .timeseries import TimeSeries

PATH_LIMIT = 10**8


def _paths(n_states, n, order):
    pairs = [(nu, mu) for nu in range(n_states) for mu in range(n_states)]
    paths = itertools.product(pairs, repeat=n + 1)
    if order == "reversed":
        paths = itertools.product(pairs[::-1], repeat=n + 1)
    elif order == "shuffled":
        paths = list(paths)
        np.random.default_rng(12345).shuffle(paths)
    return paths


def full_path_sum(n, propagators, influence: InfluenceTable, initial: DensityMatrix,
                  order="lexicographic") -> DensityMatrix:
    """Reduced density matrix after ``n`` steps by explicit path enumeration.

    ``propagators[l - 1]`` maps step ``l - 1`` to ``l``. Every path
    ``(nu_0, mu_0), ..., (nu_n, mu_n)`` contributes::

        rho0[nu_0, mu_0] * exp(S[(nu_1, mu_1) ... (nu_n, mu_n)]) * prod_l M_l

    Contributions are accumulated with ``math.fsum`` (exactly rounded).
    ``order`` permutes the enumeration for self-consistency checks.
    """
    N = initial.dim
    if N ** (2 * n) > PATH_LIMIT:
        raise ValidationError(f"{N}^(2*{n}) paths exceed the enumeration limit {PATH_LIMIT}")
    if len(propagators) < n:
        raise ValidationError(f"need {n} propagators, got {len(propagators)}")
    if influence.dim != N:
        raise ValidationError("influence table dimension does not match the initial state")
    rho0 = initial.entries
    re_terms = {(a, b): [] for a in range(N) for b in range(N)}
    im_terms = {(a, b): [] for a in range(N) for b in range(N)}
    for path in _paths(N, n, order):
        w = rho0[path[0]]
        if w == 0:
            continue
        for l in range(1, n + 1):
            w *= propagator_element(propagators[l - 1], path[l][0], path[l][1],
                                    path[l - 1][0], path[l - 1][1])
            if w == 0:
                break
        if w == 0:
            continue
        if n > 0:
            w *= np.exp(truncated_action(path[1:], influence))
        re_terms[path[-1]].append(w.real)
        im_terms[path[-1]].append(w.imag)
    out = np.zeros((N, N), dtype=complex)
    for key in re_terms:
        out[key] = complex(math.fsum(re_terms[key]), math.fsum(im_terms[key]))
    return DensityMatrix(out)


def _generator(H, ops, rates):
    """Row-major matrix ``G`` with ``flat(d rho/dt) = G @ flat(rho)``."""
    n = H.shape[0]
    eye = np.eye(n)
    G = (np.kron(H, eye) - np.kron(eye, H.T)) / (1j * HBAR)
    for A, g in zip(ops, rates):
        if g:
            AdA = A.conj().T @ A
            G += g * (np.kron(A, A.conj()) - 0.5 * (np.kron(AdA, eye) + np.kron(eye, AdA.T)))
    return G


def lindblad_ode_solve(h, channels, initial: DensityMatrix, t_grid, substeps=10) -> TimeSeries:
    """Classic RK4 for ``d rho/dt = [H, rho]/(i hbar) + sum_i g_i D[A_i] rho``.

    Each interval of ``t_grid`` is split into ``substeps >= 10`` equal RK4
    steps. The generator is assembled as a row-major matrix and applied to
    the flattened state.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if substeps < 10:
        raise ValidationError("the ODE reference needs at least 10 substeps per output interval")
    if t_grid.ndim != 1 or t_grid.size == 0 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be strictly increasing")
    ops = [np.asarray(c.operator, dtype=complex) for c in channels]
    frozen = h.constant and all(c.constant for c in channels)
    G0 = _generator(h(0.0), ops, [c.rate_at(0.0) for c in channels]) if frozen else None

    def gen(t):
        return G0 if frozen else _generator(h(t), ops, [c.rate_at(t) for c in channels])

    n = initial.dim
    x = initial.entries.reshape(-1).astype(complex)
    states = [initial.entries.copy()]
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        hstep = (t1 - t0) / substeps
        for s in range(substeps):
            t = t0 + s * hstep
            g_start, g_mid, g_end = gen(t), gen(t + 0.5 * hstep), gen(t + hstep)
            k1 = g_start @ x
            k2 = g_mid @ (x + 0.5 * hstep * k1)
            k3 = g_mid @ (x + 0.5 * hstep * k2)
            k4 = g_end @ (x + hstep * k3)
            x = x + hstep / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        states.append(x.reshape(n, n).copy())
    return TimeSeries(t_grid, np.array(states))
