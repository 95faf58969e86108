"""Augmented-density-matrix iteration of the truncated path sum.

The augmented density matrix (ADM) after step ``n`` is a tensor of path
weights ``W[p_n, p_{n-1}, ..., p_{n-d+1}]`` over the ``d = min(n, n_c)`` most
recent ket/bra pairs ``p = nu + mu * N``, newest pair on axis 0. One step::

    W'[p_n, ..., p_{n-n_c+1}] = G[p_n, ..., p_{n-n_c+1}]
        * sum_{p_{n-n_c}} M[p_n, p_{n-1}] W[p_{n-1}, ..., p_{n-n_c}]

where ``M`` is the system propagator of the step and
``G = prod_k F_k[p_n, p_{n-k}]`` collects the influence factors of all lags
``k < n_c`` ending at the new step. Before depth ``n_c`` is reached the
tensor grows by one axis per step and nothing is summed. The initial pair
``p_0`` never enters the influence functional and is summed at step 1.

Only ket/bra pairs reachable from the initial state through non-zero
propagator elements are stored; the others carry exactly zero weight.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .bath import SpectralDensity, cached_kernel_table
from .errors import ConfigurationError, DegeneracyError, MemoryBudgetError, ValidationError
from .influence import InfluenceTable, build_influence_table
from .liouville import (DensityMatrix, HamiltonianSpec, LindbladChannel, Superoperator, apply,
                        build_step_propagator)
from .timeseries import TimeSeries

log = logging.getLogger(__name__)

TRACE_POLICIES = ("monitor_only", "renormalize_each_step")
SPLITTINGS = ("lie", "symmetric")
MAX_MEMORY_DEPTH = 14
DEFAULT_MEMORY_BUDGET = 2 * 1024**3
# weights, factor tensor, fused step tensor and one temporary of the same size
_BUFFERS_PER_STEP = 4


class SystemModel(NamedTuple):
    """Everything the engine needs to know about the physics."""

    hamiltonian: HamiltonianSpec
    channels: Sequence[LindbladChannel] = ()
    spectral_density: SpectralDensity | None = None
    temperature: float = 0.0
    name: str = "custom"
    info: dict = {}


@dataclass(frozen=True)
class SimulationConfig:
    dt: float
    n_steps: int
    n_c: int
    initial_state: DensityMatrix
    trace_policy: str = "monitor_only"
    record: tuple | None = None
    t0: float = 0.0
    max_n_c: int = MAX_MEMORY_DEPTH
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    splitting: str = "lie"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise ValidationError(f"n_steps must be a non-negative integer, got {self.n_steps}")
        if int(self.n_c) != self.n_c or not 1 <= self.n_c <= self.max_n_c:
            raise ValidationError(f"n_c must be an integer in [1, {self.max_n_c}], got {self.n_c}")
        if self.trace_policy not in TRACE_POLICIES:
            raise ValidationError(f"trace_policy must be one of {TRACE_POLICIES}")
        if self.splitting not in SPLITTINGS:
            raise ValidationError(f"splitting must be one of {SPLITTINGS}")
        if not isinstance(self.initial_state, DensityMatrix):
            raise ValidationError("initial_state must be a DensityMatrix")
        self.initial_state.validate()


@dataclass(frozen=True)
class AugmentedDensityMatrix:
    """Path weights over retained history; see module docstring for layout.

    ``pairs`` lists the stored combined pair indices; every tensor axis runs
    over them. A depth-0 ADM holds the initial state as a vector over ``p_0``.
    """

    dim: int
    pairs: np.ndarray
    weights: np.ndarray = field(repr=False)
    depth: int = 0

    @property
    def n_pairs(self):
        return len(self.pairs)

    def weight(self, *pair_history):
        """Weight for ``(nu, mu)`` tuples, newest first (for inspection)."""
        pos = {int(p): i for i, p in enumerate(self.pairs)}
        idx = []
        for nu, mu in pair_history:
            p = nu + mu * self.dim
            if p not in pos:
                return 0j
            idx.append(pos[p])
        return complex(self.weights[tuple(idx)])


def initialize(config: SimulationConfig, pairs=None) -> AugmentedDensityMatrix:
    """Depth-0 ADM holding ``config.initial_state``."""
    rho = config.initial_state
    n = rho.dim
    full = rho.entries.reshape(-1, order="F")
    if pairs is None:
        pairs = np.arange(n * n)
    pairs = np.asarray(pairs, dtype=np.intp)
    missing = np.setdiff1d(np.flatnonzero(full), pairs)
    if missing.size:
        raise ConfigurationError("initial state has weight outside the retained pair set")
    return AugmentedDensityMatrix(n, pairs, full[pairs].copy(), 0)


def reachable_pairs(initial: DensityMatrix, propagators) -> np.ndarray:
    """Pairs reachable from the initial support through non-zero propagator entries."""
    n2 = initial.dim**2
    pattern = np.zeros((n2, n2), dtype=bool)
    for M in propagators:
        pattern |= np.asarray(M.matrix if isinstance(M, Superoperator) else M) != 0
    reach = initial.entries.reshape(-1, order="F") != 0
    while True:
        new = reach | pattern[:, reach].any(axis=1)
        if np.array_equal(new, reach):
            return np.flatnonzero(reach)
        reach = new


def factor_tensor(influence: InfluenceTable, pairs, depth) -> np.ndarray:
    """``G[p_n, ..., p_{n-depth+1}] = F_0[p_n, p_n] prod_{k>=1} F_k[p_n, p_{n-k}]``."""
    if depth > influence.n_c:
        raise ConfigurationError(f"influence table of depth {influence.n_c} has no lag {depth - 1}")
    pairs = np.asarray(pairs)
    P = len(pairs)
    G = np.ones((P,) * depth, dtype=complex)
    f0 = influence.pair_matrix(0)[pairs, pairs]
    G *= f0.reshape((P,) + (1,) * (depth - 1))
    for k in range(1, depth):
        fk = influence.pair_matrix(k)[np.ix_(pairs, pairs)]
        shape = [1] * depth
        shape[0] = shape[k] = P
        G *= fk.reshape(shape)
    return G


def fused_step_tensor(factors: np.ndarray, propagator, pairs) -> np.ndarray:
    """``factors * M[p_n, p_{n-1}]`` broadcast over the older axes, for constant propagators."""
    M = propagator.matrix if isinstance(propagator, Superoperator) else np.asarray(propagator)
    P = len(pairs)
    Msub = M[np.ix_(pairs, pairs)]
    return factors * Msub.reshape((P, P) + (1,) * (factors.ndim - 2))


def step(adm: AugmentedDensityMatrix, propagator, influence: InfluenceTable,
         factors: np.ndarray | None = None, fused: np.ndarray | None = None,
         out: np.ndarray | None = None) -> AugmentedDensityMatrix:
    """Advance the ADM by one time step.

    ``propagator`` is the step's ``Superoperator`` (or its matrix) over all
    pairs; ``factors`` may supply the precomputed :func:`factor_tensor` for
    the new depth. At full depth ``fused`` may supply
    :func:`fused_step_tensor` instead, which saves one pass over the tensor,
    and ``out`` a preallocated result buffer (must not alias the weights).
    """
    P = adm.n_pairs
    n_c = influence.n_c
    W, d = adm.weights, adm.depth
    if fused is not None and d == n_c >= 2:
        summed = W.reshape(-1, P).sum(axis=1)
        if out is None:
            out = np.empty_like(fused)
        np.multiply(fused.reshape(P, -1), summed.reshape(1, -1), out=out.reshape(P, -1))
        return AugmentedDensityMatrix(adm.dim, adm.pairs, out, n_c)
    M = propagator.matrix if isinstance(propagator, Superoperator) else np.asarray(propagator)
    Msub = M[np.ix_(adm.pairs, adm.pairs)]
    if d == 0:
        new, new_depth = Msub @ W, 1
    elif d == n_c == 1:
        new, new_depth = Msub @ W, 1
    else:
        if d == n_c:
            # drop the oldest pair: it no longer enters any retained influence term
            W = W.reshape(-1, P).sum(axis=1)
            d -= 1
        new = Msub[:, :, None] * W.reshape(P, -1)[None, :, :]
        new_depth = d + 1
        new = new.reshape((P,) * new_depth)
    if factors is None:
        factors = factor_tensor(influence, adm.pairs, new_depth)
    new *= factors
    return AugmentedDensityMatrix(adm.dim, adm.pairs, new, new_depth)


def reduce(adm: AugmentedDensityMatrix) -> DensityMatrix:
    """Reduced density matrix: sum over all but the newest pair."""
    W = adm.weights
    vecw = W if W.ndim == 1 else W.reshape(adm.n_pairs, -1).sum(axis=1)
    full = np.zeros(adm.dim**2, dtype=complex)
    full[adm.pairs] = vecw
    rho = full.reshape((adm.dim, adm.dim), order="F")
    tr = np.trace(rho)
    if abs(tr) < 1e-6:
        raise DegeneracyError(f"reduced density matrix trace collapsed to {tr:.3e}")
    return DensityMatrix(rho)


def estimate_memory(n_pairs, n_c):
    return 16 * _BUFFERS_PER_STEP * n_pairs**n_c


def step_propagators(model: SystemModel, config: SimulationConfig):
    """System propagators feeding the ADM and the per-step readout maps.

    ``lie``: step ``k`` applies ``M`` over ``[t_{k-1}, t_k]`` before the bath
    interval; readout is the identity. ``symmetric``: the system evolution
    is centred between bath intervals (half step first, full steps over
    ``[t_k - dt/2, t_k + dt/2]``) and the reduced state is read out after a
    final half step, which acts on the system only.
    """
    h, ch = model.hamiltonian, list(model.channels)
    dt, t0, n = config.dt, config.t0, config.n_steps
    constant = h.constant and all(c.constant for c in ch)
    if config.splitting == "lie":
        if constant:
            return [build_step_propagator(h, ch, t0, dt)] * n, None
        return [build_step_propagator(h, ch, t0 + k * dt, dt) for k in range(n)], None
    if n == 0:
        return [], []
    first = build_step_propagator(h, ch, t0, 0.5 * dt)
    if constant:
        full = build_step_propagator(h, ch, t0, dt)
        half = build_step_propagator(h, ch, t0, 0.5 * dt)
        return [first] + [full] * (n - 1), [half] * n
    props = [first] + [build_step_propagator(h, ch, t0 + (k - 0.5) * dt, dt) for k in range(1, n)]
    readout = [build_step_propagator(h, ch, t0 + (k - 0.5) * dt, 0.5 * dt) for k in range(1, n + 1)]
    return props, readout


def influence_for(model: SystemModel, config: SimulationConfig, cache_dir=None):
    """Kernel table and influence table for the model (``None, None`` if uncoupled)."""
    sd = model.spectral_density
    if sd is None or not sd.active_pairs:
        return None, None
    table = cached_kernel_table(sd, config.dt, config.n_c, model.temperature, cache_dir)
    return table, build_influence_table(table, model.hamiltonian.dim)


def run(config: SimulationConfig, model: SystemModel, cache_dir=None, influence=None) -> TimeSeries:
    """Propagate ``config.initial_state`` and return the reduced trajectory.

    ``influence`` overrides the table derived from the model's bath.
    Diagnostics include the trace drift per step, renormalization factors,
    peak tensor memory and mean wall time per step.
    """
    N = model.hamiltonian.dim
    if config.initial_state.dim != N:
        raise ConfigurationError(
            f"initial state dimension {config.initial_state.dim} != Hamiltonian dimension {N}")
    for c in model.channels:
        if c.dim != N:
            raise ConfigurationError(f"Lindblad operator dimension {c.dim} != {N}")

    kernel_key = None
    if influence is None:
        table, influence = influence_for(model, config, cache_dir)
        kernel_key = table.key if table is not None else None
    elif influence.dim != N:
        raise ConfigurationError("influence table dimension does not match the model")
    if influence is None or influence.is_trivial():
        # all factors are 1: no memory to carry
        influence = InfluenceTable(1, N, np.zeros((1,) + (N,) * 4), np.ones((1,) + (N,) * 4))
    elif influence.n_c != config.n_c:
        raise ConfigurationError(f"influence depth {influence.n_c} != configured n_c {config.n_c}")
    n_c = influence.n_c

    props, readout = step_propagators(model, config)
    pairs = reachable_pairs(config.initial_state, props)
    need = estimate_memory(len(pairs), n_c)
    if need > config.memory_budget:
        raise MemoryBudgetError(
            f"n_c={n_c} with {len(pairs)} active pairs needs ~{need / 2**20:.0f} MiB, "
            f"budget is {config.memory_budget / 2**20:.0f} MiB")

    factors = {}
    fused = None
    constant = len(props) > 1 and all(M is props[0] for M in props)
    adm = initialize(config, pairs)
    times = config.t0 + config.dt * np.arange(config.n_steps + 1)
    states = np.empty((config.n_steps + 1, N, N), dtype=complex)
    states[0] = config.initial_state.entries
    drift = np.zeros(config.n_steps + 1)
    renorm = []
    peak = adm.weights.nbytes
    t_start = time.perf_counter()
    for k, M in enumerate(props, start=1):
        depth = min(adm.depth + 1, n_c)
        if depth not in factors:
            factors[depth] = factor_tensor(influence, pairs, depth)
            if constant and depth == n_c >= 2:
                fused = fused_step_tensor(factors[depth], M, pairs)
                buffers = [np.empty_like(fused), np.empty_like(fused)]
        spare = None
        if fused is not None:
            # ping-pong: write into whichever buffer does not hold the current weights
            spare = buffers[1] if adm.weights is buffers[0] else buffers[0]
        adm = step(adm, M, influence, factors[depth], fused, spare)
        rho = reduce(adm)
        if readout is not None:
            rho = apply(readout[k - 1], rho)
        tr = rho.trace()
        drift[k] = abs(tr - 1.0)
        if config.trace_policy == "renormalize_each_step":
            np.divide(adm.weights, tr, out=adm.weights)   # step() never aliases its inputs
            rho = DensityMatrix(rho.entries / tr)
            renorm.append(tr)
            log.debug("step %d: renormalized by %r", k, tr)
        states[k] = rho.entries
        peak = max(peak, adm.weights.nbytes + factors[depth].nbytes)
    wall = time.perf_counter() - t_start

    diagnostics = {
        "trace_drift": drift,
        "renormalization_factors": np.array(renorm, dtype=complex),
        "peak_tensor_bytes": int(peak),
        "wall_time_per_step": wall / max(1, config.n_steps),
        "active_pairs": pairs.tolist(),
        "effective_n_c": n_c,
        "kernel_key": kernel_key,
    }
    return TimeSeries(times, states, diagnostics)
