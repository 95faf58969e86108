"""Path-integral propagation of few-level systems coupled to a pure-dephasing
oscillator bath, with local-in-time Lindblad relaxation folded into every
time step."""

__version__ = "0.1.0"

from .liouville import (HBAR, DensityMatrix, HamiltonianSpec, LindbladChannel, Superoperator,
                        apply, build_liouvillian, build_step_propagator, propagator_element)
from .bath import (GaAsDeformation, MemoryKernelTable, PowerLawCutoff, Tabulated,
                   ZeroSpectralDensity, compute_kernel_table, evaluate_spectral_density,
                   memory_time_estimate, polaron_shift)
from .influence import InfluenceTable, build_influence_table, truncated_action
from .adm import (AugmentedDensityMatrix, SimulationConfig, SystemModel, initialize, reduce,
                  run, step)
from .timeseries import TimeSeries

__all__ = [
    "HBAR", "DensityMatrix", "HamiltonianSpec", "LindbladChannel", "Superoperator", "apply",
    "build_liouvillian", "build_step_propagator", "propagator_element",
    "GaAsDeformation", "MemoryKernelTable", "PowerLawCutoff", "Tabulated", "ZeroSpectralDensity",
    "compute_kernel_table", "evaluate_spectral_density", "memory_time_estimate", "polaron_shift",
    "InfluenceTable", "build_influence_table", "truncated_action",
    "AugmentedDensityMatrix", "SimulationConfig", "SystemModel", "initialize", "reduce", "run",
    "step", "TimeSeries",
]
