"""Tensor propagation against an explicit sum over every path."""
import numpy as np

from lindpath import DensityMatrix, SimulationConfig, run
from lindpath.adm import influence_for, step_propagators
from lindpath.models import DrivenDotModel, build_driven_dot
from lindpath.oracles import full_path_sum

model = build_driven_dot(DrivenDotModel(1.0, 1.0, 0.05, 100.0))

# while the path is shorter than the memory depth both routes keep every term
for n in (1, 2, 3, 4):
    cfg = SimulationConfig(0.5, n, 4, DensityMatrix.pure(2, 0))
    tensor = run(cfg, model).states[-1]
    _, inf = influence_for(model, cfg)
    props, _ = step_propagators(model, cfg)
    paths = full_path_sum(n, props, inf, cfg.initial_state).entries
    print(f"{n} steps   max relative deviation {np.max(np.abs(tensor - paths) / np.abs(paths)):.1e}")
