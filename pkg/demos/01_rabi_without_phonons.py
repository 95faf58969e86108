"""Driven dot without phonons: path-integral engine against a direct ODE solve."""
import numpy as np

from lindpath import DensityMatrix, SimulationConfig, run
from lindpath.models import EXCITON, DrivenDotModel, build_driven_dot, stationary_occupation_no_phonons
from lindpath.oracles import lindblad_ode_solve

# resonant drive, f = 1/ps, weak radiative decay
model = build_driven_dot(DrivenDotModel(field_strength=1.0, radiative_rate=0.05, phonons=False))
ts = run(SimulationConfig(dt=0.01, n_steps=5000, n_c=1, initial_state=DensityMatrix.pure(2, 0)), model)
pop = ts.population(EXCITON)

for t in (0.0, np.pi, 2 * np.pi, 10.0, 50.0):
    i = int(round(t / 0.01))
    print(f"t = {ts.times[i]:6.2f} ps   occupation = {pop[i]:.4f}")

# same model, independent integrator
ref = lindblad_ode_solve(model.hamiltonian, model.channels, DensityMatrix.pure(2, 0), ts.times)
print("max deviation from ODE:", np.max(np.abs(pop - ref.population(EXCITON))))

# long runs settle on the closed-form steady state
long = run(SimulationConfig(0.1, 20000, 1, DensityMatrix.pure(2, 0)), model)
print("long-time mean:", long.long_time_mean(EXCITON),
      "closed form:", stationary_occupation_no_phonons(1.0, 0.05, 0.0))
