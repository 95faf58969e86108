"""Occupation against field strength at 1 K, 1 meV detuning: rise, then a dip."""
import numpy as np

from lindpath import run
from lindpath.config import preset
from lindpath.models import EXCITON

cfg = preset("fig2c")
fields = cfg.sweep["values"]
occupation = []
for f in fields:
    model, sim = cfg.with_value("field_strength", f).build()
    occupation.append(run(sim, model).long_time_mean(EXCITON))
    print(f"f = {f:4.1f}/ps   occupation = {occupation[-1]:.4f}")

# strongest phonon-assisted preparation at intermediate fields
best = int(np.argmax(occupation))
print("maximum at f =", fields[best])
