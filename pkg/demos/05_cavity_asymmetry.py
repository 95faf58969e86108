"""Exciton decay into a lossy cavity: detuning sign matters when cold, much less when hot."""
import numpy as np
from scipy.optimize import curve_fit

from lindpath import run
from lindpath.config import preset
from lindpath.models import CAV_X


def decay_time(cfg):
    model, sim = cfg.build()
    ts = run(sim, model)
    (_, tau), _ = curve_fit(lambda t, a, tau: a * np.exp(-t / tau), ts.times,
                            ts.population(CAV_X), p0=(1.0, 50.0))
    return tau


for name in ("fig4-T1K", "fig4-T100K"):
    base = preset(name)
    print(name, "coupling (meV):", base.physics["coupling_mev"])
    for delta in (1.0, -1.0):
        print(f"   detuning {delta:+.0f} meV   decay time {decay_time(base.with_value('detuning', delta)):8.1f} ps")
