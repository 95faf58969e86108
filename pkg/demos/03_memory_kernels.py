"""Memory kernels of the GaAs deformation-potential bath and how far back they reach."""
import tempfile

import numpy as np

from lindpath import GaAsDeformation, compute_kernel_table, evaluate_spectral_density, memory_time_estimate
from lindpath.bath import cached_kernel_table, polaron_shift

sd = GaAsDeformation()
omega = np.linspace(0.0, 10.0, 6)
print("J(omega) at omega = 0, 2, ..., 10 /ps:", evaluate_spectral_density(sd, omega))
print("polaron shift (meV):", polaron_shift(sd))

# kernels decay within a few ps, faster when hot
for T in (1.0, 10.0, 100.0):
    table = compute_kernel_table(sd, dt=0.5, n_c=12, temperature=T)
    k = table.entries[(1, 1)]
    print(f"T = {T:5.1f} K   |K| by lag:", np.array2string(np.abs(k), precision=2),
          "  suggested n_c:", memory_time_estimate(table, 1e-3))

# the imaginary part at nonzero lag does not depend on temperature
cold = compute_kernel_table(sd, 0.5, 6, 1.0).entries[(1, 1)]
hot = compute_kernel_table(sd, 0.5, 6, 100.0).entries[(1, 1)]
print("Im K spread over T:", np.max(np.abs(cold[1:].imag - hot[1:].imag)))

# tables are cached on disk by content hash
with tempfile.TemporaryDirectory() as cache:
    first = cached_kernel_table(sd, 0.5, 6, 100.0, cache_dir=cache)
    again = cached_kernel_table(sd, 0.5, 6, 100.0, cache_dir=cache)
    print("cache hit equal:", all(np.array_equal(first.entries[p], again.entries[p]) for p in first.entries))
