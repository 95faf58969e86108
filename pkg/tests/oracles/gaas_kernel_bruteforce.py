"""Brute-force memory kernels for GaAs at dt = 0.5 ps, n_c = 8, T = 1 K and 100 K.

Fixed trapezoid rule with 10^6 + 1 points on [0, w_max], where w_max is the
frequency at which both Gaussian form factors have fallen below 1e-20. The
integrands vanish like w^2 or faster at the origin and are negligible at
w_max, so the rule converges far faster than its nominal order. Shares no
code with the package.

    python tests/oracles/gaas_kernel_bruteforce.py
"""
import json
from pathlib import Path

import numpy as np

HBAR = 6.62607015e-34 / (2 * np.pi)
EV = 1.602176634e-19
KB = 1.380649e-23
RHO, C = 5370.0, 5110.0
DE, DH = 7.0 * EV, -3.5 * EV
AE = 4.0e-9
AH = AE / 1.15

DT, N_C = 0.5, 8
N_POINTS = 1_000_000


def spectral_density(w):
    ws = w * 1e12
    form = DE * np.exp(-(ws * AE / (2 * C)) ** 2) - DH * np.exp(-(ws * AH / (2 * C)) ** 2)
    return ws**3 * form**2 / (4 * np.pi**2 * RHO * HBAR * C**5) / 1e12


def w_max():
    # exp(-(w a / 2c)^2) = 1e-20 for the slower-decaying (smaller) radius
    return 2 * C / min(AE, AH) * np.sqrt(20 * np.log(10)) / 1e12


def kernels(temperature):
    w = np.linspace(0.0, w_max(), N_POINTS + 1)[1:]
    h = w[1] - w[0]
    J = spectral_density(w)
    coth = 1.0 / np.tanh(HBAR * w * 1e12 / (2 * KB * temperature))
    one_minus_cos = 1.0 - np.cos(w * DT)
    out = []
    for lag in range(N_C):
        if lag == 0:
            f = J / w**2 * (coth * one_minus_cos + 1j * (np.sin(w * DT) - w * DT))
        else:
            tau = lag * DT
            f = 2 * J / w**2 * one_minus_cos * (coth * np.cos(w * tau) - 1j * np.sin(w * tau))
        # integrand is 0 at w = 0; trapezoid weights h/2 at the far end
        out.append(h * (f.sum() - 0.5 * f[-1]))
    return out


def main():
    data = {"dt": DT, "n_c": N_C, "n_points": N_POINTS, "w_max": w_max(), "tables": {}}
    for T in (1.0, 100.0):
        data["tables"][str(T)] = [[k.real, k.imag] for k in kernels(T)]
    path = Path(__file__).resolve().parents[1] / "data" / "gaas_kernels_dt0.5_nc8.json"
    path.write_text(json.dumps(data, indent=2) + "\n")
    print(json.dumps(data, indent=2))


if __name__ == "__main__":
    main()
