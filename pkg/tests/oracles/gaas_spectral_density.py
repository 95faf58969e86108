"""Independent 40-digit evaluation of the GaAs LA-phonon spectral density.

Writes ``tests/data/gaas_spectral_density.json`` with J at w = 1 / ps, the
location and height of the maximum and the polaron shift ``-hbar int J/w``
in meV. Shares no code with the package.

    python tests/oracles/gaas_spectral_density.py
"""
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

HBAR = mp.mpf("6.62607015e-34") / (2 * mp.pi)
EV = mp.mpf("1.602176634e-19")
RHO = mp.mpf(5370)
C = mp.mpf(5110)
DE, DH = 7 * EV, mp.mpf("-3.5") * EV
AE = mp.mpf("4.0e-9")
AH = AE / mp.mpf("1.15")


def j_per_ps(w_per_ps):
    w = mp.mpf(w_per_ps) * mp.mpf(10) ** 12
    form = DE * mp.exp(-(w * AE / (2 * C)) ** 2) - DH * mp.exp(-(w * AH / (2 * C)) ** 2)
    return w**3 * form**2 / (4 * mp.pi**2 * RHO * HBAR * C**5) / mp.mpf(10) ** 12


def main():
    peak = mp.findroot(lambda w: mp.diff(j_per_ps, w), 2.3)
    out = {
        "j_at_1_per_ps": float(j_per_ps(1)),
        "peak_omega_per_ps": float(peak),
        "peak_value_per_ps": float(j_per_ps(peak)),
        "polaron_shift_mev": float(-HBAR / EV * 1e15 * mp.quad(lambda w: j_per_ps(w) / w, [0, 2, 5, 10, 40])),
    }
    path = Path(__file__).resolve().parents[1] / "data" / "gaas_spectral_density.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
