"""Trajectory container and its CSV / JSON serialization."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


@dataclass
class TimeSeries:
    """Reduced density matrices ``states[k]`` at ``times[k]`` (ps)."""

    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.ndim != 3 or self.states.shape[0] != self.times.shape[0]:
            raise ValueError("states must have shape (n_times, N, N) matching times")

    @property
    def dim(self):
        return self.states.shape[1]

    def __len__(self):
        return self.times.shape[0]

    def population(self, index):
        return self.states[:, index, index].real.copy()

    def element(self, i, j):
        return self.states[:, i, j].copy()

    def traces(self):
        return np.trace(self.states, axis1=1, axis2=2)

    def long_time_mean(self, index, fraction=0.1):
        """Mean population of ``index`` over the final ``fraction`` of the run."""
        n = len(self)
        start = min(n - 1, int(np.floor(n * (1.0 - fraction))))
        return float(np.mean(self.population(index)[start:]))

    def columns(self, elements=None):
        n = self.dim
        if elements is None:
            elements = [(i, j) for i in range(n) for j in range(i, n)]
        header = ["t_ps"]
        for i, j in elements:
            header += [f"re_rho_{i}{j}", f"im_rho_{i}{j}"]
        header.append("trace_drift")
        return header, elements

    def to_csv(self, path, elements=None):
        """Write one row per time; floats use 17 significant digits."""
        header, elements = self.columns(elements)
        drift = self.traces().real - 1.0
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k, t in enumerate(self.times):
                row = [repr(float(t))]
                for i, j in elements:
                    z = self.states[k, i, j]
                    row += [repr(float(z.real)), repr(float(z.imag))]
                row.append(repr(float(drift[k])))
                w.writerow(row)
        return Path(path)

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], np.array(rows[1:], dtype=float)
        elems = [tuple(int(c) for c in h[len("re_rho_"):]) for h in header if h.startswith("re_rho_")]
        n = max(max(e) for e in elems) + 1
        states = np.zeros((body.shape[0], n, n), dtype=complex)
        for e, (i, j) in enumerate(elems):
            z = body[:, 1 + 2 * e] + 1j * body[:, 2 + 2 * e]
            states[:, i, j] = z
            states[:, j, i] = z.conj()
        return cls(body[:, 0], states)


def write_meta(path, config: dict, kernel_key: str | None = None, extra: dict | None = None):
    meta = {"code_version": __version__, "config": config, "kernel_hash": kernel_key}
    if extra:
        meta.update(extra)
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return Path(path)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)
