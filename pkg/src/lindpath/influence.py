"""Truncated influence-functional factors built from memory kernels.

For a ket path ``nu`` and bra path ``mu`` the pair term between time steps
``l >= l'`` is::

    S = -K_{nu_l' nu_l} - K*_{mu_l mu_l'} + K*_{nu_l mu_l'} + K_{nu_l' mu_l}

evaluated at lag ``l - l'``. Terms with lag ``>= n_c`` are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bath import MemoryKernelTable
from .errors import ConfigurationError


@dataclass(frozen=True)
class InfluenceTable:
    """Actions and factors indexed ``[lag, nu_l, mu_l, nu_l', mu_l']``."""

    n_c: int
    dim: int
    actions: np.ndarray = field(repr=False)
    factors: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (self.n_c,) + (self.dim,) * 4
        for name in ("actions", "factors"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != shape:
                raise ConfigurationError(f"influence {name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def pair_matrix(self, lag, which="factors"):
        """``(N^2, N^2)`` matrix ``[p_l, p_l']`` with ``p = nu + mu * N``."""
        arr = getattr(self, which)[lag]
        return arr.transpose(1, 0, 3, 2).reshape(self.dim**2, self.dim**2)

    def is_trivial(self):
        return bool(np.all(self.actions == 0))


def build_influence_table(table: MemoryKernelTable, dim: int) -> InfluenceTable:
    """Exponentiate the four-kernel combination for every index and lag."""
    if table.max_state() >= dim:
        raise ConfigurationError(
            f"kernel table couples state {table.max_state()} but system has dimension {dim}")
    K = np.zeros((table.n_c, dim, dim), dtype=complex)
    for (a, b), vals in table.entries.items():
        K[:, a, b] = vals
        K[:, b, a] = vals
    Kc = K.conj()
    # axes: lag, nu_l (i), mu_l (j), nu_l' (k), mu_l' (m)
    S = (-K.transpose(0, 2, 1)[:, :, None, :, None]          # -K_{nu_l' nu_l}
         - Kc[:, None, :, None, :]                            # -K*_{mu_l mu_l'}
         + Kc[:, :, None, None, :]                            # +K*_{nu_l mu_l'}
         + K.transpose(0, 2, 1)[:, None, :, :, None])         # +K_{nu_l' mu_l}
    S = np.broadcast_to(S, (table.n_c,) + (dim,) * 4)
    return InfluenceTable(table.n_c, dim, S, np.exp(S))


def truncated_action(path_segment, influence: InfluenceTable) -> complex:
    """Sum of pair actions over all ``l' <= l`` in a chronological segment.

    ``path_segment`` is a sequence of ``(nu, mu)`` pairs, oldest first.
    Pairs further apart than the table depth contribute nothing.
    """
    seg = [(int(a), int(b)) for a, b in path_segment]
    total = 0j
    for l, (nu_l, mu_l) in enumerate(seg):
        for lp in range(max(0, l - influence.n_c + 1), l + 1):
            nu_lp, mu_lp = seg[lp]
            total += influence.actions[l - lp, nu_l, mu_l, nu_lp, mu_lp]
    return complex(total)
