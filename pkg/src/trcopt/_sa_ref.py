"""Pure-Python simulated-annealing kernel.

Reference implementation of the same algorithm as the compiled extension
``trcopt._sa_core``; both use an identical splitmix64 stream so their
outputs agree bit-for-bit. This version exists as an import-time fallback
and as the baseline for the kernel benchmark — it is orders of magnitude
slower and not meant for paper-scale sweeps.
"""
from __future__ import annotations

import math

import numpy as np

KERNEL_NAME = "python"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class _SplitMix:
    """splitmix64; one independent stream per annealing read."""

    __slots__ = ("state",)

    def __init__(self, seed: int, read_index: int):
        self.state = (seed + (read_index + 1) * _GOLDEN) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)


def sample(qsym, diag, num_reads, sweeps, beta_min, beta_max, seed):
    """Run independent Metropolis chains; returns (best states, best energies).

    qsym: symmetric couplings with zero diagonal; diag: linear terms.
    Geometric beta ramp over sweeps; one sequential pass over all bits per
    sweep; local fields updated incrementally on accepted flips.
    """
    qsym = np.asarray(qsym, dtype=np.float64)
    diag = np.asarray(diag, dtype=np.float64)
    n = diag.shape[0]
    seed &= _MASK

    states = np.empty((num_reads, n), dtype=np.uint8)
    energies = np.empty(num_reads, dtype=np.float64)
    ratio = beta_max / beta_min
    denom = max(sweeps - 1, 1)

    for read in range(num_reads):
        rng = _SplitMix(seed, read)
        x = [rng.next_u64() >> 63 for _ in range(n)]
        field = [
            diag[i] + sum(qsym[i, j] for j in range(n) if x[j])
            for i in range(n)
        ]
        energy = sum(diag[i] for i in range(n) if x[i])
        for i in range(n):
            if x[i]:
                energy += 0.5 * (field[i] - diag[i])
        best_energy = energy
        best = list(x)

        for sweep in range(sweeps):
            beta = beta_min * ratio ** (sweep / denom)
            for i in range(n):
                delta = (1 - 2 * x[i]) * field[i]
                if delta <= 0.0 or rng.uniform() < math.exp(-beta * delta):
                    step = 1 - 2 * x[i]
                    x[i] ^= 1
                    energy += delta
                    row = qsym[i]
                    for j in range(n):
                        field[j] += step * row[j]
                    if energy < best_energy:
                        best_energy = energy
                        best = list(x)

        states[read] = best
        energies[read] = best_energy
    return states, energies
