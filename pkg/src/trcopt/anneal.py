"""Simulated-annealing sampler over QUBOs.

The classical stand-in for annealing hardware: independent single-spin-flip
Metropolis chains over a geometric inverse-temperature ramp. The hot loop
lives in a compiled extension when available; a pure-Python kernel with
bit-identical output is selected otherwise (see ``trcopt._sa_ref``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import _sa_ref
from .encoding import BitVector
from .errors import ConfigError
from .qubo import Qubo, qubo_energy

try:
    from . import _sa_core as _default_kernel
except ImportError:  # extension not built; fall back to the slow kernel
    _default_kernel = _sa_ref

#: Name of the kernel used by default ("compiled" or "python").
KERNEL = _default_kernel.KERNEL_NAME


@dataclass
class AnnealConfig:
    num_reads: int = 50
    sweeps: int = 1000
    beta_min: float = 0.1
    beta_max: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1 or self.sweeps < 1:
            raise ConfigError("num_reads and sweeps must be >= 1")
        if not (0 < self.beta_min < self.beta_max):
            raise ConfigError(
                f"need 0 < beta_min < beta_max, got ({self.beta_min}, {self.beta_max})"
            )


def anneal(q: Qubo, cfg: AnnealConfig, kernel=None) -> List[Tuple[BitVector, float]]:
    """Sample and rank low-energy states.

    Returns the distinct best-visited states across all reads, sorted by
    energy ascending (ties by bit string); energies exclude the offset and
    are recomputed through :func:`qubo_energy` for bookkeeping consistency.
    """
    kernel = kernel or _default_kernel
    states, _ = kernel.sample(
        q.symmetric_offdiag(),
        q.diagonal(),
        cfg.num_reads,
        cfg.sweeps,
        cfg.beta_min,
        cfg.beta_max,
        cfg.seed,
    )
    distinct = {}
    for row in states:
        x = BitVector(int(b) for b in row)
        if x not in distinct:
            distinct[x] = qubo_energy(q, x)
    return sorted(distinct.items(), key=lambda item: (item[1], item[0].bits))
