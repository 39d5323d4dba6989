"""QUBO representation, energy evaluation, and an exhaustive oracle.

The matrix is stored dense upper-triangular (diagonal included); the
constant ``offset`` rides along but never enters the energy — callers add
it explicitly when they want model-space values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Tuple

import numpy as np

from .encoding import BitVector
from .errors import DimensionError, IngestionError, SizeError

BRUTE_FORCE_LIMIT = 24
_CHUNK_BITS = 16  # enumerate at most 2**16 states per batch


@dataclass
class Qubo:
    """Upper-triangular coefficient matrix plus a constant offset."""

    coefficients: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.coefficients, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DimensionError(f"coefficient matrix must be square, got {q.shape}")
        if not np.all(np.isfinite(q)) or not np.isfinite(self.offset):
            raise DimensionError("QUBO coefficients must be finite")
        if np.any(np.tril(q, -1)):
            raise DimensionError("coefficients must be upper-triangular")
        self.coefficients = q
        self.offset = float(self.offset)

    @property
    def n(self) -> int:
        return self.coefficients.shape[0]

    @classmethod
    def from_dict(cls, n: int, entries: dict, offset: float = 0.0) -> "Qubo":
        """Build from a sparse {(i, j): value} map with i <= j."""
        q = np.zeros((n, n))
        for (i, j), value in entries.items():
            if not (0 <= i <= j < n):
                raise DimensionError(f"index pair {(i, j)} out of range for n={n}")
            q[i, j] = value
        return cls(q, offset)

    def symmetric_offdiag(self) -> np.ndarray:
        """Symmetrized couplings with a zero diagonal (annealer form)."""
        off = self.coefficients - np.diag(np.diag(self.coefficients))
        return off + off.T

    def diagonal(self) -> np.ndarray:
        return np.diag(self.coefficients).copy()


def qubo_energy(q: Qubo, x: BitVector) -> float:
    """x^T Q x, offset excluded."""
    if len(x) != q.n:
        raise DimensionError(f"vector length {len(x)} != QUBO size {q.n}")
    xa = x.to_array()
    return float(xa @ (q.coefficients @ xa))


def qubo_energies(q: Qubo, xs: np.ndarray) -> np.ndarray:
    """Vectorized energies for a batch of 0/1 rows (shape m x n)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.shape[1] != q.n:
        raise DimensionError(f"batch width {xs.shape[1]} != QUBO size {q.n}")
    return np.einsum("bi,bi->b", xs @ q.coefficients.T, xs)


def _enumerate_bits(indices: np.ndarray, n: int) -> np.ndarray:
    """Index -> bit rows with bit 0 as the most significant position.

    That ordering makes np.argmin's first-hit tie-breaking coincide with
    lowest-lexicographic bit strings.
    """
    shifts = np.arange(n - 1, -1, -1)
    return ((indices[:, None] >> shifts[None, :]) & 1).astype(np.float64)


def brute_force_min(q: Qubo) -> Tuple[BitVector, float]:
    """Exact global minimizer by exhaustive enumeration (n <= 24).

    Ties are broken toward the lexicographically smallest bit string.
    """
    n = q.n
    if n > BRUTE_FORCE_LIMIT:
        raise SizeError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    best_energy = np.inf
    best_index = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        energies = qubo_energies(q, _enumerate_bits(idx, n))
        local = int(np.argmin(energies))
        if energies[local] < best_energy:
            best_energy = float(energies[local])
            best_index = int(idx[local])
    bits = _enumerate_bits(np.array([best_index], dtype=np.int64), n)[0]
    return BitVector(bits.astype(int)), best_energy


def save_qubo(q: Qubo, stream: IO[str]) -> None:
    """Sparse triplet text form: header 'n offset', then 'i j value' lines."""
    stream.write(f"{q.n} {q.offset!r}\n")
    rows, cols = np.nonzero(q.coefficients)
    for i, j in zip(rows, cols):
        stream.write(f"{i} {j} {float(q.coefficients[i, j])!r}\n")


def load_qubo(stream: IO[str]) -> Qubo:
    lines = [line.strip() for line in stream if line.strip()]
    if not lines:
        raise IngestionError("empty QUBO file")
    try:
        n_text, offset_text = lines[0].split()
        n = int(n_text)
        entries = {}
        for line in lines[1:]:
            i_text, j_text, value = line.split()
            entries[(int(i_text), int(j_text))] = float(value)
        return Qubo.from_dict(n, entries, offset=float(offset_text))
    except (ValueError, DimensionError) as exc:
        raise IngestionError(f"malformed QUBO file: {exc}") from exc
