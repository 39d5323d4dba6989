"""Bidirectional mapping between bit vectors and multilayer window stacks.

Each layer of the stack is one of four dielectrics and is addressed by a
two-bit label read (high bit, low bit) from left to right:

    00 -> SiO2    01 -> Si3N4    10 -> Al2O3    11 -> TiO2

All candidate layers share the same thickness; the stack total is fixed at
1,200 nm regardless of layer count.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

from .errors import EncodingError

TOTAL_THICKNESS_NM = 1200.0


class Material(Enum):
    SIO2 = "SiO2"
    SI3N4 = "Si3N4"
    AL2O3 = "Al2O3"
    TIO2 = "TiO2"
    PDMS = "PDMS"
    AIR = "Air"


#: Materials that may appear as optimizable stack layers, indexed by the
#: integer value of their two-bit label.
CANDIDATES = (Material.SIO2, Material.SI3N4, Material.AL2O3, Material.TIO2)

_CODE_OF = {m: code for code, m in enumerate(CANDIDATES)}


class BitVector:
    """Immutable fixed-length vector of {0,1}, hashable for dataset lookup."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]):
        tup = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in tup):
            raise EncodingError(f"bit vector elements must be 0 or 1, got {tup}")
        self._bits = tup

    @classmethod
    def from_text(cls, text: str) -> "BitVector":
        """Parse '0'/'1' characters; whitespace (pair grouping) is ignored."""
        cleaned = "".join(text.split())
        if not cleaned or set(cleaned) - {"0", "1"}:
            raise EncodingError(f"not a bit string: {text!r}")
        return cls(int(c) for c in cleaned)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitVector":
        return cls(rng.integers(0, 2, size=n))

    def to_text(self) -> str:
        """Canonical contiguous text form."""
        return "".join(str(b) for b in self._bits)

    def to_array(self) -> np.ndarray:
        return np.asarray(self._bits, dtype=np.float64)

    @property
    def bits(self) -> tuple:
        return self._bits

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, i):
        return self._bits[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVector) and self._bits == other._bits

    def __lt__(self, other: "BitVector") -> bool:
        return self._bits < other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        return f"BitVector({self.to_text()!r})"


@dataclass(frozen=True)
class LayerStack:
    """Ordered coherent layers between a semi-infinite superstrate and substrate.

    ``layers`` runs from the superstrate side downwards; each entry is
    ``(material, thickness_nm)``.
    """

    layers: tuple
    superstrate: Material = Material.AIR
    substrate: Material = Material.SIO2

    def materials(self) -> set:
        used = {m for m, _ in self.layers}
        used.add(self.substrate)
        used.add(self.superstrate)
        return used

    def total_thickness(self) -> float:
        return float(sum(d for _, d in self.layers))


def decode(bits: BitVector, superstrate: Material = Material.AIR) -> LayerStack:
    """Decode a bit vector into its layer stack.

    Layer ``i`` is determined by the bit pair ``(2i, 2i+1)`` read as
    (high, low); every layer gets thickness ``1200 / (len(bits)/2)`` nm.
    """
    n = len(bits)
    if n < 2 or n % 2:
        raise EncodingError(f"bit vector length must be even and >= 2, got {n}")
    n_layers = n // 2
    thickness = TOTAL_THICKNESS_NM / n_layers
    layers = tuple(
        (CANDIDATES[2 * bits[2 * i] + bits[2 * i + 1]], thickness)
        for i in range(n_layers)
    )
    return LayerStack(layers=layers, superstrate=superstrate, substrate=Material.SIO2)


def encode(stack: LayerStack) -> BitVector:
    """Inverse of :func:`decode`; rejects stacks decode cannot produce."""
    if not stack.layers:
        raise EncodingError("cannot encode an empty stack")
    expected = TOTAL_THICKNESS_NM / len(stack.layers)
    bits = []
    for material, thickness in stack.layers:
        if material not in _CODE_OF:
            raise EncodingError(f"{material.value} is not a candidate layer material")
        if abs(thickness - expected) > 1e-9 * expected:
            raise EncodingError(
                f"unequal layer thickness {thickness} nm (expected {expected} nm)"
            )
        code = _CODE_OF[material]
        bits.append(code >> 1)
        bits.append(code & 1)
    return BitVector(bits)
