"""Normal-incidence transfer-matrix transmittance for multilayer stacks.

Wavelength-resolved complex refractive indices come from per-material
dispersion tables (CSV); the characteristic-matrix product is vectorized
over the wavelength grid. The shipped tables are generated from standard
published dispersion models (see data/README); a constant-index set is
available for fast tests.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Optional

import numpy as np

from .encoding import LayerStack, Material
from .errors import DimensionError, IngestionError, OpticsError

GRID_MIN_NM = 300.0
GRID_MAX_NM = 2500.0
GRID_STEP_NM = 5.0

_CONSTANT_INDEX = {
    Material.SIO2: 1.45,
    Material.SI3N4: 2.0,
    Material.AL2O3: 1.66,
    Material.TIO2: 2.4,
    Material.PDMS: 1.41,
}

_TABLE_FILES = {
    Material.SIO2: "sio2.csv",
    Material.SI3N4: "si3n4.csv",
    Material.AL2O3: "al2o3.csv",
    Material.TIO2: "tio2.csv",
    Material.PDMS: "pdms.csv",
}


def default_grid(
    lo: float = GRID_MIN_NM, hi: float = GRID_MAX_NM, step: float = GRID_STEP_NM
) -> np.ndarray:
    return np.arange(lo, hi + 0.5 * step, step)


@dataclass(frozen=True)
class Spectrum:
    """Per-wavelength values on a shared uniform grid."""

    wavelengths_nm: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.wavelengths_nm.shape != self.values.shape:
            raise DimensionError("wavelength and value arrays must align")

    def same_grid(self, other: "Spectrum") -> bool:
        return (
            self.wavelengths_nm.shape == other.wavelengths_nm.shape
            and np.array_equal(self.wavelengths_nm, other.wavelengths_nm)
        )

    def save_csv(self, stream) -> None:
        stream.write("wavelength_nm,value\n")
        for lam, value in zip(self.wavelengths_nm, self.values):
            stream.write(f"{float(lam)!r},{float(value)!r}\n")


@dataclass(frozen=True)
class MaterialTable:
    material: Material
    wavelengths_nm: np.ndarray
    n: np.ndarray
    kappa: np.ndarray

    def refractive_index(self, grid: np.ndarray) -> np.ndarray:
        """Complex index n + i*kappa, linearly interpolated; no extrapolation."""
        lo, hi = self.wavelengths_nm[0], self.wavelengths_nm[-1]
        if grid.min() < lo or grid.max() > hi:
            raise OpticsError(
                f"{self.material.value} table covers [{lo}, {hi}] nm, "
                f"queried [{grid.min()}, {grid.max()}] nm"
            )
        return np.interp(grid, self.wavelengths_nm, self.n) + 1j * np.interp(
            grid, self.wavelengths_nm, self.kappa
        )


def load_material_table(source, material: Material) -> MaterialTable:
    """Read a 'wavelength_nm,n,k' CSV (path, text stream, or bytes)."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as handle:
            return load_material_table(handle, material)
    if isinstance(source, bytes):
        return load_material_table(io.StringIO(source.decode()), material)

    rows = []
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise IngestionError(f"{material.value}: empty dispersion table")
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            lam, n, kappa = (float(cell) for cell in row[:3])
        except ValueError as exc:
            raise IngestionError(
                f"{material.value}: bad dispersion row {line_no}: {row}"
            ) from exc
        rows.append((lam, n, kappa))
    if not rows:
        raise IngestionError(f"{material.value}: dispersion table has no rows")
    data = np.asarray(rows)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise IngestionError(f"{material.value}: wavelengths must strictly increase")
    if np.any(data[:, 1] <= 0):
        raise IngestionError(f"{material.value}: refractive index must be positive")
    if np.any(data[:, 2] < 0):
        raise IngestionError(f"{material.value}: extinction must be non-negative")
    return MaterialTable(material, data[:, 0], data[:, 1], data[:, 2])


def constant_tables() -> Dict[Material, MaterialTable]:
    """Dispersionless lossless indices spanning the standard band (fast tests)."""
    span = np.array([GRID_MIN_NM, GRID_MAX_NM])
    return {
        material: MaterialTable(material, span, np.full(2, index), np.zeros(2))
        for material, index in _CONSTANT_INDEX.items()
    }


def builtin_tables(data_dir: Optional[str] = None) -> Dict[Material, MaterialTable]:
    """Load the dispersion tables shipped with the package (or a custom dir)."""
    tables = {}
    for material, filename in _TABLE_FILES.items():
        if data_dir is not None:
            tables[material] = load_material_table(
                os.path.join(data_dir, filename), material
            )
        else:
            payload = resources.files("trcopt.data").joinpath(filename).read_bytes()
            tables[material] = load_material_table(payload, material)
    return tables


def _index_of(
    material: Material, tables: Dict[Material, MaterialTable], grid: np.ndarray
) -> np.ndarray:
    if material is Material.AIR:
        return np.ones_like(grid, dtype=complex)
    if material not in tables:
        raise OpticsError(f"no dispersion table for {material.value}")
    return tables[material].refractive_index(grid)


def transmittance(
    stack: LayerStack,
    tables: Dict[Material, MaterialTable],
    grid: Optional[np.ndarray] = None,
) -> Spectrum:
    """Intensity transmittance of the stack at normal incidence.

    Standard characteristic-matrix formulation: per layer
    M = [[cos d, i sin d / eta], [i eta sin d, cos d]] with
    d = 2*pi*n_complex*thickness/lambda, applied between semi-infinite
    superstrate and substrate; T = Re(eta_sub)/Re(eta_sup) * |t|^2,
    clamped to [0, 1].
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    # tables report n + i*kappa; this matrix formulation assumes the
    # exp(+i omega t) time convention, i.e. absorbing indices n - i*kappa
    eta_sup = np.conj(_index_of(stack.superstrate, tables, grid))
    eta_sub = np.conj(_index_of(stack.substrate, tables, grid))

    # [B; C] = M_1 ... M_N [1; eta_sub], accumulated right to left.
    b = np.ones_like(grid, dtype=complex)
    c = eta_sub.astype(complex)
    for material, thickness in reversed(stack.layers):
        eta = np.conj(_index_of(material, tables, grid))
        delta = 2.0 * np.pi * eta * thickness / grid
        cos_d = np.cos(delta)
        sin_d = np.sin(delta)
        b, c = cos_d * b + 1j * sin_d / eta * c, 1j * eta * sin_d * b + cos_d * c

    t = 2.0 * eta_sup / (eta_sup * b + c)
    values = eta_sub.real / eta_sup.real * np.abs(t) ** 2
    return Spectrum(grid, np.clip(values, 0.0, 1.0))
