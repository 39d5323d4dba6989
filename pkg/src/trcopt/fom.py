"""Solar-weighted figure of merit against the ideal window profile.

    FOM = 10 * Int[(T_ideal*S)^2 - (T_designed*S)^2] dlam / Int[S^2] dlam

integrated over 300-2,500 nm by the trapezoidal rule. Written exactly as
above (no absolute value), so over-transmission outside the visible band
lowers the score. FOM -> 0 means the design matches the ideal profile.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .errors import DimensionError, IngestionError
from .optics import GRID_MAX_NM, GRID_MIN_NM, Spectrum, default_grid

VISIBLE_MIN_NM = 380.0
VISIBLE_MAX_NM = 780.0

_SOLAR_FILE = "solar_global_tilt.csv"

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class SolarSpectrum:
    spectrum: Spectrum


@dataclass(frozen=True)
class IdealProfile:
    """Unit transmission inside the visible band, zero outside."""

    lower_nm: float = VISIBLE_MIN_NM
    upper_nm: float = VISIBLE_MAX_NM

    def __post_init__(self):
        if not (GRID_MIN_NM < self.lower_nm < self.upper_nm < GRID_MAX_NM):
            raise DimensionError(
                f"band edges must satisfy {GRID_MIN_NM} < lo < hi < {GRID_MAX_NM}"
            )

    def spectrum(self, grid: np.ndarray) -> Spectrum:
        inside = (grid >= self.lower_nm) & (grid <= self.upper_nm)
        return Spectrum(grid, inside.astype(np.float64))


def load_solar_spectrum(source, grid: Optional[np.ndarray] = None) -> SolarSpectrum:
    """Read 'wavelength_nm,irradiance' CSV and resample onto the grid."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as handle:
            return load_solar_spectrum(handle, grid)
    if isinstance(source, bytes):
        return load_solar_spectrum(io.StringIO(source.decode()), grid)

    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise IngestionError("empty solar spectrum file")
    rows = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rows.append((float(row[0]), float(row[1])))
        except (IndexError, ValueError) as exc:
            raise IngestionError(f"bad solar row {line_no}: {row}") from exc
    if not rows:
        raise IngestionError("solar spectrum file has no rows")
    data = np.asarray(rows)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise IngestionError("solar wavelengths must strictly increase")
    if np.any(data[:, 1] < 0):
        raise IngestionError("solar irradiance must be non-negative")
    if data[0, 0] > grid.min() or data[-1, 0] < grid.max():
        raise IngestionError(
            f"solar coverage [{data[0, 0]}, {data[-1, 0]}] nm does not span "
            f"[{grid.min()}, {grid.max()}] nm"
        )
    values = np.interp(grid, data[:, 0], data[:, 1])
    return SolarSpectrum(Spectrum(grid, values))


def builtin_solar(grid: Optional[np.ndarray] = None) -> SolarSpectrum:
    """The global-tilt solar irradiance table shipped with the package."""
    payload = resources.files("trcopt.data").joinpath(_SOLAR_FILE).read_bytes()
    return load_solar_spectrum(payload, grid)


def fom(designed: Spectrum, ideal: IdealProfile, solar: SolarSpectrum) -> float:
    solar_spec = solar.spectrum
    if not designed.same_grid(solar_spec):
        raise DimensionError("designed spectrum and solar spectrum grids differ")
    grid = designed.wavelengths_nm
    ideal_t = ideal.spectrum(grid).values
    s = solar_spec.values
    numerator = _trapezoid((ideal_t * s) ** 2 - (designed.values * s) ** 2, grid)
    denominator = _trapezoid(s**2, grid)
    return float(10.0 * numerator / denominator)
