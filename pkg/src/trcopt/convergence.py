"""Regression analysis of FOM trajectories and initiation-point detection.

Fits are computed against the cycle axis rescaled to kilocycles, so all
gradients are in FOM units per kilocycle; the conventional convergence
threshold of -3 lives in those units. Curves are evaluated on one grid
point per trajectory cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np

from .active_learning import Trajectory
from .errors import AnalysisError, IngestionError

KILOCYCLE = 1000.0
DEFAULT_THRESHOLD = -3.0
AVERAGED_PIECES = 20
AVERAGED_SHIFTS = 5


@dataclass(frozen=True)
class RegressionCurve:
    method: str
    cycles: np.ndarray
    values: np.ndarray
    gradients: np.ndarray  # FOM per kilocycle, aligned with `cycles`

    def __post_init__(self):
        if not (self.cycles.shape == self.values.shape == self.gradients.shape):
            raise AnalysisError("curve grids must align")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.gradients))):
            raise AnalysisError("curve contains non-finite values")

    def save_csv(self, stream: IO[str]) -> None:
        stream.write("cycle,fit,gradient\n")
        for cycle, value, grad in zip(self.cycles, self.values, self.gradients):
            stream.write(f"{int(cycle)},{float(value)!r},{float(grad)!r}\n")


@dataclass(frozen=True)
class ConvergenceReport:
    method: str
    threshold: float
    initiation_cycle: Optional[int]

    def save_csv(self, stream: IO[str]) -> None:
        stream.write("method,threshold,initiation_cycle\n")
        cell = "none" if self.initiation_cycle is None else str(self.initiation_cycle)
        stream.write(f"{self.method},{self.threshold!r},{cell}\n")

    @classmethod
    def load_csv(cls, stream: IO[str]) -> "ConvergenceReport":
        lines = [line.strip() for line in stream if line.strip()]
        if len(lines) != 2 or lines[0] != "method,threshold,initiation_cycle":
            raise IngestionError("malformed report file")
        method, threshold, cell = lines[1].split(",")
        return cls(method, float(threshold),
                   None if cell == "none" else int(cell))


def _axes(traj) -> tuple:
    if isinstance(traj, Trajectory):
        cycles = np.asarray(traj.cycles, dtype=np.float64)
        values = np.asarray(traj.foms, dtype=np.float64)
    else:
        cycles, values = (np.asarray(a, dtype=np.float64) for a in traj)
    if cycles.size < 2:
        raise AnalysisError("trajectory too short to fit")
    return cycles, values


def fit_polynomial(traj, degree: int) -> RegressionCurve:
    """Least-squares polynomial in kilocycles; gradient is its derivative."""
    if degree < 1:
        raise AnalysisError("degree must be >= 1")
    cycles, values = _axes(traj)
    if cycles.size <= degree:
        raise AnalysisError(
            f"need more than {degree} points for degree {degree}, got {cycles.size}"
        )
    t = cycles / KILOCYCLE
    coeffs = np.polyfit(t, values, degree)
    return RegressionCurve(
        method=f"poly-{degree}",
        cycles=cycles,
        values=np.polyval(coeffs, t),
        gradients=np.polyval(np.polyder(coeffs), t),
    )


def _breakpoints(t_min: float, t_max: float, pieces: int, offset: float) -> np.ndarray:
    interval = (t_max - t_min) / pieces
    knots = t_min + (np.arange(pieces) + offset) * interval
    return knots[(knots > t_min) & (knots < t_max)]


def _piecewise_fit(t: np.ndarray, values: np.ndarray, knots: np.ndarray):
    """Continuous piecewise-linear least squares via a ramp basis."""
    edges = np.concatenate(([t.min()], knots, [t.max()]))
    counts, _ = np.histogram(t, bins=edges)
    if np.any(counts == 0):
        raise AnalysisError("a regression segment contains no data points")
    design = np.column_stack(
        [np.ones_like(t), t] + [np.maximum(t - knot, 0.0) for knot in knots]
    )
    params, *_ = np.linalg.lstsq(design, values, rcond=None)
    fitted = design @ params
    # Slope within the segment containing t (right-continuous at knots).
    slopes = params[1] + np.where(
        t[:, None] >= knots[None, :], params[2:], 0.0
    ).sum(axis=1) if knots.size else np.full_like(t, params[1])
    return fitted, slopes


def fit_piecewise(traj, pieces: int, range_offset: float = 0.0) -> RegressionCurve:
    """Fixed regular-interval breakpoints, optionally shifted by a fraction
    of one interval (shifted grids gain partial end segments)."""
    if pieces < 1:
        raise AnalysisError("pieces must be >= 1")
    if not 0.0 <= range_offset < 1.0:
        raise AnalysisError("range offset must lie in [0, 1)")
    cycles, values = _axes(traj)
    if cycles.size < pieces + 1:
        raise AnalysisError(
            f"need at least {pieces + 1} points for {pieces} pieces, got {cycles.size}"
        )
    t = cycles / KILOCYCLE
    knots = _breakpoints(t.min(), t.max(), pieces, range_offset)
    fitted, slopes = _piecewise_fit(t, values, knots)
    tag = f"pw-{pieces}" if range_offset == 0.0 else f"pw-{pieces}@{range_offset:g}"
    return RegressionCurve(method=tag, cycles=cycles, values=fitted, gradients=slopes)


def fit_averaged_piecewise(
    traj,
    pieces: int = AVERAGED_PIECES,
    shifts: int = AVERAGED_SHIFTS,
) -> RegressionCurve:
    """Pointwise mean of `shifts` piecewise fits with staggered breakpoints
    (offsets 0, 1/shifts, ..., (shifts-1)/shifts of one interval)."""
    curves = [
        fit_piecewise(traj, pieces, range_offset=i / shifts) for i in range(shifts)
    ]
    return RegressionCurve(
        method="averaged",
        cycles=curves[0].cycles,
        values=np.mean([curve.values for curve in curves], axis=0),
        gradients=np.mean([curve.gradients for curve in curves], axis=0),
    )


def initiation_point(curve: RegressionCurve, threshold: float = DEFAULT_THRESHOLD) -> Optional[int]:
    """Smallest grid cycle whose gradient is at or below the threshold."""
    if threshold >= 0:
        raise AnalysisError("threshold must be negative")
    hits = np.nonzero(curve.gradients <= threshold)[0]
    if hits.size == 0:
        return None
    return int(curve.cycles[hits[0]])


def analyze(traj, method: str, threshold: float = DEFAULT_THRESHOLD,
            degree: int = 3, pieces: int = 5):
    """Dispatch by method tag; returns (curve, report).

    Recognized tags: 'poly' (uses `degree`), 'poly-<d>', 'piecewise'/'pw'
    (uses `pieces`), 'pw-<p>', 'averaged'.
    """
    tag = method.lower()
    if tag.startswith("poly"):
        if "-" in tag:
            degree = int(tag.split("-", 1)[1])
        curve = fit_polynomial(traj, degree)
    elif tag in ("pw", "piecewise") or tag.startswith("pw-"):
        if "-" in tag:
            pieces = int(tag.split("-", 1)[1])
        curve = fit_piecewise(traj, pieces)
    elif tag == "averaged":
        curve = fit_averaged_piecewise(traj)
    else:
        raise AnalysisError(f"unknown regression method {method!r}")
    report = ConvergenceReport(curve.method, threshold, initiation_point(curve, threshold))
    return curve, report
