"""YAML configuration schemas for runs and sweeps.

A run file looks like::

    run:
      n_bits: 40
      n_initial: 25
      cycles: 500
      seed: 1
    trainer:            # optional, defaults shown in fm.TrainConfig
      learning_rate: 0.01
      epochs: 300
    anneal:             # optional, defaults in anneal.AnnealConfig
      num_reads: 50
      sweeps: 1000
    optics:             # optional
      materials_dir: null        # null -> shipped dispersion tables
      constant_index: false      # true -> dispersionless test indices
      grid_min_nm: 300
      grid_max_nm: 2500
      grid_step_nm: 5
      pdms_superstrate: false
    fom:                # optional
      solar_csv: null            # null -> shipped solar table
      visible_min_nm: 380
      visible_max_nm: 780
    analysis:           # optional
      method: averaged
      threshold: -3.0

A sweep file replaces the ``run`` block with a ``sweep`` block::

    sweep:
      sizes: [40, 60]
      initial_counts: [25, 100]
      cycles: 1000
      seeds: [1, 2, 3]
      thresholds: {40: -3.0, 160: -2.0}   # optional per-size override
      threshold: -3.0                     # default for unlisted sizes

Unknown keys are rejected.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional

import numpy as np
import yaml

from .active_learning import RunConfig, TrcEvaluator
from .anneal import AnnealConfig
from .encoding import Material
from .errors import ConfigError
from .fm import TrainConfig
from .fom import IdealProfile, builtin_solar, load_solar_spectrum
from .optics import builtin_tables, constant_tables, default_grid

#: Environment variable naming the default output/data directory.
DATA_DIR_ENV = "TRCOPT_DATA_DIR"


@dataclass
class OpticsConfig:
    materials_dir: Optional[str] = None
    constant_index: bool = False
    grid_min_nm: float = 300.0
    grid_max_nm: float = 2500.0
    grid_step_nm: float = 5.0
    pdms_superstrate: bool = False

    def grid(self) -> np.ndarray:
        if not (0 < self.grid_min_nm < self.grid_max_nm) or self.grid_step_nm <= 0:
            raise ConfigError("invalid wavelength grid bounds")
        return default_grid(self.grid_min_nm, self.grid_max_nm, self.grid_step_nm)

    def tables(self):
        if self.constant_index:
            return constant_tables()
        return builtin_tables(self.materials_dir)


@dataclass
class FomConfig:
    solar_csv: Optional[str] = None
    visible_min_nm: float = 380.0
    visible_max_nm: float = 780.0

    def solar(self, grid):
        if self.solar_csv is not None:
            return load_solar_spectrum(self.solar_csv, grid)
        return builtin_solar(grid)

    def ideal(self) -> IdealProfile:
        return IdealProfile(self.visible_min_nm, self.visible_max_nm)


@dataclass
class AnalysisConfig:
    method: str = "averaged"
    threshold: float = -3.0
    degree: int = 3
    pieces: int = 5


@dataclass
class RunSpec:
    run: RunConfig
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    fom: FomConfig = field(default_factory=FomConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)

    def evaluator(self) -> TrcEvaluator:
        grid = self.optics.grid()
        superstrate = (
            Material.PDMS if self.optics.pdms_superstrate else Material.AIR
        )
        return TrcEvaluator(
            self.optics.tables(),
            self.fom.solar(grid),
            self.fom.ideal(),
            grid=grid,
            superstrate=superstrate,
        )


@dataclass
class SweepSpec:
    sizes: List[int]
    initial_counts: List[int]
    cycles: int
    seeds: List[int]
    threshold: float = -3.0
    thresholds: Dict[int, float] = field(default_factory=dict)
    trainer: TrainConfig = field(default_factory=TrainConfig)
    annealer: AnnealConfig = field(default_factory=AnnealConfig)
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    fom: FomConfig = field(default_factory=FomConfig)

    def __post_init__(self):
        if not self.sizes or not self.initial_counts or not self.seeds:
            raise ConfigError("sweep sizes, initial_counts, and seeds must be non-empty")
        if self.cycles < 1:
            raise ConfigError("cycles must be >= 1")

    def threshold_for(self, n_bits: int) -> float:
        return self.thresholds.get(n_bits, self.threshold)

    def cells(self):
        for n_bits in self.sizes:
            for n_initial in self.initial_counts:
                for seed in self.seeds:
                    yield n_bits, n_initial, seed


def _build(cls, payload, where):
    if payload is None:
        payload = {}
    if not isinstance(payload, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(payload).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = set(payload) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**payload)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _load_yaml(path) -> dict:
    try:
        with open(path) as handle:
            payload = yaml.safe_load(handle)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return payload


def load_run_spec(path) -> RunSpec:
    payload = _load_yaml(path)
    unknown = set(payload) - {"run", "trainer", "anneal", "optics", "fom", "analysis"}
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    if "run" not in payload:
        raise ConfigError(f"{path}: missing 'run' section")
    run_block = dict(payload["run"] or {})
    allowed = {"n_bits", "n_initial", "cycles", "seed", "latent_k", "maximize"}
    unknown = set(run_block) - allowed
    if unknown:
        raise ConfigError(f"{path}: run: unknown keys {sorted(unknown)}")
    trainer = _build(TrainConfig, payload.get("trainer"), f"{path}: trainer")
    annealer = _build(AnnealConfig, payload.get("anneal"), f"{path}: anneal")
    try:
        run = RunConfig(trainer=trainer, annealer=annealer, **run_block)
    except TypeError as exc:
        raise ConfigError(f"{path}: run: {exc}") from exc
    return RunSpec(
        run=run,
        optics=_build(OpticsConfig, payload.get("optics"), f"{path}: optics"),
        fom=_build(FomConfig, payload.get("fom"), f"{path}: fom"),
        analysis=_build(AnalysisConfig, payload.get("analysis"), f"{path}: analysis"),
    )


def load_sweep_spec(path) -> SweepSpec:
    payload = _load_yaml(path)
    unknown = set(payload) - {"sweep", "trainer", "anneal", "optics", "fom"}
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    if "sweep" not in payload:
        raise ConfigError(f"{path}: missing 'sweep' section")
    block = dict(payload["sweep"] or {})
    allowed = {"sizes", "initial_counts", "cycles", "seeds", "threshold", "thresholds"}
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"{path}: sweep: unknown keys {sorted(unknown)}")
    if "thresholds" in block and block["thresholds"] is not None:
        block["thresholds"] = {int(k): float(v) for k, v in block["thresholds"].items()}
    try:
        return SweepSpec(
            trainer=_build(TrainConfig, payload.get("trainer"), f"{path}: trainer"),
            annealer=_build(AnnealConfig, payload.get("anneal"), f"{path}: anneal"),
            optics=_build(OpticsConfig, payload.get("optics"), f"{path}: optics"),
            fom=_build(FomConfig, payload.get("fom"), f"{path}: fom"),
            **block,
        )
    except TypeError as exc:
        raise ConfigError(f"{path}: sweep: {exc}") from exc


def default_out_dir() -> str:
    return os.environ.get(DATA_DIR_ENV, os.path.join(os.getcwd(), "trcopt-out"))
