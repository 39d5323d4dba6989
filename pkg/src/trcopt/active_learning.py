"""Surrogate-based active-learning loop.

Seed with random evaluated designs, then per cycle: retrain the FM
surrogate from scratch, export it as a QUBO, anneal, evaluate the best
not-yet-seen proposal with the true evaluator, and grow the dataset.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable, IO, List, Optional, Tuple

import numpy as np

from .anneal import AnnealConfig, anneal
from .encoding import BitVector, Material, decode
from .errors import ConfigError, DataError, IngestionError, RunError, TrcoptError
from .fm import DEFAULT_LATENT_K, TrainConfig, fm_to_qubo, fm_train
from .fom import IdealProfile, SolarSpectrum, fom
from .optics import MaterialTable, transmittance

Evaluator = Callable[[BitVector], float]


@dataclass(frozen=True)
class Sample:
    x: BitVector
    fom: float

    def __post_init__(self):
        if not np.isfinite(self.fom):
            raise DataError(f"non-finite figure of merit for {self.x!r}")


class Dataset:
    """Ordered samples with O(1) duplicate lookup by bit string."""

    def __init__(self, samples=()):
        self._samples: List[Sample] = []
        self._seen = set()
        for sample in samples:
            self.append(sample)

    def append(self, sample: Sample) -> None:
        if sample.x in self._seen:
            raise DataError(f"duplicate design {sample.x.to_text()}")
        self._samples.append(sample)
        self._seen.add(sample.x)

    def __contains__(self, x: BitVector) -> bool:
        return x in self._seen

    def __len__(self) -> int:
        return len(self._samples)

    def __iter__(self):
        return iter(self._samples)

    @property
    def samples(self) -> Tuple[Sample, ...]:
        return tuple(self._samples)

    def min_fom(self) -> float:
        return min(sample.fom for sample in self._samples)

    def best(self) -> Sample:
        return min(self._samples, key=lambda sample: sample.fom)

    def bit_matrix(self) -> np.ndarray:
        return np.array([sample.x.to_array() for sample in self._samples])

    def targets(self) -> np.ndarray:
        return np.array([sample.fom for sample in self._samples])

    def save_csv(self, stream: IO[str]) -> None:
        stream.write("bitstring,fom\n")
        for sample in self._samples:
            stream.write(f"{sample.x.to_text()},{sample.fom!r}\n")

    @classmethod
    def load_csv(cls, stream: IO[str]) -> "Dataset":
        dataset = cls()
        for x, value in _read_bit_fom_rows(stream, expected_header=["bitstring", "fom"]):
            dataset.append(Sample(x, value))
        return dataset


@dataclass
class Trajectory:
    """Per-cycle evaluated design and its figure of merit (cycles start at 1)."""

    cycles: List[int] = field(default_factory=list)
    foms: List[float] = field(default_factory=list)
    vectors: List[BitVector] = field(default_factory=list)

    def append(self, cycle: int, x: BitVector, value: float) -> None:
        self.cycles.append(cycle)
        self.foms.append(value)
        self.vectors.append(x)

    def __len__(self) -> int:
        return len(self.cycles)

    def running_min(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.foms))

    def save_csv(self, stream: IO[str]) -> None:
        stream.write("cycle,bitstring,fom\n")
        for cycle, x, value in zip(self.cycles, self.vectors, self.foms):
            stream.write(f"{cycle},{x.to_text()},{value!r}\n")

    @classmethod
    def load_csv(cls, stream: IO[str]) -> "Trajectory":
        traj = cls()
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != ["cycle", "bitstring", "fom"]:
            raise IngestionError(f"unexpected trajectory header: {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                traj.append(int(row[0]), BitVector.from_text(row[1]), float(row[2]))
            except (IndexError, ValueError, TrcoptError) as exc:
                raise IngestionError(f"bad trajectory row {line_no}: {row}") from exc
        return traj


def _read_bit_fom_rows(stream, expected_header):
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != expected_header:
        raise IngestionError(f"unexpected header: {header}")
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            yield BitVector.from_text(row[0]), float(row[1])
        except (IndexError, ValueError, TrcoptError) as exc:
            raise IngestionError(f"bad row {line_no}: {row}") from exc


@dataclass
class RunConfig:
    n_bits: int
    n_initial: int
    cycles: int
    seed: int = 0
    latent_k: int = DEFAULT_LATENT_K
    maximize: bool = False
    trainer: TrainConfig = field(default_factory=TrainConfig)
    annealer: AnnealConfig = field(default_factory=AnnealConfig)

    def __post_init__(self):
        if self.n_bits < 2 or self.n_bits % 2:
            raise ConfigError(f"n_bits must be even and >= 2, got {self.n_bits}")
        if self.n_initial < 1:
            raise ConfigError("n_initial must be >= 1")
        if self.cycles < 1:
            raise ConfigError("cycles must be >= 1")


class TrcEvaluator:
    """True-simulator evaluator: decode -> transfer matrix -> solar FOM."""

    def __init__(self, tables, solar: SolarSpectrum, ideal: IdealProfile,
                 grid=None, superstrate: Material = Material.AIR):
        self.tables = tables
        self.solar = solar
        self.ideal = ideal
        self.grid = solar.spectrum.wavelengths_nm if grid is None else grid
        self.superstrate = superstrate

    def spectrum(self, x: BitVector):
        stack = decode(x, superstrate=self.superstrate)
        return transmittance(stack, self.tables, self.grid)

    def __call__(self, x: BitVector) -> float:
        return fom(self.spectrum(x), self.ideal, self.solar)


def _derive_streams(seed: int):
    """Root seed -> (seeding rng, trainer seed base, annealer seed base)."""
    state = np.random.SeedSequence(seed).generate_state(3)
    return np.random.default_rng(int(state[0])), int(state[1]), int(state[2])


def seed_dataset(cfg: RunConfig, evaluator: Evaluator,
                 rng: Optional[np.random.Generator] = None) -> Dataset:
    """Evaluate n_initial distinct uniform-random designs."""
    if cfg.n_bits <= 62 and cfg.n_initial > 2**cfg.n_bits:
        raise ConfigError(
            f"cannot draw {cfg.n_initial} distinct vectors from a "
            f"{cfg.n_bits}-bit space"
        )
    if rng is None:
        rng, _, _ = _derive_streams(cfg.seed)
    dataset = Dataset()
    attempts = 0
    limit = 1000 * cfg.n_initial
    while len(dataset) < cfg.n_initial:
        x = BitVector.random(cfg.n_bits, rng)
        if x in dataset:
            attempts += 1
            if attempts > limit:
                raise ConfigError("unable to draw enough distinct random vectors")
            continue
        dataset.append(Sample(x, float(evaluator(x))))
    return dataset


def _fresh_random(dataset: Dataset, n_bits: int, rng: np.random.Generator) -> BitVector:
    while True:
        x = BitVector.random(n_bits, rng)
        if x not in dataset:
            return x


def run(cfg: RunConfig, evaluator: Evaluator) -> Tuple[Dataset, Trajectory]:
    """Execute the full loop; deterministic given the config (incl. seed)."""
    rng, trainer_base, anneal_base = _derive_streams(cfg.seed)
    sign = -1.0 if cfg.maximize else 1.0
    try:
        dataset = seed_dataset(cfg, evaluator, rng)
    except TrcoptError as exc:
        raise RunError(f"seeding failed: {exc}") from exc

    trajectory = Trajectory()
    for cycle in range(1, cfg.cycles + 1):
        try:
            trainer_cfg = replace(cfg.trainer, seed=trainer_base + cycle)
            model = fm_train(
                dataset.bit_matrix(),
                sign * dataset.targets(),
                k=cfg.latent_k,
                cfg=trainer_cfg,
            )
            anneal_cfg = replace(cfg.annealer, seed=anneal_base + cycle)
            ranked = anneal(fm_to_qubo(model), anneal_cfg)
            candidate = next((x for x, _ in ranked if x not in dataset), None)
            if candidate is None:
                candidate = _fresh_random(dataset, cfg.n_bits, rng)
            value = float(evaluator(candidate))
            dataset.append(Sample(candidate, value))
            trajectory.append(cycle, candidate, value)
        except TrcoptError as exc:
            raise RunError(f"cycle {cycle}: {exc}") from exc
    return dataset, trajectory
