import io

import numpy as np
import pytest

from trcopt.active_learning import (
    Dataset,
    RunConfig,
    Sample,
    Trajectory,
    TrcEvaluator,
    run,
    seed_dataset,
)
from trcopt.anneal import AnnealConfig
from trcopt.encoding import BitVector
from trcopt.errors import ConfigError, DataError, IngestionError, RunError
from trcopt.fm import TrainConfig
from trcopt.fom import IdealProfile, builtin_solar
from trcopt.optics import constant_tables, default_grid

FAST = dict(
    trainer=TrainConfig(epochs=30, learning_rate=0.05, batch_size=64),
    annealer=AnnealConfig(num_reads=5, sweeps=50),
)


def count_ones(x: BitVector) -> float:
    return float(sum(x.bits))


def test_sample_rejects_non_finite():
    with pytest.raises(DataError):
        Sample(BitVector([0, 1]), np.nan)


def test_dataset_dedup_and_stats():
    dataset = Dataset()
    dataset.append(Sample(BitVector([0, 1]), 2.0))
    dataset.append(Sample(BitVector([1, 1]), -1.0))
    assert BitVector([0, 1]) in dataset
    assert BitVector([1, 0]) not in dataset
    assert len(dataset) == 2
    assert dataset.min_fom() == -1.0
    assert dataset.best().x == BitVector([1, 1])
    with pytest.raises(DataError):
        dataset.append(Sample(BitVector([0, 1]), 5.0))


def test_dataset_matrices():
    dataset = Dataset([Sample(BitVector([0, 1]), 2.0), Sample(BitVector([1, 0]), 3.0)])
    assert np.array_equal(dataset.bit_matrix(), [[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(dataset.targets(), [2.0, 3.0])


def test_dataset_csv_round_trip():
    dataset = Dataset([Sample(BitVector([0, 1, 1, 0]), 2.25), Sample(BitVector([1, 0, 0, 0]), -0.5)])
    buffer = io.StringIO()
    dataset.save_csv(buffer)
    buffer.seek(0)
    loaded = Dataset.load_csv(buffer)
    assert [s.x for s in loaded] == [s.x for s in dataset]
    assert [s.fom for s in loaded] == [s.fom for s in dataset]


def test_trajectory_round_trip_and_running_min():
    traj = Trajectory()
    traj.append(1, BitVector([0, 1]), 3.0)
    traj.append(2, BitVector([1, 1]), 5.0)
    traj.append(3, BitVector([1, 0]), 1.0)
    assert np.array_equal(traj.running_min(), [3.0, 3.0, 1.0])
    buffer = io.StringIO()
    traj.save_csv(buffer)
    buffer.seek(0)
    loaded = Trajectory.load_csv(buffer)
    assert loaded.cycles == traj.cycles
    assert loaded.foms == traj.foms
    assert loaded.vectors == traj.vectors


def test_trajectory_load_rejects_bad_header():
    with pytest.raises(IngestionError):
        Trajectory.load_csv(io.StringIO("cycle,fom\n1,2.0\n"))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_bits=7, n_initial=5, cycles=10),
        dict(n_bits=0, n_initial=5, cycles=10),
        dict(n_bits=8, n_initial=0, cycles=10),
        dict(n_bits=8, n_initial=5, cycles=0),
    ],
)
def test_run_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_seed_dataset_counts_and_determinism():
    cfg = RunConfig(n_bits=10, n_initial=8, cycles=1, seed=3, **FAST)
    a = seed_dataset(cfg, count_ones)
    b = seed_dataset(cfg, count_ones)
    assert len(a) == 8
    assert len({s.x for s in a}) == 8
    assert [s.x for s in a] == [s.x for s in b]
    for sample in a:
        assert sample.fom == count_ones(sample.x)


def test_seed_dataset_pigeonhole():
    cfg = RunConfig(n_bits=2, n_initial=5, cycles=1, **FAST)
    with pytest.raises(ConfigError):
        seed_dataset(cfg, count_ones)


def test_run_grows_dataset_and_tracks_trajectory():
    cfg = RunConfig(n_bits=8, n_initial=5, cycles=10, seed=1, **FAST)
    dataset, traj = run(cfg, count_ones)
    assert len(dataset) == 15
    assert len(traj) == 10
    assert traj.cycles == list(range(1, 11))
    assert len({s.x for s in dataset}) == 15
    rm = traj.running_min()
    assert np.all(np.diff(rm) <= 0)


def test_run_minimizes_count_objective():
    cfg = RunConfig(n_bits=10, n_initial=6, cycles=15, seed=2, **FAST)
    dataset, _ = run(cfg, count_ones)
    assert dataset.min_fom() <= 1.0  # near the all-zeros optimum


def test_run_maximize_flag():
    cfg = RunConfig(n_bits=10, n_initial=6, cycles=15, seed=2, maximize=True, **FAST)
    dataset, _ = run(cfg, count_ones)
    assert max(s.fom for s in dataset) >= 9.0


def test_run_is_deterministic():
    cfg = RunConfig(n_bits=8, n_initial=4, cycles=6, seed=7, **FAST)
    _, a = run(cfg, count_ones)
    _, b = run(cfg, count_ones)
    assert a.vectors == b.vectors
    assert a.foms == b.foms


def test_run_seeds_differ():
    base = dict(n_bits=12, n_initial=6, cycles=6, **FAST)
    _, a = run(RunConfig(seed=1, **base), count_ones)
    _, b = run(RunConfig(seed=2, **base), count_ones)
    assert a.vectors != b.vectors


def test_seeding_failure_is_wrapped():
    cfg = RunConfig(n_bits=8, n_initial=3, cycles=2, **FAST)
    with pytest.raises(RunError, match="seeding failed"):
        run(cfg, lambda x: float("nan"))


def test_cycle_failure_reports_cycle_number():
    calls = []

    def flaky(x):
        calls.append(x)
        return float("nan") if len(calls) > 3 else count_ones(x)

    cfg = RunConfig(n_bits=8, n_initial=3, cycles=5, **FAST)
    with pytest.raises(RunError, match="cycle 1"):
        run(cfg, flaky)


def test_trc_evaluator_end_to_end():
    grid = default_grid()
    evaluator = TrcEvaluator(constant_tables(), builtin_solar(grid), IdealProfile(), grid)
    x = BitVector.random(12, np.random.default_rng(0))
    value = evaluator(x)
    assert np.isfinite(value)
    spec = evaluator.spectrum(x)
    assert spec.wavelengths_nm.shape == grid.shape
    assert np.all((spec.values >= 0.0) & (spec.values <= 1.0))
