"""Command-line interface: run, sweep, analyze."""
from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import click

from .active_learning import RunConfig, Trajectory, run as run_loop
from .config import (
    AnalysisConfig,
    DATA_DIR_ENV,
    RunSpec,
    SweepSpec,
    default_out_dir,
    load_run_spec,
    load_sweep_spec,
)
from .convergence import analyze as analyze_trajectory
from .errors import TrcoptError


def _run_dir_name(cfg: RunConfig) -> str:
    return f"n{cfg.n_bits}_N{cfg.n_initial}_seed{cfg.seed}"


def execute_run(spec: RunSpec, out_dir: str) -> dict:
    """Run one active-learning loop and persist all artifacts.

    Returns a small summary dict (paths, best FOM, initiation cycle).
    """
    evaluator = spec.evaluator()
    dataset, trajectory = run_loop(spec.run, evaluator)
    curve, report = analyze_trajectory(
        trajectory,
        spec.analysis.method,
        threshold=spec.analysis.threshold,
        degree=spec.analysis.degree,
        pieces=spec.analysis.pieces,
    )

    run_dir = os.path.join(out_dir, _run_dir_name(spec.run))
    os.makedirs(run_dir, exist_ok=True)
    with open(os.path.join(run_dir, "trajectory.csv"), "w") as handle:
        trajectory.save_csv(handle)
    with open(os.path.join(run_dir, "dataset.csv"), "w") as handle:
        dataset.save_csv(handle)
    with open(os.path.join(run_dir, "curve.csv"), "w") as handle:
        curve.save_csv(handle)
    with open(os.path.join(run_dir, "report.csv"), "w") as handle:
        report.save_csv(handle)

    best = dataset.best()
    with open(os.path.join(run_dir, "best_design.csv"), "w") as handle:
        handle.write("bitstring,fom\n")
        handle.write(f"{best.x.to_text()},{best.fom!r}\n")
    with open(os.path.join(run_dir, "spectrum.csv"), "w") as handle:
        evaluator.spectrum(best.x).save_csv(handle)

    return {
        "dir": run_dir,
        "best_fom": best.fom,
        "initiation_cycle": report.initiation_cycle,
    }


def _sweep_cell(args) -> tuple:
    """Worker for one sweep cell; returns (n, N0, seed, result-or-error)."""
    spec, out_dir = args
    try:
        summary = execute_run(spec, out_dir)
        return (*_cell_key(spec), summary["initiation_cycle"], None)
    except TrcoptError as exc:
        return (*_cell_key(spec), None, str(exc))


def _cell_key(spec: RunSpec) -> tuple:
    return spec.run.n_bits, spec.run.n_initial, spec.run.seed


def _cell_spec(sweep: SweepSpec, n_bits: int, n_initial: int, seed: int) -> RunSpec:
    run_cfg = RunConfig(
        n_bits=n_bits,
        n_initial=n_initial,
        cycles=sweep.cycles,
        seed=seed,
        trainer=replace(sweep.trainer),
        annealer=replace(sweep.annealer),
    )
    analysis = AnalysisConfig(method="averaged", threshold=sweep.threshold_for(n_bits))
    return RunSpec(run=run_cfg, optics=sweep.optics, fom=sweep.fom, analysis=analysis)


def execute_sweep(sweep: SweepSpec, out_dir: str, workers: int = 1):
    """Run every cell; returns (rows, failures).

    rows: (n_bits, n_initial, seed, initiation_cycle-or-None), sorted.
    """
    jobs = [
        (_cell_spec(sweep, n_bits, n_initial, seed), out_dir)
        for n_bits, n_initial, seed in sweep.cells()
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_cell, jobs))
    else:
        results = [_sweep_cell(job) for job in jobs]

    results.sort(key=lambda item: item[:3])
    rows = [item[:4] for item in results if item[4] is None]
    failures = [(item[:3], item[4]) for item in results if item[4] is not None]

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "summary.csv"), "w") as handle:
        handle.write("n_bits,n_initial,seed,initiation_cycle\n")
        for n_bits, n_initial, seed, initiation in rows:
            cell = "none" if initiation is None else str(initiation)
            handle.write(f"{n_bits},{n_initial},{seed},{cell}\n")
    if failures:
        with open(os.path.join(out_dir, "failures.csv"), "w") as handle:
            handle.write("n_bits,n_initial,seed,error\n")
            for (n_bits, n_initial, seed), message in failures:
                handle.write(f"{n_bits},{n_initial},{seed},{message!r}\n")
    return rows, failures


@click.group()
def main():
    """Active-learning optimizer for binary multilayer window stacks."""


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default=None, help=f"Output directory (default ${DATA_DIR_ENV} or ./trcopt-out).")
@click.option("--seed", type=int, default=None, help="Override the run seed.")
@click.option("--threshold", type=float, default=None, help="Override the analysis threshold.")
def cmd_run(config_path, out_dir, seed, threshold):
    """Execute one active-learning run from a YAML config."""
    try:
        spec = load_run_spec(config_path)
        if seed is not None:
            spec.run.seed = seed
        if threshold is not None:
            spec.analysis.threshold = threshold
        summary = execute_run(spec, out_dir or default_out_dir())
    except TrcoptError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    initiation = summary["initiation_cycle"]
    click.echo(f"run complete: {summary['dir']}")
    click.echo(f"best FOM: {summary['best_fom']:.6g}")
    click.echo(f"initiation cycle: {'none' if initiation is None else initiation}")


@main.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default=None)
@click.option("--workers", type=int, default=1, show_default=True)
def cmd_sweep(config_path, out_dir, workers):
    """Run a sizes x initial-data sweep and aggregate initiation points."""
    try:
        sweep = load_sweep_spec(config_path)
        rows, failures = execute_sweep(sweep, out_dir or default_out_dir(), workers)
    except TrcoptError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"sweep complete: {len(rows)} cells ok, {len(failures)} failed")
    if failures:
        for (n_bits, n_initial, seed), message in failures:
            click.echo(f"failed cell n={n_bits} N0={n_initial} seed={seed}: {message}", err=True)
        sys.exit(1)


@main.command("analyze")
@click.argument("trajectory_csv", type=click.Path(exists=True))
@click.option("--method", default="averaged", show_default=True,
              help="poly, poly-<d>, pw, pw-<p>, or averaged.")
@click.option("--degree", type=int, default=3, show_default=True)
@click.option("--pieces", type=int, default=5, show_default=True)
@click.option("--threshold", type=float, default=-3.0, show_default=True)
@click.option("--out", "out_dir", default=None, help="Directory for curve/report CSVs (default: alongside the input).")
def cmd_analyze(trajectory_csv, method, degree, pieces, threshold, out_dir):
    """Re-analyze a stored trajectory CSV."""
    try:
        with open(trajectory_csv) as handle:
            trajectory = Trajectory.load_csv(handle)
        curve, report = analyze_trajectory(
            trajectory, method, threshold=threshold, degree=degree, pieces=pieces
        )
    except (TrcoptError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    out_dir = out_dir or os.path.dirname(os.path.abspath(trajectory_csv))
    os.makedirs(out_dir, exist_ok=True)
    curve_path = os.path.join(out_dir, f"{curve.method}_curve.csv")
    report_path = os.path.join(out_dir, f"{curve.method}_report.csv")
    with open(curve_path, "w") as handle:
        curve.save_csv(handle)
    with open(report_path, "w") as handle:
        report.save_csv(handle)
    initiation = report.initiation_cycle
    click.echo(f"wrote {curve_path} and {report_path}")
    click.echo(f"initiation cycle: {'none' if initiation is None else initiation}")


if __name__ == "__main__":
    main()
