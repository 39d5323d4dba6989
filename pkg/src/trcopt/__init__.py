"""Active-learning optimization of binary-encoded multilayer window stacks.

Pipeline: factorization-machine surrogate -> lossless QUBO export ->
simulated annealing -> transfer-matrix optics -> solar-weighted figure of
merit, iterated; plus regression-based convergence analysis of the
resulting FOM trajectories.
"""
from .anneal import KERNEL, AnnealConfig, anneal
from .active_learning import (
    Dataset,
    RunConfig,
    Sample,
    Trajectory,
    TrcEvaluator,
    run,
    seed_dataset,
)
from .convergence import (
    ConvergenceReport,
    RegressionCurve,
    fit_averaged_piecewise,
    fit_piecewise,
    fit_polynomial,
    initiation_point,
)
from .encoding import BitVector, LayerStack, Material, decode, encode
from .fm import FmModel, TrainConfig, fm_predict, fm_to_qubo, fm_train
from .fom import IdealProfile, SolarSpectrum, builtin_solar, fom, load_solar_spectrum
from .optics import (
    MaterialTable,
    Spectrum,
    builtin_tables,
    constant_tables,
    default_grid,
    load_material_table,
    transmittance,
)
from .qubo import Qubo, brute_force_min, qubo_energy

__version__ = "0.1.0"
