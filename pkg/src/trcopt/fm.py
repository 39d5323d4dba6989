"""Second-order factorization machine surrogate and its lossless QUBO export.

The model is

    y(x) = w0 + sum_i w_i x_i
         + 1/2 sum_f [ (sum_i v_if x_i)^2 - sum_i v_if^2 x_i^2 ]

which on binary inputs (x_i^2 = x_i) is exactly a QUBO with Q_ii = w_i,
Q_ij = <v_i, v_j> for i < j, plus the constant w0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .encoding import BitVector
from .errors import DataError, DimensionError, IngestionError, TrainingError
from .qubo import Qubo

DEFAULT_LATENT_K = 4


@dataclass
class FmModel:
    w0: float
    w: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if self.w.ndim != 1 or self.v.ndim != 2 or self.v.shape[0] != self.w.shape[0]:
            raise DimensionError(
                f"inconsistent parameter shapes w{self.w.shape} v{self.v.shape}"
            )
        if not (np.isfinite(self.w0) and np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.v))):
            raise DataError("model parameters must be finite")

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def k(self) -> int:
        return self.v.shape[1]


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 300
    init_scale: float = 0.1
    seed: int = 0
    regularization: float = 1e-6
    batch_size: int = 32
    optimizer: str = "adam"  # "adam" or "sgd"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise TrainingError("learning rate must be positive")
        if self.epochs < 1:
            raise TrainingError("epochs must be >= 1")
        if self.init_scale <= 0:
            raise TrainingError("init scale must be positive")
        if self.regularization < 0:
            raise TrainingError("regularization must be non-negative")
        if self.batch_size < 1:
            raise TrainingError("batch size must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise TrainingError(f"unknown optimizer {self.optimizer!r}")


def predict_batch(model: FmModel, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.shape[1] != model.n:
        raise DimensionError(f"batch width {xs.shape[1]} != model size {model.n}")
    xv = xs @ model.v
    interact = 0.5 * (np.square(xv).sum(axis=1) - (np.square(xs) @ np.square(model.v)).sum(axis=1))
    return model.w0 + xs @ model.w + interact


def fm_predict(model: FmModel, x: BitVector) -> float:
    if len(x) != model.n:
        raise DimensionError(f"vector length {len(x)} != model size {model.n}")
    return float(predict_batch(model, x.to_array()[None, :])[0])


def loss_gradients(model: FmModel, xs: np.ndarray, ys: np.ndarray):
    """Gradients of the mean squared error over the batch (no regularization).

    Returns (g_w0, g_w, g_v).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    m = xs.shape[0]
    residual = predict_batch(model, xs) - ys
    xv = xs @ model.v
    g_w0 = 2.0 * residual.mean()
    g_w = 2.0 * (xs.T @ residual) / m
    # d y / d v_if = x_i * ((x V)_f - v_if x_i); binary x has x^2 = x.
    g_v = 2.0 * (
        xs.T @ (residual[:, None] * xv) - model.v * ((np.square(xs).T @ residual)[:, None])
    ) / m
    return g_w0, g_w, g_v


def initial_model(n: int, k: int, cfg: TrainConfig) -> FmModel:
    """Zero bias/linear terms; latent factors ~ Normal(0, init_scale^2)."""
    rng = np.random.default_rng(cfg.seed)
    return FmModel(w0=0.0, w=np.zeros(n), v=cfg.init_scale * rng.standard_normal((n, k)))


def fm_train(
    xs: np.ndarray,
    ys: np.ndarray,
    k: int = DEFAULT_LATENT_K,
    cfg: Optional[TrainConfig] = None,
    warm_start: Optional[FmModel] = None,
) -> FmModel:
    """Mini-batch gradient training on squared error with L2 regularization.

    Optimizer is Adam by default (plain SGD available via cfg.optimizer);
    deterministic given (data, cfg): initialization and batch shuffling both
    derive from ``cfg.seed``.
    """
    cfg = cfg or TrainConfig()
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise TrainingError("training set must be a non-empty 2-d array")
    if ys.shape != (xs.shape[0],):
        raise DimensionError(f"target shape {ys.shape} != ({xs.shape[0]},)")
    if not np.all(np.isfinite(ys)) or not np.all(np.isfinite(xs)):
        raise DataError("training data contains non-finite values")
    n = xs.shape[1]

    if warm_start is not None:
        if warm_start.n != n or warm_start.k != k:
            raise DimensionError("warm-start model shape mismatch")
        model = FmModel(warm_start.w0, warm_start.w.copy(), warm_start.v.copy())
    else:
        model = initial_model(n, k, cfg)

    rng = np.random.default_rng(cfg.seed + 1)
    m = xs.shape[0]
    lam = cfg.regularization
    lr = cfg.learning_rate
    adam = cfg.optimizer == "adam"
    if adam:
        moment1 = [0.0, np.zeros_like(model.w), np.zeros_like(model.v)]
        moment2 = [0.0, np.zeros_like(model.w), np.zeros_like(model.v)]
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(m)
        for start in range(0, m, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            g_w0, g_w, g_v = loss_gradients(model, xs[batch], ys[batch])
            g_w = g_w + 2.0 * lam * model.w
            g_v = g_v + 2.0 * lam * model.v
            if adam:
                step += 1
                scale = lr * np.sqrt(1.0 - beta2**step) / (1.0 - beta1**step)
                updates = []
                for slot, grad in enumerate((g_w0, g_w, g_v)):
                    moment1[slot] = beta1 * moment1[slot] + (1.0 - beta1) * grad
                    moment2[slot] = beta2 * moment2[slot] + (1.0 - beta2) * grad * grad
                    updates.append(
                        scale * moment1[slot] / (np.sqrt(moment2[slot]) + eps)
                    )
                model.w0 -= updates[0]
                model.w -= updates[1]
                model.v -= updates[2]
            else:
                model.w0 -= lr * g_w0
                model.w -= lr * g_w
                model.v -= lr * g_v
    return model


def fm_to_qubo(model: FmModel) -> Qubo:
    """Exact translation: Q_ii = w_i, Q_ij = <v_i, v_j> (i < j), offset = w0."""
    gram = model.v @ model.v.T
    q = np.triu(gram, 1) + np.diag(model.w)
    return Qubo(q, offset=model.w0)


def save_model(model: FmModel, stream: IO[str]) -> None:
    """Flat text schema: 'n k', 'w0 <value>', one 'w <value>' line per linear
    coefficient, one 'v <k values>' line per latent row. Round-trips exactly."""
    stream.write(f"{model.n} {model.k}\n")
    stream.write(f"w0 {model.w0!r}\n")
    for value in model.w:
        stream.write(f"w {float(value)!r}\n")
    for row in model.v:
        stream.write("v " + " ".join(repr(float(value)) for value in row) + "\n")


def load_model(stream: IO[str]) -> FmModel:
    lines = [line.strip() for line in stream if line.strip()]
    try:
        n, k = (int(t) for t in lines[0].split())
        w0 = float(lines[1].split()[1])
        w = np.array([float(line.split()[1]) for line in lines[2 : 2 + n]])
        v = np.array(
            [[float(t) for t in line.split()[1:]] for line in lines[2 + n : 2 + 2 * n]]
        )
        if w.shape != (n,) or v.shape != (n, k):
            raise ValueError(f"shape mismatch: w{w.shape} v{v.shape}")
    except (IndexError, ValueError) as exc:
        raise IngestionError(f"malformed model file: {exc}") from exc
    return FmModel(w0=w0, w=w, v=v)
