"""Mini-batch SGD training with momentum and best-validation selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericalError, TrainingDivergedError
from .features import EncodedPatient
from .network import RiskEncoder
from .wcph import WeibullCoxHead


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.005
    momentum: float = 0.9
    epochs: int = 35
    batch_size: int = 16
    seed: int = 0
    val_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.lr < 0:
            raise ConfigError("lr must be >= 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("momentum must be in [0, 1)")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "lr": self.lr,
            "momentum": self.momentum,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "val_fraction": self.val_fraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(
            lr=float(d.get("lr", 0.005)),
            momentum=float(d.get("momentum", 0.9)),
            epochs=int(d.get("epochs", 35)),
            batch_size=int(d.get("batch_size", 16)),
            seed=int(d.get("seed", 0)),
            val_fraction=float(d.get("val_fraction", 0.2)),
        )


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    best_val_nll: float = math.inf


def split_indices(n: int, val_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic shuffled split; the validation block is the tail."""
    perm = np.random.default_rng(np.random.SeedSequence([seed, 0xA11])).permutation(n)
    n_val = max(1, int(round(n * val_fraction)))
    if n_val >= n:
        raise ConfigError("validation split would swallow every sample")
    return perm[: n - n_val], perm[n - n_val :]


class SGDMomentum:
    def __init__(self, params: dict[str, np.ndarray], lr: float, momentum: float):
        self.lr = lr
        self.momentum = momentum
        self.velocity = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        for k, p in params.items():
            v = self.velocity[k]
            v *= self.momentum
            v += grads[k]
            p -= self.lr * v


def mean_nll(
    encoder: RiskEncoder,
    head: WeibullCoxHead,
    samples: list[EncodedPatient],
    times: np.ndarray,
    deltas: np.ndarray,
    idx: np.ndarray,
) -> float:
    scores = np.array([encoder.forward(samples[i])[0] for i in idx])
    return float(np.mean(head.nll(scores, times[idx], deltas[idx])))


def train(
    encoder: RiskEncoder,
    head: WeibullCoxHead,
    samples: list[EncodedPatient],
    times: np.ndarray,
    deltas: np.ndarray,
    config: TrainConfig,
) -> TrainResult:
    """Optimize encoder and head jointly; keep the best-validation weights.

    Raises TrainingDivergedError naming the epoch and batch at the first
    non-finite loss.
    """
    times = np.asarray(times, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    train_idx, val_idx = split_indices(len(samples), config.val_fraction, config.seed)
    params = {**encoder.params(), **{f"wcph.{k}": v for k, v in head.p.items()}}
    grads = {**encoder.grads(), **{f"wcph.{k}": v for k, v in head.g.items()}}
    opt = SGDMomentum(params, config.lr, config.momentum)

    result = TrainResult()
    best: dict[str, np.ndarray] = {}
    for epoch in range(config.epochs):
        order = np.random.default_rng(
            np.random.SeedSequence([config.seed, 1 + epoch])
        ).permutation(train_idx)
        for b, start in enumerate(range(0, len(order), config.batch_size)):
            batch = order[start : start + config.batch_size]
            encoder.zero_grad()
            head.zero_grad()
            scores = np.empty(len(batch))
            caches = []
            for j, i in enumerate(batch):
                scores[j], cache = encoder.forward(samples[i])
                caches.append(cache)
            try:
                loss, ds = head.nll_and_grad(scores, times[batch], deltas[batch])
            except NumericalError as exc:
                raise TrainingDivergedError(epoch=epoch, batch=b) from exc
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch=epoch, batch=b)
            for j in range(len(batch)):
                encoder.backward(float(ds[j]), caches[j])
            opt.step(params, grads)

        train_nll = mean_nll(encoder, head, samples, times, deltas, train_idx)
        val_nll = mean_nll(encoder, head, samples, times, deltas, val_idx)
        result.history.append({"epoch": epoch, "train_nll": train_nll, "val_nll": val_nll})
        if val_nll < result.best_val_nll:
            result.best_val_nll = val_nll
            result.best_epoch = epoch
            best = {k: v.copy() for k, v in params.items()}

    if best:
        for k, v in params.items():
            v[...] = best[k]
    return result
