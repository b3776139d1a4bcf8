"""Deterministic splits, Adam, and the early-stopping training loop.

All randomness (the three-way split, per-epoch batch order) comes from the
splitmix64 stream, so a (data, seed) pair fixes the split indices and the
visit order exactly. Training-loss trajectories are still floating-point
artifacts of this implementation; splits and initial weights are the
reproducible contract.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import ndgrad
from .errors import DataError, NumericError
from .rng import SplitMix64

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitResult:
    """Disjoint row indices; test is carved first, then validation."""

    train: tuple
    validation: tuple
    test: tuple


def split_dataset(n: int, seed: int) -> SplitResult:
    """Shuffle 0..n-1 (Fisher-Yates over the seeded stream); the first
    floor(0.2 n) indices become the test set and the next
    floor(0.2 (n - |test|)) the validation set."""
    if n < 5:
        raise DataError(f"need at least 5 rows to split, got {n}")
    indices = list(range(n))
    SplitMix64(seed).shuffle(indices)
    n_test = int(0.2 * n)
    n_val = int(0.2 * (n - n_test))
    return SplitResult(
        train=tuple(indices[n_test + n_val :]),
        validation=tuple(indices[n_test : n_test + n_val]),
        test=tuple(indices[:n_test]),
    )


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 25
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    patience: int = 2
    seed: int = 42

    def __post_init__(self):
        for name in ("max_epochs", "batch_size", "learning_rate", "patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.patience >= self.max_epochs:
            raise ValueError("patience must be smaller than max_epochs")


@dataclass
class History:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    val_accuracy: list = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
            "stopped_epoch": self.stopped_epoch,
            "best_epoch": self.best_epoch,
        }


class Adam:
    """Adam with bias correction; one step consumes the current grads."""

    def __init__(self, named_params, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self._named = list(named_params)
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(t.values) for _, t in self._named]
        self._v = [np.zeros_like(t.values) for _, t in self._named]

    def step(self):
        self.t += 1
        correct1 = 1.0 - self.beta1**self.t
        correct2 = 1.0 - self.beta2**self.t
        for (name, p), m, v in zip(self._named, self._m, self._v):
            grad = p.grad
            if grad is None:
                continue
            if not np.isfinite(grad).all():
                raise NumericError(f"non-finite gradient in tensor {name!r}")
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            m_hat = m / correct1
            v_hat = v / correct2
            p.values -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self):
        for _, p in self._named:
            p.zero_grad()


def early_stop_check(val_losses, patience: int = 2):
    """(stop, best_index): stop when the last `patience` epochs all failed
    to strictly improve on the running minimum before them. The first epoch
    counts as no improvement (there is nothing to improve on); best_index
    is the argmin, first occurrence on ties."""
    if not val_losses:
        raise DataError("early_stop_check needs at least one loss value")
    best_index = 0
    for i, loss in enumerate(val_losses):
        if loss < val_losses[best_index]:
            best_index = i
    if len(val_losses) < patience:
        return False, best_index
    running_min = np.inf
    stalled = []
    for loss in val_losses:
        stalled.append(not loss < running_min)
        running_min = min(running_min, loss)
    stalled[0] = True
    return all(stalled[-patience:]), best_index


def _bce_values(scores: np.ndarray, labels: np.ndarray) -> float:
    p = np.clip(scores, ndgrad.BCE_EPS, 1.0 - ndgrad.BCE_EPS)
    return float(-(labels * np.log(p) + (1 - labels) * np.log1p(-p)).mean())


def _evaluate(forward_fn, ids, numeric, chunk=256) -> np.ndarray:
    parts = []
    for start in range(0, ids.shape[0], chunk):
        out = forward_fn(ids[start : start + chunk], numeric[start : start + chunk])
        parts.append(out.values[:, 0])
    return np.concatenate(parts)


def train(named_params, forward_fn, train_data, val_data, cfg: TrainConfig) -> History:
    """Mini-batch Adam with early stopping on validation loss.

    Shuffles the training indices each epoch with fresh splitmix64 draws,
    minimizes mean binary cross-entropy, and restores the parameters of
    the best-validation-loss epoch before returning.
    """
    ids, numeric, labels = train_data
    ids_val, numeric_val, labels_val = val_data
    if ids.shape[0] == 0 or ids_val.shape[0] == 0:
        raise DataError("training and validation splits must be nonempty")

    rng = SplitMix64(cfg.seed)
    adam = Adam(
        named_params,
        learning_rate=cfg.learning_rate,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        eps=cfg.eps,
    )
    history = History()
    order = list(range(ids.shape[0]))
    best_loss = np.inf
    best_snapshot = None

    for epoch in range(1, cfg.max_epochs + 1):
        rng.shuffle(order)
        batch_losses = []
        with ndgrad.gc_paused():
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                adam.zero_grad()
                try:
                    with ndgrad.Graph() as g:
                        probs = forward_fn(ids[batch], numeric[batch])
                        loss = ndgrad.bce_loss(probs, labels[batch].reshape(-1, 1))
                    ndgrad.backward(g, loss)
                    adam.step()
                except NumericError as exc:
                    raise NumericError(
                        f"epoch {epoch}, batch at offset {start}: {exc}"
                    ) from exc
                batch_losses.append(loss.item())

        history.train_loss.append(float(np.mean(batch_losses)))
        val_scores = _evaluate(forward_fn, ids_val, numeric_val)
        val_loss = _bce_values(val_scores, labels_val)
        history.val_loss.append(val_loss)
        history.val_accuracy.append(float(((val_scores >= 0.5) == labels_val).mean()))
        logger.info(
            "epoch %d: train_loss=%.4f val_loss=%.4f val_acc=%.4f",
            epoch, history.train_loss[-1], val_loss, history.val_accuracy[-1],
        )

        if val_loss < best_loss:
            best_loss = val_loss
            best_snapshot = {name: t.values.copy() for name, t in named_params}
        stop, best_index = early_stop_check(history.val_loss, cfg.patience)
        history.stopped_epoch = epoch
        history.best_epoch = best_index + 1
        if stop:
            logger.info("early stop at epoch %d (best epoch %d)", epoch, best_index + 1)
            break

    if best_snapshot is not None:
        for name, t in named_params:
            t.values[...] = best_snapshot[name]
    return history
