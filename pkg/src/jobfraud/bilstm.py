"""Dual-input bidirectional LSTM classifier.

Token ids pass through a trainable embedding and two independent LSTM
passes (left-to-right and right-to-left); the two final hidden states are
concatenated, merged with the numeric feature vector, and fed through one
ReLU dense layer into a single sigmoid output. PAD positions are processed
like ordinary tokens; there is no masking and no dropout.
"""

from dataclasses import dataclass

import numpy as np

from . import ndgrad, trainer
from .base import Estimator, check_labels, check_matrix
from .errors import ShapeError
from .ndgrad import Tensor
from .rng import SplitMix64


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    embedding_dim: int = 32
    hidden_units: int = 64
    dense_units: int = 64
    sequence_length: int = 256
    numeric_width: int = 4
    seed: int = 42

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if name != "seed" and value < 1:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass
class LstmParams:
    """One direction's weights; gate blocks along the first axis are
    (input, forget, candidate, output), each `hidden` rows."""

    wx: Tensor  # (4H, E)
    wh: Tensor  # (4H, H)
    bias: Tensor  # (4H,)


@dataclass
class ModelParams:
    embedding: Tensor  # (V, E)
    forward_lstm: LstmParams
    backward_lstm: LstmParams
    dense_w: Tensor  # (2H + D, U)
    dense_b: Tensor  # (U,)
    out_w: Tensor  # (U, 1)
    out_b: Tensor  # (1,)

    def named_tensors(self) -> list:
        """Canonical (name, tensor) order; also the serialization order."""
        return [
            ("embedding", self.embedding),
            ("forward_lstm.wx", self.forward_lstm.wx),
            ("forward_lstm.wh", self.forward_lstm.wh),
            ("forward_lstm.bias", self.forward_lstm.bias),
            ("backward_lstm.wx", self.backward_lstm.wx),
            ("backward_lstm.wh", self.backward_lstm.wh),
            ("backward_lstm.bias", self.backward_lstm.bias),
            ("dense_w", self.dense_w),
            ("dense_b", self.dense_b),
            ("out_w", self.out_w),
            ("out_b", self.out_b),
        ]

    def tensors(self) -> list:
        return [t for _, t in self.named_tensors()]


def parameter_count(cfg: ModelConfig) -> int:
    v, e, h = cfg.vocab_size, cfg.embedding_dim, cfg.hidden_units
    u, d = cfg.dense_units, cfg.numeric_width
    return v * e + 2 * (4 * h * e + 4 * h * h + 4 * h) + (2 * h + d) * u + u + u + 1


def _draw_uniform(rng: SplitMix64, shape, bound: float) -> np.ndarray:
    size = int(np.prod(shape))
    vals = np.fromiter((rng.uniform(-bound, bound) for _ in range(size)), np.float64, size)
    return vals.reshape(shape)


def _glorot(rng: SplitMix64, rows: int, cols: int) -> Tensor:
    bound = np.sqrt(6.0 / (rows + cols))
    return ndgrad.param(_draw_uniform(rng, (rows, cols), bound))


def _lstm_bias(hidden: int) -> Tensor:
    bias = np.zeros(4 * hidden)
    bias[hidden : 2 * hidden] = 1.0  # forget gate starts open
    return ndgrad.param(bias)


def init_params(cfg: ModelConfig) -> ModelParams:
    """Glorot-uniform weights from one seeded stream, zero biases except a
    +1 forget-gate block.

    Matrices are drawn row-major in a fixed order (embedding, forward wx,
    forward wh, backward wx, backward wh, dense, output) so a seed pins
    every initial weight.
    """
    rng = SplitMix64(cfg.seed)
    e, h = cfg.embedding_dim, cfg.hidden_units
    embedding = ndgrad.param(_draw_uniform(rng, (cfg.vocab_size, e), 0.05))
    directions = []
    for _ in range(2):
        wx = _glorot(rng, 4 * h, e)
        wh = _glorot(rng, 4 * h, h)
        directions.append(LstmParams(wx=wx, wh=wh, bias=_lstm_bias(h)))
    dense_w = _glorot(rng, 2 * h + cfg.numeric_width, cfg.dense_units)
    dense_b = ndgrad.param(np.zeros(cfg.dense_units))
    out_w = _glorot(rng, cfg.dense_units, 1)
    out_b = ndgrad.param(np.zeros(1))
    return ModelParams(
        embedding=embedding,
        forward_lstm=directions[0],
        backward_lstm=directions[1],
        dense_w=dense_w,
        dense_b=dense_b,
        out_w=out_w,
        out_b=out_b,
    )


def empty_params(cfg: ModelConfig) -> ModelParams:
    """Zero-valued trainable tensors with the model's shapes."""
    e, h = cfg.embedding_dim, cfg.hidden_units
    u, d = cfg.dense_units, cfg.numeric_width

    def zeros(*shape):
        return ndgrad.param(np.zeros(shape))

    return ModelParams(
        embedding=zeros(cfg.vocab_size, e),
        forward_lstm=LstmParams(wx=zeros(4 * h, e), wh=zeros(4 * h, h), bias=zeros(4 * h)),
        backward_lstm=LstmParams(wx=zeros(4 * h, e), wh=zeros(4 * h, h), bias=zeros(4 * h)),
        dense_w=zeros(2 * h + d, u),
        dense_b=zeros(u),
        out_w=zeros(u, 1),
        out_b=zeros(1),
    )


def params_from_arrays(cfg: ModelConfig, lookup) -> ModelParams:
    """Rebuild ModelParams from stored arrays, validating every shape.

    `lookup` maps the canonical tensor names to ndarrays.
    """
    params = empty_params(cfg)
    for name, tensor in params.named_tensors():
        stored = np.asarray(lookup(name), dtype=np.float64)
        if stored.shape != tensor.values.shape:
            raise ShapeError(
                f"tensor {name!r} has shape {stored.shape}, expected {tensor.values.shape}"
            )
        tensor.values[...] = stored
    return params


# --------------------------------------------------------------------------
# Forward computation
# --------------------------------------------------------------------------

def _step(x_t, h_prev, c_prev, wx_t, wh_t, bias, hidden):
    z = ndgrad.add(ndgrad.add(ndgrad.matmul(x_t, wx_t), ndgrad.matmul(h_prev, wh_t)), bias)
    gate_in = ndgrad.sigmoid(ndgrad.slice_columns(z, 0, hidden))
    gate_forget = ndgrad.sigmoid(ndgrad.slice_columns(z, hidden, 2 * hidden))
    candidate = ndgrad.tanh(ndgrad.slice_columns(z, 2 * hidden, 3 * hidden))
    gate_out = ndgrad.sigmoid(ndgrad.slice_columns(z, 3 * hidden, 4 * hidden))
    c_t = ndgrad.add(
        ndgrad.multiply(gate_forget, c_prev), ndgrad.multiply(gate_in, candidate)
    )
    h_t = ndgrad.multiply(gate_out, ndgrad.tanh(c_t))
    return h_t, c_t


def lstm_cell(x_t: Tensor, h_prev: Tensor, c_prev: Tensor, params: LstmParams):
    """One recurrence step; accepts single vectors or row batches."""
    hidden = params.wh.shape[1]
    single = x_t.values.ndim == 1
    if single:
        x_t = ndgrad.reshape(x_t, (1, -1))
        h_prev = ndgrad.reshape(h_prev, (1, -1))
        c_prev = ndgrad.reshape(c_prev, (1, -1))
    h_t, c_t = _step(
        x_t, h_prev, c_prev,
        ndgrad.transpose(params.wx), ndgrad.transpose(params.wh), params.bias, hidden,
    )
    if single:
        h_t = ndgrad.reshape(h_t, (-1,))
        c_t = ndgrad.reshape(c_t, (-1,))
    return h_t, c_t


def _run_direction(x_steps, direction: LstmParams, hidden: int, batch: int, reverse: bool):
    wx_t = ndgrad.transpose(direction.wx)
    wh_t = ndgrad.transpose(direction.wh)
    h = Tensor(np.zeros((batch, hidden)))
    c = Tensor(np.zeros((batch, hidden)))
    order = reversed(x_steps) if reverse else x_steps
    for x_t in order:
        h, c = _step(x_t, h, c, wx_t, wh_t, direction.bias, hidden)
    return h


def bilstm_encode(ids, params: ModelParams) -> Tensor:
    """Concatenated final hidden states of both directions, (batch, 2H)."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim == 1:
        ids = ids[np.newaxis, :]
    batch, length = ids.shape
    hidden = params.forward_lstm.wh.shape[1]
    x_steps = [ndgrad.gather(params.embedding, ids[:, t]) for t in range(length)]
    h_forward = _run_direction(x_steps, params.forward_lstm, hidden, batch, reverse=False)
    h_backward = _run_direction(x_steps, params.backward_lstm, hidden, batch, reverse=True)
    return ndgrad.concat(h_forward, h_backward)


def model_forward(ids, numeric, params: ModelParams) -> Tensor:
    """Per-example fraud probability, shape (batch, 1), each value in (0, 1)."""
    numeric = np.asarray(numeric, dtype=np.float64)
    if numeric.ndim == 1:
        numeric = numeric[np.newaxis, :]
    encoded = bilstm_encode(ids, params)
    merged = ndgrad.concat(encoded, Tensor(numeric))
    hidden = ndgrad.relu(ndgrad.add(ndgrad.matmul(merged, params.dense_w), params.dense_b))
    return ndgrad.sigmoid(ndgrad.add(ndgrad.matmul(hidden, params.out_w), params.out_b))


def predict_scores(ids, numeric, params: ModelParams, chunk: int = 256) -> np.ndarray:
    """Fraud probabilities without recording gradients, in eval chunks."""
    ids = np.asarray(ids, dtype=np.int64)
    numeric = np.asarray(numeric, dtype=np.float64)
    parts = []
    for start in range(0, ids.shape[0], chunk):
        stop = start + chunk
        parts.append(model_forward(ids[start:stop], numeric[start:stop], params).values[:, 0])
    return np.concatenate(parts)


# --------------------------------------------------------------------------
# Estimator
# --------------------------------------------------------------------------

class BiLstmClassifier(Estimator):
    """Binary classifier over [token ids | numeric features] rows.

    ``X`` packs each example as ``sequence_length`` integer token ids
    followed by the numeric feature block, so the matrix composes with
    ordinary array pipelines. Training minimizes binary cross-entropy with
    Adam and early-stops on validation loss, restoring the best epoch's
    weights.
    """

    def __init__(
        self,
        vocab_size=10000,
        embedding_dim=32,
        hidden_units=64,
        dense_units=64,
        sequence_length=256,
        learning_rate=1e-3,
        batch_size=32,
        max_epochs=25,
        patience=2,
        seed=42,
    ):
        self.vocab_size = vocab_size
        self.embedding_dim = embedding_dim
        self.hidden_units = hidden_units
        self.dense_units = dense_units
        self.sequence_length = sequence_length
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.seed = seed

    def _split_columns(self, X):
        X = check_matrix(X)
        if X.shape[1] <= self.sequence_length:
            raise ValueError(
                f"X must have sequence_length={self.sequence_length} id columns "
                f"plus at least one numeric column, got width {X.shape[1]}"
            )
        ids = X[:, : self.sequence_length].astype(np.int64)
        numeric = X[:, self.sequence_length :]
        return ids, numeric

    def fit(self, X, y, validation_data=None):
        ids, numeric = self._split_columns(X)
        y = check_labels(y, ids.shape[0])
        if validation_data is None:
            order = list(range(ids.shape[0]))
            SplitMix64(self.seed).shuffle(order)
            n_val = max(1, int(0.2 * len(order)))
            val_idx, train_idx = order[:n_val], order[n_val:]
            ids_val, numeric_val, y_val = ids[val_idx], numeric[val_idx], y[val_idx]
            ids, numeric, y = ids[train_idx], numeric[train_idx], y[train_idx]
        else:
            X_val, y_val = validation_data
            ids_val, numeric_val = self._split_columns(X_val)
            y_val = check_labels(y_val, ids_val.shape[0])

        self.config_ = ModelConfig(
            vocab_size=self.vocab_size,
            embedding_dim=self.embedding_dim,
            hidden_units=self.hidden_units,
            dense_units=self.dense_units,
            sequence_length=self.sequence_length,
            numeric_width=numeric.shape[1],
            seed=self.seed,
        )
        self.params_ = init_params(self.config_)
        train_cfg = trainer.TrainConfig(
            max_epochs=self.max_epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            patience=self.patience,
            seed=self.seed,
        )
        self.history_ = trainer.train(
            self.params_.named_tensors(),
            lambda b_ids, b_num: model_forward(b_ids, b_num, self.params_),
            (ids, numeric, y),
            (ids_val, numeric_val, y_val),
            train_cfg,
        )
        self.classes_ = np.array([0, 1])
        return self

    def decision_scores(self, X) -> np.ndarray:
        self._check_fitted("params_")
        ids, numeric = self._split_columns(X)
        return predict_scores(ids, numeric, self.params_)

    def predict_proba(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        return np.column_stack([1.0 - scores, scores])

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) >= 0.5).astype(np.int64)
