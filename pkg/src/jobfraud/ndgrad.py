"""Dense float64 tensors with reverse-mode automatic differentiation.

A ``Graph`` is a tape: while one is active (``with Graph() as g:``), every
operation touching a gradient-relevant tensor appends a node in execution
order, which is already a topological order. ``backward`` walks the tape in
reverse and accumulates (+=) into ``grad`` buffers, so parameters shared
across many steps (the recurrent weights) sum their contributions; callers
zero grads between optimizer steps.

Broadcasting is deliberately limited to row-vector bias addition; any other
shape mismatch raises ShapeError.
"""

import contextlib
import gc
import itertools
import threading

import numpy as np

from .errors import NumericError, ShapeError

BCE_EPS = 1e-12

_tls = threading.local()
_graph_ids = itertools.count(1)


@contextlib.contextmanager
def gc_paused():
    """Pause the cyclic collector across a hot record/backward section.

    Tapes hold no reference cycles (tensors point at graphs by id only),
    so everything still frees promptly by refcount; pausing just stops the
    collector from rescanning a large live tape every few hundred
    allocations.
    """
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def _graph_stack():
    stack = getattr(_tls, "stack", None)
    if stack is None:
        stack = _tls.stack = []
    return stack


class Tensor:
    """Dense n-d float64 value; ``grad`` is allocated when requires_grad."""

    __slots__ = ("values", "grad", "requires_grad", "graph_id")

    def __init__(self, values, requires_grad=False):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(self.values) if requires_grad else None
        self.graph_id = 0  # id of the Graph that recorded this tensor

    @property
    def shape(self):
        return self.values.shape

    def item(self) -> float:
        return float(self.values)

    def zero_grad(self):
        if self.grad is None:
            self.grad = np.zeros_like(self.values)
        else:
            self.grad.fill(0.0)

    def __repr__(self):
        return f"Tensor(shape={self.values.shape}, requires_grad={self.requires_grad})"

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return multiply(self, other)


def param(values) -> Tensor:
    """A trainable leaf tensor."""
    return Tensor(values, requires_grad=True)


class Graph:
    """Tape of recorded operations, in execution order."""

    def __init__(self):
        self._nodes = []
        self._id = next(_graph_ids)

    def __enter__(self):
        _graph_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _graph_stack().pop()
        return False

    def __len__(self):
        return len(self._nodes)


def _wants_grad(t: Tensor, g: Graph) -> bool:
    return t.requires_grad or t.graph_id == g._id


def _record(out: Tensor, inputs, backward_fn):
    stack = _graph_stack()
    if not stack:
        return
    g = stack[-1]
    if any(_wants_grad(t, g) for t in inputs):
        out.graph_id = g._id
        g._nodes.append((out, backward_fn))


def _accumulate(t: Tensor, grad):
    if t.grad is None:
        t.grad = np.array(grad, dtype=np.float64)
    else:
        t.grad += grad


def _active():
    stack = _graph_stack()
    return stack[-1] if stack else None


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.values.ndim != 2 or b.values.ndim != 2 or a.values.shape[1] != b.values.shape[0]:
        raise ShapeError(f"matmul needs (m,k)x(k,n), got {a.values.shape} and {b.values.shape}")
    out = Tensor(a.values @ b.values)
    g = _active()
    if g is not None:
        av, bv = a.values, b.values
        take_a, take_b = _wants_grad(a, g), _wants_grad(b, g)

        def backward_fn(grad):
            if take_a:
                _accumulate(a, grad @ bv.T)
            if take_b:
                _accumulate(b, av.T @ grad)

        _record(out, (a, b), backward_fn)
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    bias = False
    if a.values.shape != b.values.shape:
        if (
            a.values.ndim == 2
            and b.values.ndim in (1, 2)
            and b.values.shape[-1] == a.values.shape[1]
            and (b.values.ndim == 1 or b.values.shape[0] == 1)
        ):
            bias = True  # row-vector bias broadcast over rows
        else:
            raise ShapeError(f"add shapes differ: {a.values.shape} vs {b.values.shape}")
    out = Tensor(a.values + b.values)
    g = _active()
    if g is not None:
        take_a, take_b = _wants_grad(a, g), _wants_grad(b, g)
        b_shape = b.values.shape

        def backward_fn(grad):
            if take_a:
                _accumulate(a, grad)
            if take_b:
                _accumulate(b, grad.sum(axis=0).reshape(b_shape) if bias else grad)

        _record(out, (a, b), backward_fn)
    return out


def multiply(a: Tensor, b) -> Tensor:
    """Elementwise product with an equal-shape tensor or a python scalar."""
    if isinstance(b, Tensor):
        if a.values.shape != b.values.shape:
            raise ShapeError(f"multiply shapes differ: {a.values.shape} vs {b.values.shape}")
        out = Tensor(a.values * b.values)
        g = _active()
        if g is not None:
            av, bv = a.values, b.values
            take_a, take_b = _wants_grad(a, g), _wants_grad(b, g)

            def backward_fn(grad):
                if take_a:
                    _accumulate(a, grad * bv)
                if take_b:
                    _accumulate(b, grad * av)

            _record(out, (a, b), backward_fn)
        return out

    c = float(b)
    out = Tensor(a.values * c)

    def backward_scale(grad):
        _accumulate(a, grad * c)

    _record(out, (a,), backward_scale)
    return out


def concat(a: Tensor, b: Tensor) -> Tensor:
    """Concatenate along the last axis; 2-D inputs need equal row counts."""
    if a.values.ndim != b.values.ndim or a.values.ndim not in (1, 2):
        raise ShapeError(f"concat needs matching 1-D or 2-D, got {a.values.shape} and {b.values.shape}")
    if a.values.ndim == 2 and a.values.shape[0] != b.values.shape[0]:
        raise ShapeError(f"concat row counts differ: {a.values.shape} vs {b.values.shape}")
    out = Tensor(np.concatenate((a.values, b.values), axis=-1))
    g = _active()
    if g is not None:
        width = a.values.shape[-1]
        take_a, take_b = _wants_grad(a, g), _wants_grad(b, g)

        def backward_fn(grad):
            if take_a:
                _accumulate(a, grad[..., :width])
            if take_b:
                _accumulate(b, grad[..., width:])

        _record(out, (a, b), backward_fn)
    return out


def gather(table: Tensor, ids) -> Tensor:
    """Row lookup; backward scatter-adds into the table."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1:
        raise ShapeError(f"gather ids must be 1-D, got shape {ids.shape}")
    n_rows = table.values.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= n_rows):
        raise IndexError(f"gather id out of range for table with {n_rows} rows")
    out = Tensor(table.values[ids])
    g = _active()
    if g is not None and _wants_grad(table, g):

        def backward_fn(grad):
            if table.grad is None:
                table.grad = np.zeros_like(table.values)
            np.add.at(table.grad, ids, grad)

        _record(out, (table,), backward_fn)
    return out


def slice_columns(a: Tensor, start: int, stop: int) -> Tensor:
    if a.values.ndim != 2:
        raise ShapeError(f"slice_columns needs 2-D input, got shape {a.values.shape}")
    out = Tensor(a.values[:, start:stop])

    def backward_fn(grad):
        if a.grad is None:
            a.grad = np.zeros_like(a.values)
        a.grad[:, start:stop] += grad

    _record(out, (a,), backward_fn)
    return out


def reshape(a: Tensor, shape) -> Tensor:
    out = Tensor(a.values.reshape(shape))

    def backward_fn(grad):
        _accumulate(a, grad.reshape(a.values.shape))

    _record(out, (a,), backward_fn)
    return out


def transpose(a: Tensor) -> Tensor:
    if a.values.ndim != 2:
        raise ShapeError(f"transpose needs 2-D input, got shape {a.values.shape}")
    out = Tensor(a.values.T.copy())

    def backward_fn(grad):
        _accumulate(a, grad.T)

    _record(out, (a,), backward_fn)
    return out


def _sigmoid_values(x: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument never overflows
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def sigmoid(x: Tensor) -> Tensor:
    out = Tensor(_sigmoid_values(x.values))
    ov = out.values

    def backward_fn(grad):
        _accumulate(x, grad * ov * (1.0 - ov))

    _record(out, (x,), backward_fn)
    return out


def tanh(x: Tensor) -> Tensor:
    out = Tensor(np.tanh(x.values))
    ov = out.values

    def backward_fn(grad):
        _accumulate(x, grad * (1.0 - ov * ov))

    _record(out, (x,), backward_fn)
    return out


def relu(x: Tensor) -> Tensor:
    out = Tensor(np.maximum(x.values, 0.0))
    mask = x.values > 0  # derivative 0 at exactly 0

    def backward_fn(grad):
        _accumulate(x, grad * mask)

    _record(out, (x,), backward_fn)
    return out


_ACTIVATIONS = {"sigmoid": sigmoid, "tanh": tanh, "relu": relu}


def activation(kind: str, x: Tensor) -> Tensor:
    try:
        fn = _ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(f"unknown activation {kind!r}") from None
    return fn(x)


def sum_all(x: Tensor) -> Tensor:
    out = Tensor(x.values.sum())

    def backward_fn(grad):
        _accumulate(x, np.full_like(x.values, float(grad)))

    _record(out, (x,), backward_fn)
    return out


def mean_all(x: Tensor) -> Tensor:
    size = x.values.size
    out = Tensor(x.values.mean())

    def backward_fn(grad):
        _accumulate(x, np.full_like(x.values, float(grad) / size))

    _record(out, (x,), backward_fn)
    return out


def bce_loss(p: Tensor, y) -> Tensor:
    """Mean binary cross-entropy of probabilities against 0/1 targets.

    Probabilities are clamped to [BCE_EPS, 1 - BCE_EPS] before the logs;
    the gradient is zero where the clamp is active.
    """
    y = np.broadcast_to(np.asarray(y, dtype=np.float64), p.values.shape)
    clamped = np.clip(p.values, BCE_EPS, 1.0 - BCE_EPS)
    losses = -(y * np.log(clamped) + (1.0 - y) * np.log1p(-clamped))
    out = Tensor(losses.mean())
    size = p.values.size
    inside = (p.values > BCE_EPS) & (p.values < 1.0 - BCE_EPS)

    def backward_fn(grad):
        dp = np.where(inside, (clamped - y) / (clamped * (1.0 - clamped)), 0.0)
        _accumulate(p, dp * (float(grad) / size))

    _record(out, (p,), backward_fn)
    return out


# --------------------------------------------------------------------------
# Backward pass and gradient checking
# --------------------------------------------------------------------------

def backward(graph: Graph, loss: Tensor) -> None:
    """Populate gradients of everything `loss` depends on in `graph`."""
    if loss.values.size != 1:
        raise ShapeError(f"loss must be scalar, got shape {loss.values.shape}")
    if loss.graph_id != graph._id:
        raise ValueError("loss tensor was not recorded in this graph")
    loss.grad = np.ones_like(loss.values)
    for out, backward_fn in reversed(graph._nodes):
        if out.grad is not None:
            backward_fn(out.grad)


def grad_check(f, params, eps: float = 1e-4) -> float:
    """Max relative error between backward() and central differences.

    `f` rebuilds the forward computation from the current parameter values
    and returns a scalar Tensor. Relative error per coordinate is
    |a - n| / max(1, |a|, |n|). Inputs near a relu kink (within eps of 0)
    are the caller's responsibility.
    """
    params = list(params)
    with gc_paused():
        for p in params:
            p.zero_grad()
        with Graph() as g:
            loss = f()
        backward(g, loss)
        analytic = [np.array(p.grad) for p in params]

        max_err = 0.0
        for p, a in zip(params, analytic):
            flat = p.values.reshape(-1)
            a_flat = a.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                hi = float(f().values)
                flat[i] = orig - eps
                lo = float(f().values)
                flat[i] = orig
                numeric = (hi - lo) / (2.0 * eps)
                if not (np.isfinite(numeric) and np.isfinite(a_flat[i])):
                    raise NumericError("non-finite value encountered in gradient check")
                err = abs(a_flat[i] - numeric) / max(1.0, abs(a_flat[i]), abs(numeric))
                if err > max_err:
                    max_err = err
    return max_err
