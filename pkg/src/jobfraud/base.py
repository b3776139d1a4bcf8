"""Estimator conventions and input validation helpers.

Estimators here follow the scikit-learn protocol (``fit``/``predict``/
``get_params``/``set_params``) without depending on scikit-learn itself:
constructor arguments are stored verbatim on ``self``, fitted state gets a
trailing underscore, and ``get_params`` reads the constructor signature.
"""

import inspect

import numpy as np

from .errors import DataError, ShapeError


class NotFittedError(RuntimeError):
    """Estimator method called before fit()."""


class Estimator:
    """Base class supplying the get_params/set_params protocol."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"unknown parameter {name!r} for {type(self).__name__}"
                )
            setattr(self, name, value)
        return self

    def _check_fitted(self, attr):
        if not hasattr(self, attr):
            raise NotFittedError(
                f"{type(self).__name__} instance is not fitted yet"
            )

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def check_matrix(X, name="X") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0:
        raise DataError(f"{name} has no rows")
    return X


def check_labels(y, n_rows) -> np.ndarray:
    """Coerce to a 1-D 0/1 int array of length n_rows."""
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != n_rows:
        raise ShapeError(f"labels must be 1-D of length {n_rows}, got {y.shape}")
    vals = np.unique(y)
    if not np.isin(vals, (0, 1)).all():
        raise DataError(f"labels must be 0/1, found values {vals!r}")
    return y.astype(np.int64)
