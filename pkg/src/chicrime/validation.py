"""Input validation helpers shared by the estimators."""

import numpy as np

from .errors import ArgumentError, NotFittedError


def check_array(X, *, allow_nan=False, name="X"):
    """Coerce to a 2-D float64 array and validate finiteness."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ArgumentError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
    if not allow_nan and not np.all(np.isfinite(X)):
        raise ArgumentError(f"{name} contains NaN or infinite values")
    if allow_nan and np.any(np.isinf(X)):
        raise ArgumentError(f"{name} contains infinite values")
    return X


def check_X_y(X, y, *, allow_nan=False):
    X = check_array(X, allow_nan=allow_nan)
    y = np.asarray(y)
    if y.ndim != 1:
        y = y.ravel()
    if len(y) != X.shape[0]:
        raise ArgumentError(
            f"X has {X.shape[0]} rows but y has {len(y)} entries"
        )
    return X, y


def check_binary_labels(y):
    """Validate that labels are in {0, 1} and return them as int64."""
    y = np.asarray(y).ravel()
    vals = np.unique(y)
    if not np.all(np.isin(vals, [0, 1])):
        raise ArgumentError(f"labels must be in {{0, 1}}, got values {vals}")
    return y.astype(np.int64)


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )


def check_feature_count(X, expected):
    if X.shape[1] != expected:
        raise ArgumentError(
            f"expected {expected} features, got {X.shape[1]}"
        )
