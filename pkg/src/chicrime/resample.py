"""Class-imbalance handling for training data: SMOTE plus undersampling."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .validation import check_binary_labels, check_X_y


@dataclass(frozen=True)
class ResamplePlan:
    smote_k: int = 3
    oversample_ratio: float = 1.0
    undersample_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.smote_k < 1:
            raise ArgumentError(f"smote_k must be >= 1, got {self.smote_k}")
        for name in ("oversample_ratio", "undersample_ratio"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ArgumentError(f"{name} must be in (0, 1], got {v}")


@dataclass(frozen=True)
class ClassCounts:
    negatives: int
    positives: int

    @staticmethod
    def of(y):
        y = np.asarray(y)
        return ClassCounts(int((y == 0).sum()), int((y == 1).sum()))


def _class_split(y):
    y = check_binary_labels(y)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    if len(pos) <= len(neg):
        return pos, neg
    return neg, pos


def _minority_neighbors(X_min, k):
    """Index matrix of each minority row's k nearest minority rows."""
    n = X_min.shape[0]
    d2 = ((X_min[:, None, :] - X_min[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k]


def smote(X, y, plan: ResamplePlan):
    """Oversample the minority class with synthetic interpolated rows.

    Each synthetic row is x_i + u * (x_nn - x_i) for a random minority row
    x_i, one of its k nearest minority neighbors x_nn, and u ~ Uniform(0,1).
    Originals are always preserved.
    """
    X, y = check_X_y(X, y)
    y = check_binary_labels(y)
    minority_idx, majority_idx = _class_split(y)
    n_min, n_maj = len(minority_idx), len(majority_idx)
    if n_min < 2:
        raise ArgumentError("minority class needs at least 2 samples")
    target = math.ceil(plan.oversample_ratio * n_maj)
    n_new = target - n_min
    if n_new <= 0:
        return X.copy(), y.copy()

    k = plan.smote_k
    if n_min <= k:
        k = n_min - 1
        warnings.warn(
            f"smote_k clamped to {k}: minority class has {n_min} samples"
        )
    rng = np.random.default_rng(plan.seed)
    X_min = X[minority_idx]
    neighbors = _minority_neighbors(X_min, k)

    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, k, size=n_new)
    u = rng.random(size=n_new)
    x_base = X_min[base]
    x_nn = X_min[neighbors[base, pick]]
    synthetic = x_base + u[:, None] * (x_nn - x_base)

    minority_label = int(y[minority_idx[0]])
    X_out = np.vstack([X, synthetic])
    y_out = np.concatenate([y, np.full(n_new, minority_label, dtype=y.dtype)])
    return X_out, y_out


def random_undersample(X, y, plan: ResamplePlan):
    """Subsample the majority class without replacement.

    The retained majority count is ceil(n_minority / undersample_ratio), so
    the minority/majority ratio afterwards equals the plan's value.
    """
    X, y = check_X_y(X, y)
    y = check_binary_labels(y)
    minority_idx, majority_idx = _class_split(y)
    n_min, n_maj = len(minority_idx), len(majority_idx)
    if n_min == 0 or n_maj == 0:
        raise ArgumentError("both classes must be non-empty")
    target = math.ceil(n_min / plan.undersample_ratio)
    if target > n_maj:
        raise ArgumentError(
            f"undersample_ratio {plan.undersample_ratio} requires "
            f"{target} majority rows but only {n_maj} exist"
        )
    rng = np.random.default_rng(plan.seed)
    keep_maj = rng.choice(n_maj, size=target, replace=False)
    keep_maj.sort()
    keep = np.concatenate([minority_idx, majority_idx[keep_maj]])
    keep.sort()
    return X[keep], y[keep]


def balance(X, y, plan: ResamplePlan, split="train"):
    """SMOTE then random undersampling; training data only.

    Returns (X, y, before_counts, after_counts).
    """
    if split != "train":
        raise ArgumentError(
            f"resampling is restricted to the training split, got {split!r}"
        )
    before = ClassCounts.of(y)
    X1, y1 = smote(X, y, plan)
    X2, y2 = random_undersample(X1, y1, plan)
    after = ClassCounts.of(y2)
    return X2, y2, before, after


def planned_counts(n_minority, n_majority, plan: ResamplePlan):
    """Final (minority, majority) counts `balance` will produce."""
    after_smote = max(n_minority,
                      math.ceil(plan.oversample_ratio * n_majority))
    majority_after = math.ceil(after_smote / plan.undersample_ratio)
    if majority_after > n_majority:
        raise ArgumentError("plan requires more majority rows than exist")
    return after_smote, majority_after
