"""Uniform fit/predict contract shared by the five classifier kinds."""

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import ArgumentError
from ..validation import check_is_fitted


class BaseClassifier(BaseEstimator):
    """Binary classifier with scores in [0, 1] and labels = score >= 0.5.

    ``predict_proba`` returns a 1-D array of positive-class scores. All
    subclasses are immutable after fit and safe to share across threads.
    """

    kind = None

    def fit(self, X, y):
        raise NotImplementedError

    def predict_proba(self, X):
        raise NotImplementedError

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def _check_query(self, X):
        check_is_fitted(self, "n_features_in_")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features_in_:
            raise ArgumentError(
                f"query has {X.shape[1]} features, model was trained "
                f"with {self.n_features_in_}"
            )
        return X
