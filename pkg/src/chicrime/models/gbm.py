"""Gradient-boosted trees on the logistic loss with second-order splits."""

import math

import numpy as np
from scipy.special import expit

from ..errors import ArgumentError
from ..validation import check_binary_labels, check_X_y
from .base import BaseClassifier
from .tree import Tree, grow_gradient_tree


class GradientBoostingClassifier(BaseClassifier):
    """Sequential boosting: each round fits a tree to the gradient and
    hessian of the running logistic-loss ensemble.

    Per-round gradients are g = p - y and hessians h = p(1 - p); a node is
    split only when the second-order loss reduction exceeds
    ``min_split_loss``; leaf weights are -G/(H + reg_lambda). The binary
    training error rate is recorded after every round.
    """

    kind = "gbm"

    def __init__(self, n_rounds=200, learning_rate=0.35, min_split_loss=0.1,
                 reg_lambda=1.0, max_depth=6, base_score=0.5, seed=0):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.min_split_loss = min_split_loss
        self.reg_lambda = reg_lambda
        self.max_depth = max_depth
        self.base_score = base_score
        self.seed = seed

    def fit(self, X, y):
        if not 0.0 < self.base_score < 1.0:
            raise ArgumentError("base_score must be in (0, 1)")
        X, y = check_X_y(X, y)
        y = check_binary_labels(y).astype(np.float64)
        self.n_features_in_ = X.shape[1]
        self.base_margin_ = math.log(self.base_score /
                                     (1.0 - self.base_score))
        margin = np.full(X.shape[0], self.base_margin_)
        self.trees_ = []
        self.train_error_ = []
        for _ in range(self.n_rounds):
            p = expit(margin)
            g = p - y
            h = p * (1.0 - p)
            tree = grow_gradient_tree(
                X, g, h, self.max_depth, reg_lambda=self.reg_lambda,
                min_split_loss=self.min_split_loss,
            )
            self.trees_.append(tree)
            margin = margin + self.learning_rate * tree.predict_value(X)
            self.train_error_.append(float(np.mean((margin >= 0.0) != y)))
        return self

    def decision_function(self, X):
        X = self._check_query(X)
        margin = np.full(X.shape[0], self.base_margin_)
        for tree in self.trees_:
            margin += self.learning_rate * tree.predict_value(X)
        return margin

    def predict_proba(self, X):
        return expit(self.decision_function(X))

    def get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_],
                "train_error": list(self.train_error_),
                "base_margin": self.base_margin_,
                "n_features_in": self.n_features_in_}

    def set_state(self, state):
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.train_error_ = list(state["train_error"])
        self.base_margin_ = state["base_margin"]
        self.n_features_in_ = state["n_features_in"]
        return self
