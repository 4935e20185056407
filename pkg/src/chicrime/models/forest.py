"""Random forest: bagged Gini trees voting on the positive class."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ArgumentError
from ..validation import check_binary_labels, check_X_y
from .base import BaseClassifier
from .tree import Tree, grow_classification_tree, sqrt_subset_size


class RandomForestClassifier(BaseClassifier):
    """50 bootstrap-sampled depth-capped trees by default, as published.

    Each tree trains on n draws with replacement and considers a fresh
    random subset of ceil(sqrt(d)) features at every split. The score of a
    query is the fraction of trees voting for the positive class.
    """

    kind = "forest"

    def __init__(self, n_trees=50, max_depth=9, criterion="gini",
                 bootstrap=True, seed=0, n_jobs=1):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.criterion = criterion
        self.bootstrap = bootstrap
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y):
        if self.criterion != "gini":
            raise ArgumentError(f"unsupported criterion {self.criterion!r}")
        X, y = check_X_y(X, y)
        y = check_binary_labels(y)
        n, d = X.shape
        self.n_features_in_ = d
        subset = sqrt_subset_size(d)
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)

        def build(seq):
            rng = np.random.default_rng(seq)
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xb, yb = X[idx], y[idx]
            else:
                Xb, yb = X, y
            return grow_classification_tree(Xb, yb, self.max_depth, rng=rng,
                                            feature_subset=subset)

        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                self.trees_ = list(pool.map(build, seeds))
        else:
            self.trees_ = [build(s) for s in seeds]
        return self

    def predict_proba(self, X):
        X = self._check_query(X)
        votes = np.zeros(X.shape[0])
        for tree in self.trees_:
            votes += tree.predict_value(X) >= 0.5
        return votes / len(self.trees_)

    def tree_depths(self):
        return [t.depth() for t in self.trees_]

    def get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_],
                "n_features_in": self.n_features_in_}

    def set_state(self, state):
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.n_features_in_ = state["n_features_in"]
        return self
