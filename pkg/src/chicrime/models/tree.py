"""Binary decision trees: greedy axis-aligned splits at value midpoints.

Two growth modes share the machinery: classification trees maximize Gini
impurity decrease; gradient trees maximize the second-order loss reduction
0.5 * [G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - G^2/(H+lam)] and only split when
that reduction exceeds the min-split-loss penalty.

Columns are argsorted once at the root and the sorted index arrays are
partitioned down the tree, so each node costs O(d * n_node). Ties are
broken toward the lowest feature index and lowest threshold.
"""

import math
from dataclasses import dataclass, field

import numpy as np

LEAF = -1


@dataclass
class Tree:
    """Flat array representation; node 0 is the root."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)
    gain: list = field(default_factory=list)
    n_samples: list = field(default_factory=list)

    def add_leaf(self, value, n):
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(value))
        self.gain.append(0.0)
        self.n_samples.append(int(n))
        return len(self.feature) - 1

    def add_split(self, feature, threshold, gain, n):
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(0.0)
        self.gain.append(float(gain))
        self.n_samples.append(int(n))
        return len(self.feature) - 1

    @property
    def n_nodes(self):
        return len(self.feature)

    def depth(self):
        def walk(node):
            if self.feature[node] == LEAF:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0) if self.n_nodes else 0

    def predict_value(self, X):
        """Per-row leaf value, vectorized over rows."""
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            if self.feature[node] == LEAF:
                out[rows] = self.value[node]
                continue
            go_left = X[rows, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], rows[go_left]))
            stack.append((self.right[node], rows[~go_left]))
        return out

    def internal_nodes(self):
        return [i for i, f in enumerate(self.feature) if f != LEAF]

    def to_dict(self):
        return {
            "feature": list(self.feature),
            "threshold": list(self.threshold),
            "left": list(self.left),
            "right": list(self.right),
            "value": list(self.value),
            "gain": list(self.gain),
            "n_samples": list(self.n_samples),
        }

    @staticmethod
    def from_dict(d):
        return Tree(feature=list(d["feature"]),
                    threshold=list(d["threshold"]),
                    left=list(d["left"]), right=list(d["right"]),
                    value=list(d["value"]), gain=list(d["gain"]),
                    n_samples=list(d["n_samples"]))


def gini_impurity(y):
    n = len(y)
    if n == 0:
        return 0.0
    p = float(np.sum(y)) / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _midpoint(lo, hi):
    thr = (lo + hi) / 2.0
    # keep the upper value strictly on the right under fp rounding
    if thr >= hi:
        thr = lo
    return thr


def sqrt_subset_size(n_features):
    return int(math.ceil(math.sqrt(n_features)))


class _Builder:
    def __init__(self, X, max_depth, rng, feature_subset):
        self.X = np.asarray(X, dtype=np.float64)
        self.max_depth = max_depth
        self.rng = rng
        self.feature_subset = feature_subset
        self.n, self.d = self.X.shape
        self.tree = Tree()
        self._left_mark = np.zeros(self.n, dtype=bool)

    def _features(self):
        if self.feature_subset is None or self.feature_subset >= self.d:
            return range(self.d)
        chosen = self.rng.choice(self.d, size=self.feature_subset,
                                 replace=False)
        chosen.sort()
        return chosen

    def grow(self):
        order = [
            np.argsort(self.X[:, f], kind="stable").astype(np.int32)
            for f in range(self.d)
        ]
        self._build(order, 0)
        return self.tree

    def _build(self, order, depth):
        rows = order[0]
        n = rows.size
        if depth >= self.max_depth or self._is_pure(rows):
            return self.tree.add_leaf(self._leaf_value(rows), n)
        best = None
        best_gain = self._min_gain()
        for f in self._features():
            found = self._best_boundary(order[f], f)
            if found is not None and found[0] > best_gain:
                best_gain, best = found[0], (int(f), found[1])
        if best is None:
            return self.tree.add_leaf(self._leaf_value(rows), n)
        f, boundary = best
        xs_f = self.X[order[f], f]
        thr = _midpoint(xs_f[boundary], xs_f[boundary + 1])
        node = self.tree.add_split(f, thr, best_gain, n)
        left_rows = order[f][:boundary + 1]
        mark = self._left_mark
        mark[left_rows] = True
        left_order, right_order = [], []
        for g in range(self.d):
            is_left = mark[order[g]]
            left_order.append(order[g][is_left])
            right_order.append(order[g][~is_left])
        mark[left_rows] = False
        self.tree.left[node] = self._build(left_order, depth + 1)
        self.tree.right[node] = self._build(right_order, depth + 1)
        return node

    # mode-specific hooks -------------------------------------------------
    def _is_pure(self, rows):
        raise NotImplementedError

    def _leaf_value(self, rows):
        raise NotImplementedError

    def _min_gain(self):
        raise NotImplementedError

    def _best_boundary(self, sorted_rows, f):
        """(gain, boundary_index) of the best split of one sorted column."""
        raise NotImplementedError


class _GiniBuilder(_Builder):
    def __init__(self, X, y, max_depth, rng=None, feature_subset=None):
        super().__init__(X, max_depth, rng, feature_subset)
        self.y = np.asarray(y, dtype=np.float64)

    def _is_pure(self, rows):
        s = float(np.sum(self.y[rows]))
        return s == 0.0 or s == rows.size

    def _leaf_value(self, rows):
        return float(np.sum(self.y[rows])) / rows.size

    def _min_gain(self):
        return 0.0

    def _best_boundary(self, sorted_rows, f):
        xs = self.X[sorted_rows, f]
        boundaries = np.flatnonzero(xs[1:] != xs[:-1])
        if boundaries.size == 0:
            return None
        ys = self.y[sorted_rows]
        n = xs.size
        pos = float(np.sum(ys))
        parent = 1.0 - (pos / n) ** 2 - ((n - pos) / n) ** 2
        cum_pos = np.cumsum(ys)
        n_l = boundaries + 1.0
        pos_l = cum_pos[boundaries]
        n_r = n - n_l
        pos_r = pos - pos_l
        gini_l = 1.0 - (pos_l / n_l) ** 2 - ((n_l - pos_l) / n_l) ** 2
        gini_r = 1.0 - (pos_r / n_r) ** 2 - ((n_r - pos_r) / n_r) ** 2
        gains = parent - (n_l * gini_l + n_r * gini_r) / n
        b = int(np.argmax(gains))
        return float(gains[b]), int(boundaries[b])


class _GradientBuilder(_Builder):
    def __init__(self, X, g, h, max_depth, reg_lambda=1.0,
                 min_split_loss=0.0, rng=None, feature_subset=None):
        super().__init__(X, max_depth, rng, feature_subset)
        self.g = np.asarray(g, dtype=np.float64)
        self.h = np.asarray(h, dtype=np.float64)
        self.reg_lambda = reg_lambda
        self.min_split_loss = min_split_loss

    def _is_pure(self, rows):
        return False

    def _leaf_value(self, rows):
        return -float(np.sum(self.g[rows])) / (
            float(np.sum(self.h[rows])) + self.reg_lambda)

    def _min_gain(self):
        return self.min_split_loss

    def _best_boundary(self, sorted_rows, f):
        xs = self.X[sorted_rows, f]
        boundaries = np.flatnonzero(xs[1:] != xs[:-1])
        if boundaries.size == 0:
            return None
        gs = self.g[sorted_rows]
        hs = self.h[sorted_rows]
        G = float(np.sum(gs))
        H = float(np.sum(hs))
        parent_score = G * G / (H + self.reg_lambda)
        g_l = np.cumsum(gs)[boundaries]
        h_l = np.cumsum(hs)[boundaries]
        g_r = G - g_l
        h_r = H - h_l
        gains = 0.5 * (g_l ** 2 / (h_l + self.reg_lambda)
                       + g_r ** 2 / (h_r + self.reg_lambda)
                       - parent_score)
        b = int(np.argmax(gains))
        return float(gains[b]), int(boundaries[b])


def grow_classification_tree(X, y, max_depth, rng=None, feature_subset=None):
    """Greedy Gini tree; leaves hold the positive-class fraction."""
    return _GiniBuilder(X, y, max_depth, rng=rng,
                        feature_subset=feature_subset).grow()


def grow_gradient_tree(X, g, h, max_depth, reg_lambda=1.0,
                       min_split_loss=0.0, rng=None, feature_subset=None):
    """Second-order boosted tree; leaves hold weights -G/(H+lambda).

    A node is only split when the loss reduction strictly exceeds
    ``min_split_loss``; the stored node gain is the raw reduction so
    serialized trees can be audited against the penalty.
    """
    return _GradientBuilder(X, g, h, max_depth, reg_lambda=reg_lambda,
                            min_split_loss=min_split_loss, rng=rng,
                            feature_subset=feature_subset).grow()
