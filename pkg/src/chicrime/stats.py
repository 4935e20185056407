"""Exploratory statistics: correlation measures, VIF, rankings, and MCA."""

import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .errors import ArgumentError, DegenerateTableError, UndefinedMetricError
from .validation import check_is_fitted


@dataclass(frozen=True)
class CorrelationPair:
    feature_a: str
    feature_b: str
    method: str
    statistic: float
    p_value: float = None


@dataclass
class CorrelationReport:
    pairs: list = field(default_factory=list)

    def add(self, feature_a, feature_b, method, statistic, p_value=None):
        self.pairs.append(CorrelationPair(feature_a, feature_b, method,
                                          float(statistic), p_value))

    def to_rows(self):
        return [
            {"feature_a": p.feature_a, "feature_b": p.feature_b,
             "method": p.method, "statistic": p.statistic,
             "p_value": p.p_value}
            for p in self.pairs
        ]


@dataclass(frozen=True)
class VifEntry:
    feature: str
    vif: float
    infinite: bool


def _clean_pair(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(x) != len(y):
        raise ArgumentError("vectors must have equal length")
    if len(x) < 2:
        raise ArgumentError("need at least two observations")
    return x, y


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = _clean_pair(x, y)
    xd = x - x.mean()
    yd = y - y.mean()
    sx = np.sqrt((xd ** 2).sum())
    sy = np.sqrt((yd ** 2).sum())
    if sx == 0.0 or sy == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant "
                                   "vector")
    r = float((xd * yd).sum() / (sx * sy))
    return min(1.0, max(-1.0, r))


def average_ranks(x) -> np.ndarray:
    """1-based ranks with ties replaced by their average rank."""
    x = np.asarray(x, dtype=np.float64).ravel()
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        ranks[order[i:j + 1]] = avg
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson on average-ranked data."""
    x, y = _clean_pair(x, y)
    return pearson(average_ranks(x), average_ranks(y))


def chi_square_p_value(statistic: float, dof: int) -> float:
    """Upper-tail probability of the chi-square distribution."""
    if dof < 1:
        raise ArgumentError(f"dof must be >= 1, got {dof}")
    if statistic < 0:
        raise ArgumentError("chi-square statistic must be non-negative")
    return float(gammaincc(dof / 2.0, statistic / 2.0))


def chi_square_independence(table):
    """Pearson chi-square test of independence on a contingency table.

    Returns (statistic, dof, p_value). A zero row or column margin makes
    expected counts degenerate and raises.
    """
    obs = np.asarray(table, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[0] < 2 or obs.shape[1] < 2:
        raise ArgumentError("contingency table must be at least 2x2")
    if (obs < 0).any():
        raise ArgumentError("counts must be non-negative")
    row = obs.sum(axis=1)
    col = obs.sum(axis=0)
    if (row == 0).any() or (col == 0).any():
        raise DegenerateTableError("zero row or column margin")
    total = obs.sum()
    expected = np.outer(row, col) / total
    stat = float(((obs - expected) ** 2 / expected).sum())
    dof = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    return stat, dof, chi_square_p_value(stat, dof)


def contingency_table(a, b):
    """Observed-count matrix for two categorical sequences."""
    if len(a) != len(b):
        raise ArgumentError("sequences must have equal length")
    pairs = [(x, y) for x, y in zip(a, b) if x is not None and y is not None]
    cats_a = sorted({x for x, _ in pairs})
    cats_b = sorted({y for _, y in pairs})
    index_a = {c: i for i, c in enumerate(cats_a)}
    index_b = {c: i for i, c in enumerate(cats_b)}
    out = np.zeros((len(cats_a), len(cats_b)))
    for x, y in pairs:
        out[index_a[x], index_b[y]] += 1
    return out, cats_a, cats_b


_VIF_SINGULAR_TOL = 1e-10


def vif(X, feature_names=None):
    """Variance inflation factor per feature: 1 / (1 - R^2).

    R^2 comes from regressing each column on all others plus an intercept.
    Exact collinearity is reported with an ``infinite`` flag instead of a
    crash.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ArgumentError("need at least two features")
    n, p = X.shape
    if n <= p:
        raise ArgumentError("need more rows than features")
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(p)]
    entries = []
    for j in range(p):
        y = X[:, j]
        others = np.delete(X, j, axis=1)
        design = np.hstack([np.ones((n, 1)), others])
        coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coef
        sst = float(((y - y.mean()) ** 2).sum())
        if sst == 0.0:
            entries.append(VifEntry(feature_names[j], float("inf"), True))
            continue
        r2 = 1.0 - float((resid ** 2).sum()) / sst
        if 1.0 - r2 < _VIF_SINGULAR_TOL:
            entries.append(VifEntry(feature_names[j], float("inf"), True))
        else:
            entries.append(VifEntry(feature_names[j],
                                    max(1.0, 1.0 / (1.0 - r2)), False))
    return entries


def rank_frequencies(values):
    """(category, count) list, descending by count, ties lexicographic."""
    counts = Counter(v for v in values if v is not None)
    return sorted(counts.items(), key=lambda kv: (-kv[1], str(kv[0])))


class Mca:
    """Multiple correspondence analysis of categorical variables.

    Fits correspondence analysis on the complete disjunctive (indicator)
    matrix of Q variables with J total categories. Eigenvalues are the raw
    indicator-matrix principal inertias; their full-rank sum is J/Q - 1.
    """

    def __init__(self, n_components=2):
        if n_components < 1:
            raise ArgumentError("n_components must be >= 1")
        self.n_components = n_components

    def _indicator(self, columns, fitted=False):
        n = len(columns[0])
        blocks = []
        unseen = 0
        for q, col in enumerate(columns):
            if len(col) != n:
                raise ArgumentError("columns must have equal length")
            cats = self.categories_[q] if fitted else sorted(set(col))
            index = {c: i for i, c in enumerate(cats)}
            block = np.zeros((n, len(cats)))
            for i, v in enumerate(col):
                j = index.get(v)
                if j is None:
                    unseen += 1
                    continue
                block[i, j] = 1.0
            blocks.append(block)
        if fitted and unseen:
            warnings.warn(f"{unseen} unseen categor(ies) contribute zero "
                          "to the projection")
        return np.hstack(blocks)

    def fit(self, columns):
        """Fit on a list of Q categorical columns (Q >= 2)."""
        if len(columns) < 2:
            raise ArgumentError("need at least two categorical variables")
        self.categories_ = [sorted({v for v in col if v is not None})
                            for col in columns]
        for q, col in enumerate(columns):
            if any(v is None for v in col):
                raise ArgumentError(f"variable {q} has missing values")
        Z = self._indicator(columns)
        self.q_ = len(columns)
        self.j_ = Z.shape[1]

        P = Z / Z.sum()
        r = P.sum(axis=1)
        c = P.sum(axis=0)
        S = (P - np.outer(r, c)) / np.sqrt(np.outer(r, c))
        U, sigma, Vt = np.linalg.svd(S, full_matrices=False)
        eigvals = sigma ** 2
        rank = int((sigma > 1e-12).sum())
        n_comp = self.n_components
        if n_comp > rank:
            warnings.warn(f"n_components clamped from {n_comp} to rank {rank}")
            n_comp = rank
        self.n_components_ = n_comp
        self.eigenvalues_ = eigvals
        self.total_inertia_ = float(eigvals.sum())
        self.col_masses_ = c
        self._v = Vt.T
        # principal coordinates of categories: D_c^{-1/2} V Sigma
        self.category_coords_ = (
            self._v[:, :n_comp] * sigma[:n_comp] / np.sqrt(c)[:, None]
        )
        self.category_names_ = [
            f"{q}:{cat}" for q, cats in enumerate(self.categories_)
            for cat in cats
        ]
        return self

    def transform(self, columns):
        """Principal row coordinates for new rows of the fitted variables."""
        check_is_fitted(self, "eigenvalues_")
        if len(columns) != self.q_:
            raise ArgumentError("variable count differs from fit time")
        Z = self._indicator(columns, fitted=True)
        profile = Z / float(self.q_)
        centered = profile - self.col_masses_
        return (centered / np.sqrt(self.col_masses_)) @ \
            self._v[:, :self.n_components_]

    def fit_transform(self, columns):
        return self.fit(columns).transform(columns)


def mca_fit(columns, n_components=2) -> Mca:
    return Mca(n_components=n_components).fit(columns)


def mca_transform(model: Mca, columns):
    return model.transform(columns)
