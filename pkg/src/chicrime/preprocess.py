"""Feature engineering: from a raw crime table to a model-ready matrix.

The column-level transforms (encoders, scaler, imputer) are fit on training
data only and frozen; applying them to new rows never updates their state.
``TablePreprocessor`` wires them together behind a fit/transform interface.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, SchemaError
from .ingest import RawTable
from .validation import check_is_fitted

# Recorded after the fact (or redundant with the target/geography), so
# unusable as predictors.
LEAKAGE_COLUMNS = (
    "ID", "Case Number", "FBI Code", "IUCR", "Arrest", "Updated On",
    "Description", "Location", "Latitude", "Longitude",
)

POSITIVE_CLASS = "THEFT"

WEEKDAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday",
                 "Saturday", "Sunday")

BLOCK_FLAG_TOKENS = {
    "Is_AV": ("AV", "AVE"),
    "Is_DR": ("DR",),
    "Is_ST": ("ST",),
    "Is_TR": ("TR", "TRL"),
}

TEMPORAL_FEATURES = ("Week Number", "Month", "Weekday", "Hour")
BLOCK_FLAG_FEATURES = tuple(BLOCK_FLAG_TOKENS)

# Default kind per feature name; derived features included.
FEATURE_KINDS = {
    "Beat": "nominal",
    "District": "nominal",
    "Ward": "nominal",
    "Community Area": "nominal",
    "Block": "nominal",
    "Location Description": "nominal",
    "Primary Type": "nominal",
    "IUCR": "nominal",
    "FBI Code": "nominal",
    "Weekday": "nominal",
    "Domestic": "binary",
    "Arrest": "binary",
    "Is_AV": "binary",
    "Is_DR": "binary",
    "Is_ST": "binary",
    "Is_TR": "binary",
    "X Coordinate": "numeric",
    "Y Coordinate": "numeric",
    "Latitude": "numeric",
    "Longitude": "numeric",
    "Year": "numeric",
    "Month": "ordinal",
    "Hour": "ordinal",
    "Week Number": "ordinal",
}

_KIND_TRANSFORMS = {
    "numeric": {"none", "standardize"},
    "nominal": {"none", "label_encode", "one_hot"},
    "ordinal": {"none", "label_encode", "one_hot"},
    "binary": {"none"},
}


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str
    transform: str = "none"

    def __post_init__(self):
        if self.kind not in _KIND_TRANSFORMS:
            raise ArgumentError(f"unknown feature kind {self.kind!r}")
        if self.transform not in _KIND_TRANSFORMS[self.kind]:
            raise ArgumentError(
                f"transform {self.transform!r} incompatible with "
                f"kind {self.kind!r} (feature {self.name!r})"
            )


@dataclass(frozen=True)
class ColumnInfo:
    """One column of an encoded matrix."""

    name: str
    kind: str
    feature: str
    scaled: bool = False


@dataclass
class EncodedMatrix:
    values: np.ndarray
    columns: list
    encoders: dict = field(default_factory=dict)
    split: Optional[str] = None

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def column_names(self):
        return [c.name for c in self.columns]

    def kinds(self):
        return [c.kind for c in self.columns]


@dataclass
class TargetVector:
    labels: np.ndarray
    kept: np.ndarray           # row positions retained from the input table
    excluded: int = 0
    positive_class: str = POSITIVE_CLASS


def drop_leakage_features(table: RawTable) -> RawTable:
    """Remove post-hoc and redundant columns; idempotent and tolerant."""
    keep = [c for c in table.columns if c not in LEAKAGE_COLUMNS]
    return table.with_columns(keep=keep)


def derive_temporal(table: RawTable) -> RawTable:
    """Replace Date with Week Number, Month, Weekday, and Hour columns."""
    dates = table.column("Date")
    weeks, months, weekdays, hours = [], [], [], []
    for d in dates:
        if d is None:
            weeks.append(None)
            months.append(None)
            weekdays.append(None)
            hours.append(None)
        else:
            weeks.append(d.isocalendar()[1])
            months.append(d.month)
            weekdays.append(WEEKDAY_NAMES[d.weekday()])
            hours.append(d.hour)
    keep = [c for c in table.columns if c != "Date"]
    return table.with_columns(keep=keep, add={
        "Week Number": weeks, "Month": months,
        "Weekday": weekdays, "Hour": hours,
    })


def derive_block_flags(block) -> tuple:
    """Street-type indicator flags from a block address's trailing token."""
    if not block:
        return (0, 0, 0, 0)
    tokens = str(block).strip().upper().split()
    if not tokens:
        return (0, 0, 0, 0)
    last = tokens[-1]
    return tuple(int(last in toks) for toks in BLOCK_FLAG_TOKENS.values())


def add_block_flags(table: RawTable) -> RawTable:
    blocks = table.column("Block")
    flags = [derive_block_flags(b) for b in blocks]
    cols = {name: [f[i] for f in flags]
            for i, name in enumerate(BLOCK_FLAG_TOKENS)}
    return table.with_columns(add=cols)


def zero_coordinate_to_missing(table: RawTable) -> RawTable:
    """Coordinates recorded as 0 mean 'location unknown'; mark them missing."""
    add = {}
    keep = list(table.columns)
    for name in ("X Coordinate", "Y Coordinate"):
        if table.has_column(name):
            vals = [None if v == 0 else v for v in table.column(name)]
            add[name] = vals
    if not add:
        return table
    data = {c: (add[c] if c in add else table.column(c)) for c in keep}
    return RawTable(keep, data, row_ids=table.row_ids,
                    provenance=table.provenance)


def make_target(table: RawTable) -> TargetVector:
    """1 for theft, 0 otherwise; rows with no primary type are dropped."""
    raw = table.column("Primary Type")
    labels, kept = [], []
    excluded = 0
    for i, v in enumerate(raw):
        if v is None:
            excluded += 1
            continue
        labels.append(1 if str(v).strip().upper() == POSITIVE_CLASS else 0)
        kept.append(i)
    if excluded:
        warnings.warn(f"excluded {excluded} rows with missing Primary Type")
    return TargetVector(labels=np.asarray(labels, dtype=np.int64),
                        kept=np.asarray(kept, dtype=np.int64),
                        excluded=excluded)


class LabelEncoder:
    """Map categories to consecutive integer codes in sorted order.

    Unseen categories at transform time go to the reserved code ``k``
    (number of fitted categories); missing values stay missing (NaN).
    """

    def fit(self, values):
        seen = {v for v in values if v is not None}
        if not seen:
            raise ArgumentError("label encoder needs at least one "
                                "non-missing value")
        self.categories_ = sorted(seen)
        self._codes = {c: i for i, c in enumerate(self.categories_)}
        return self

    def transform(self, values):
        check_is_fitted(self, "categories_")
        out = np.full(len(values), np.nan)
        unknown = len(self.categories_)
        unseen = 0
        for i, v in enumerate(values):
            if v is None:
                continue
            code = self._codes.get(v)
            if code is None:
                out[i] = unknown
                unseen += 1
            else:
                out[i] = code
        self.unseen_count_ = unseen
        if unseen:
            warnings.warn(
                f"{unseen} value(s) unseen at fit time mapped to reserved "
                f"code {unknown}"
            )
        return out

    def fit_transform(self, values):
        return self.fit(values).transform(values)

    def inverse(self, code):
        check_is_fitted(self, "categories_")
        return self.categories_[int(code)]


class OneHotEncoder:
    """Expand a categorical column into one indicator column per category.

    Rows with missing or unseen values get an all-zero block.
    """

    def fit(self, values):
        seen = {v for v in values if v is not None}
        if not seen:
            raise ArgumentError("one-hot encoder needs at least one "
                                "non-missing value")
        self.categories_ = sorted(seen)
        self._index = {c: i for i, c in enumerate(self.categories_)}
        return self

    def transform(self, values):
        check_is_fitted(self, "categories_")
        out = np.zeros((len(values), len(self.categories_)))
        for i, v in enumerate(values):
            if v is None:
                continue
            j = self._index.get(v)
            if j is not None:
                out[i, j] = 1.0
        return out

    def fit_transform(self, values):
        return self.fit(values).transform(values)

    def column_names(self, prefix):
        return [f"{prefix}_{c}" for c in self.categories_]


class Standardizer:
    """Column-wise (x - mean) / sd with parameters frozen at fit time.

    Fitting ignores missing cells; a constant column maps to all zeros.
    """

    def fit(self, X):
        X = np.asarray(X, dtype=np.float64)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            self.mean_ = np.nanmean(X, axis=0)
            self.sd_ = np.nanstd(X, axis=0)
        self.mean_ = np.where(np.isnan(self.mean_), 0.0, self.mean_)
        self.sd_ = np.where(np.isnan(self.sd_), 0.0, self.sd_)
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = np.asarray(X, dtype=np.float64)
        sd = np.where(self.sd_ == 0.0, 1.0, self.sd_)
        out = (X - self.mean_) / sd
        out[:, self.sd_ == 0.0] = 0.0
        return out

    def fit_transform(self, X):
        return self.fit(X).transform(X)


class KnnImputer:
    """Fill missing cells from the k nearest donor rows.

    Distance is Euclidean over the mutually observed numeric-valued columns
    (kinds numeric/ordinal/binary), z-scored with donor statistics. Numeric
    cells take the donor mean, encoded categorical cells the donor mode
    (smallest code on ties). Donors must have the target cell observed.
    """

    def __init__(self, k=3):
        if k < 1:
            raise ArgumentError(f"k must be >= 1, got {k}")
        self.k = k

    def fit(self, X, kinds):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ArgumentError("imputer expects a 2-D matrix")
        if len(kinds) != X.shape[1]:
            raise ArgumentError("kinds length must match column count")
        self.kinds_ = list(kinds)
        self.donors_ = X.copy()
        self.dist_cols_ = np.array(
            [j for j, k_ in enumerate(kinds)
             if k_ in ("numeric", "ordinal", "binary")],
            dtype=np.intp,
        )
        if self.dist_cols_.size == 0:
            raise ArgumentError("no numeric-valued columns available for "
                                "the imputation distance")
        D = X[:, self.dist_cols_]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            mu = np.nanmean(D, axis=0)
            sd = np.nanstd(D, axis=0)
        mu = np.where(np.isnan(mu), 0.0, mu)
        sd = np.where((sd == 0.0) | np.isnan(sd), 1.0, sd)
        self._mu, self._sd = mu, sd
        Z = (D - mu) / sd
        self._donor_mask = ~np.isnan(Z)
        self._donor_z = np.where(self._donor_mask, Z, 0.0)
        self._donor_sq = self._donor_z ** 2
        self._cell_observed = ~np.isnan(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "donors_")
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.donors_.shape[1]:
            raise ArgumentError("column count differs from fit time")
        out = X.copy()
        missing_rows = np.flatnonzero(np.isnan(X).any(axis=1))
        if missing_rows.size == 0:
            return out
        all_nan = np.isnan(X[missing_rows]).all(axis=1)
        if all_nan.any():
            bad = missing_rows[all_nan][0]
            raise ArgumentError(f"row {bad} has no observed feature values")

        Zq = (X[missing_rows][:, self.dist_cols_] - self._mu) / self._sd
        q_mask = ~np.isnan(Zq)
        Zq = np.where(q_mask, Zq, 0.0)

        # Group rows sharing an observed-distance-column pattern so the
        # donor scan is a few matrix products per group.
        patterns = {}
        for local, row in enumerate(missing_rows):
            patterns.setdefault(q_mask[local].tobytes(), []).append(local)

        clamped = 0
        for key, locals_ in patterns.items():
            obs = np.frombuffer(key, dtype=bool)
            J = np.flatnonzero(obs)
            Q = Zq[np.asarray(locals_)][:, J]
            M = self._donor_mask[:, J]
            A = self._donor_z[:, J]
            # squared distance over mutually observed columns
            d2 = (
                (Q ** 2) @ M.T
                - 2.0 * Q @ A.T
                + self._donor_sq[:, J].sum(axis=1)
            )
            np.maximum(d2, 0.0, out=d2)
            for qi, local in enumerate(locals_):
                row = missing_rows[local]
                miss_cols = np.flatnonzero(np.isnan(X[row]))
                for col in miss_cols:
                    eligible = np.flatnonzero(self._cell_observed[:, col])
                    if eligible.size == 0:
                        raise ArgumentError(
                            f"no donors observe column index {col}"
                        )
                    k = self.k
                    if eligible.size < k:
                        k = eligible.size
                        clamped += 1
                    order = np.argsort(d2[qi, eligible], kind="stable")[:k]
                    chosen = eligible[order]
                    vals = self.donors_[chosen, col]
                    if self.kinds_[col] == "numeric":
                        out[row, col] = vals.mean()
                    else:
                        codes, counts = np.unique(vals, return_counts=True)
                        out[row, col] = codes[np.argmax(counts)]
        if clamped:
            warnings.warn(
                f"k clamped below {self.k} for {clamped} cell(s): "
                "not enough eligible donors"
            )
        return out

    def fit_transform(self, X, kinds):
        return self.fit(X, kinds).transform(X)


def default_specs(features, one_hot=(), scale=False):
    """FeatureSpecs with the library's default kind/transform per feature."""
    specs = []
    for name in features:
        kind = FEATURE_KINDS.get(name)
        if kind is None:
            raise SchemaError(f"unknown feature {name!r}")
        if kind == "nominal":
            transform = "one_hot" if name in one_hot else "label_encode"
        elif kind == "numeric" and scale:
            transform = "standardize"
        else:
            transform = "none"
        specs.append(FeatureSpec(name=name, kind=kind, transform=transform))
    return specs


def _numeric_column(values):
    out = np.full(len(values), np.nan)
    for i, v in enumerate(values):
        if v is not None:
            out[i] = float(v)
    return out


class TablePreprocessor:
    """Fit encoders/scaler/imputer on a training table, then encode tables.

    Parameters
    ----------
    features : list of str or FeatureSpec
        Columns of the output matrix, in order. Derived features
        (Week Number, Month, Weekday, Hour, Is_AV/DR/ST/TR) are computed
        from Date and Block on demand.
    one_hot : iterable of str
        Nominal features to expand as indicators rather than label codes.
    scale : bool
        When true, every non-binary, non-indicator column is standardized
        with training statistics (distance-based models need this).
    impute_k : int or None
        Neighbor count for missing-cell imputation; None disables it.
    """

    def __init__(self, features, one_hot=(), scale=False, impute_k=3):
        self.features = list(features)
        self.one_hot = tuple(one_hot)
        self.scale = scale
        self.impute_k = impute_k

    def _specs(self):
        if self.features and isinstance(self.features[0], FeatureSpec):
            return list(self.features)
        return default_specs(self.features, one_hot=self.one_hot,
                             scale=self.scale)

    def _prepare_table(self, table):
        specs = self._specs()
        names = {s.name for s in specs}
        table = zero_coordinate_to_missing(table)
        if names & set(TEMPORAL_FEATURES):
            if not table.has_column("Week Number"):
                table = derive_temporal(table)
        if names & set(BLOCK_FLAG_FEATURES):
            if not table.has_column("Is_AV"):
                table = add_block_flags(table)
        return table

    def fit(self, table: RawTable):
        specs = self._specs()
        table = self._prepare_table(table)
        self.encoders_ = {}
        for spec in specs:
            values = table.column(spec.name)
            if spec.transform == "label_encode":
                self.encoders_[spec.name] = LabelEncoder().fit(values)
            elif spec.transform == "one_hot":
                self.encoders_[spec.name] = OneHotEncoder().fit(values)
        self.specs_ = specs
        matrix, columns = self._encode(table)
        scale_cols = np.array(
            [c.kind != "binary" and c.feature not in self.one_hot
             for c in columns]
        ) if self.scale else np.zeros(len(columns), dtype=bool)
        self.scale_cols_ = scale_cols
        if scale_cols.any():
            self.scaler_ = Standardizer().fit(matrix[:, scale_cols])
            matrix = self._apply_scale(matrix)
        self.columns_ = [
            ColumnInfo(c.name, c.kind, c.feature, scaled=bool(s))
            for c, s in zip(columns, scale_cols)
        ]
        if self.impute_k is not None:
            self.imputer_ = KnnImputer(k=self.impute_k).fit(
                matrix, [c.kind for c in columns]
            )
        return self

    def _encode(self, table):
        blocks, columns = [], []
        for spec in self.specs_:
            values = table.column(spec.name)
            if spec.transform == "label_encode":
                blocks.append(
                    self.encoders_[spec.name].transform(values)[:, None]
                )
                columns.append(ColumnInfo(spec.name, spec.kind, spec.name))
            elif spec.transform == "one_hot":
                enc = self.encoders_[spec.name]
                blocks.append(enc.transform(values))
                columns.extend(
                    ColumnInfo(n, "binary", spec.name)
                    for n in enc.column_names(spec.name)
                )
            else:
                col = _numeric_column(values)
                blocks.append(col[:, None])
                columns.append(ColumnInfo(spec.name, spec.kind, spec.name))
        matrix = np.hstack(blocks) if blocks else np.empty((len(table), 0))
        return matrix, columns

    def _apply_scale(self, matrix):
        if self.scale_cols_.any():
            matrix = matrix.copy()
            matrix[:, self.scale_cols_] = self.scaler_.transform(
                matrix[:, self.scale_cols_]
            )
        return matrix

    def transform(self, table: RawTable, split=None) -> EncodedMatrix:
        check_is_fitted(self, "specs_")
        table = self._prepare_table(table)
        matrix, _ = self._encode(table)
        matrix = self._apply_scale(matrix)
        if self.impute_k is not None:
            matrix = self.imputer_.transform(matrix)
        encoders = dict(self.encoders_)
        if self.scale_cols_.any():
            encoders["__scaler__"] = self.scaler_
        return EncodedMatrix(values=matrix, columns=list(self.columns_),
                             encoders=encoders, split=split)

    def fit_transform(self, table: RawTable, split="train") -> EncodedMatrix:
        return self.fit(table).transform(table, split=split)
