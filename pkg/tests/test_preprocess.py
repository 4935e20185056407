import numpy as np
import pytest

from chicrime import ingest, preprocess
from chicrime.errors import ArgumentError
from chicrime.preprocess import (
    FeatureSpec, KnnImputer, LabelEncoder, OneHotEncoder, Standardizer,
    TablePreprocessor, add_block_flags, derive_block_flags, derive_temporal,
    drop_leakage_features, make_target, zero_coordinate_to_missing,
)


def test_drop_leakage_yields_twelve_columns(crime_csv):
    table = ingest.load_csv(crime_csv)
    dropped = drop_leakage_features(table)
    assert set(dropped.columns) == {
        "Date", "Block", "Primary Type", "Location Description", "Domestic",
        "Beat", "District", "Ward", "Community Area", "X Coordinate",
        "Y Coordinate", "Year",
    }
    assert len(dropped.columns) == 12


def test_drop_leakage_idempotent_and_tolerant(crime_csv):
    table = ingest.load_csv(crime_csv)
    once = drop_leakage_features(table)
    twice = drop_leakage_features(once)
    assert once.columns == twice.columns
    # already lacking a leakage column is fine
    partial = table.with_columns(
        keep=[c for c in table.columns if c != "Arrest"])
    again = drop_leakage_features(partial)
    assert "ID" not in again.columns


def test_derive_temporal_known_timestamp(tmp_path, crime_csv):
    table = ingest.load_csv(crime_csv)
    import datetime as dt
    dates = list(table.column("Date"))
    dates[0] = dt.datetime.strptime("03/15/2023 02:30:00 PM",
                                    ingest.DATE_FORMAT)
    dates[1] = dt.datetime.strptime("01/01/2020 12:00:00 AM",
                                    ingest.DATE_FORMAT)
    dates[2] = None
    table = table.with_columns(
        keep=[c for c in table.columns if c != "Date"], add={"Date": dates})
    derived = derive_temporal(table)
    assert "Date" not in derived.columns
    assert derived.column("Month")[0] == 3
    assert derived.column("Hour")[0] == 14
    assert derived.column("Weekday")[0] == "Wednesday"
    assert derived.column("Week Number")[0] == 11
    assert derived.column("Hour")[1] == 0
    assert derived.column("Month")[1] == 1
    for name in ("Week Number", "Month", "Weekday", "Hour"):
        assert derived.column(name)[2] is None


def test_derive_temporal_ranges(crime_csv):
    table = derive_temporal(ingest.load_csv(crime_csv))
    weeks = [w for w in table.column("Week Number") if w is not None]
    months = [m for m in table.column("Month") if m is not None]
    hours = [h for h in table.column("Hour") if h is not None]
    assert all(1 <= w <= 53 for w in weeks)
    assert all(1 <= m <= 12 for m in months)
    assert all(0 <= h <= 23 for h in hours)


@pytest.mark.parametrize("block,expected", [
    ("001XX N STATE ST", (0, 0, 1, 0)),
    ("0000X W OHIO DR", (0, 1, 0, 0)),
    ("012XX S MICHIGAN AVE", (1, 0, 0, 0)),
    ("033XX N LAKESHORE AV", (1, 0, 0, 0)),
    ("077XX S WOODED TRL", (0, 0, 0, 1)),
    ("005XX E RIVER TR", (0, 0, 0, 1)),
    ("010XX W DIVERSEY PKWY", (0, 0, 0, 0)),
    ("", (0, 0, 0, 0)),
    (None, (0, 0, 0, 0)),
])
def test_block_flags(block, expected):
    flags = derive_block_flags(block)
    assert flags == expected
    assert sum(flags) <= 1


def test_make_target_definition(crime_csv):
    table = ingest.load_csv(crime_csv)
    target = make_target(table)
    primary = table.column("Primary Type")
    for lbl, pos in zip(target.labels, target.kept):
        assert lbl == (1 if primary[pos] == "THEFT" else 0)
    assert target.excluded == 0
    # case-insensitive and trimmed
    vals = list(primary)
    vals[0] = " theft "
    vals[1] = None
    t2 = table.with_columns(
        keep=[c for c in table.columns if c != "Primary Type"],
        add={"Primary Type": vals})
    with pytest.warns(UserWarning):
        target2 = make_target(t2)
    assert target2.labels[0] == 1
    assert target2.excluded == 1
    assert len(target2.labels) == len(table) - 1


def test_make_target_all_theft():
    table = ingest.RawTable(
        ["Primary Type"], {"Primary Type": ["THEFT"] * 5})
    target = make_target(table)
    assert target.labels.tolist() == [1, 1, 1, 1, 1]


def test_label_encoder_lexicographic():
    enc = LabelEncoder().fit(["APARTMENT", "STREET", "ALLEY", "STREET"])
    assert enc.categories_ == ["ALLEY", "APARTMENT", "STREET"]
    codes = enc.transform(["ALLEY", "APARTMENT", "STREET"])
    assert codes.tolist() == [0.0, 1.0, 2.0]
    for c in enc.categories_:
        assert enc.inverse(enc.transform([c])[0]) == c


def test_label_encoder_unseen_reserved_code():
    enc = LabelEncoder().fit(["APARTMENT", "STREET", "ALLEY"])
    with pytest.warns(UserWarning):
        codes = enc.transform(["SIDEWALK"])
    assert codes.tolist() == [3.0]
    assert enc.unseen_count_ == 1


def test_label_encoder_missing_stays_missing():
    enc = LabelEncoder().fit(["A", "B"])
    codes = enc.transform(["A", None, "B"])
    assert np.isnan(codes[1])


def test_one_hot_weekday_shape():
    enc = OneHotEncoder().fit(list(preprocess.WEEKDAY_NAMES))
    assert len(enc.categories_) == 7
    names = enc.column_names("Weekday")
    assert "Weekday_Monday" in names and "Weekday_Sunday" in names
    out = enc.transform(["Friday", "Monday", None])
    assert out.shape == (3, 7)
    assert out[0].sum() == 1.0 and out[1].sum() == 1.0
    assert out[2].sum() == 0.0


def test_one_hot_rows_sum_to_one_for_seen():
    rng = np.random.default_rng(0)
    cats = [str(c) for c in rng.integers(0, 9, size=200)]
    enc = OneHotEncoder().fit(cats)
    out = enc.transform(cats)
    assert np.all(out.sum(axis=1) == 1.0)


def test_standardizer_self_transform():
    rng = np.random.default_rng(1)
    X = rng.normal(3.0, 2.5, size=(500, 3))
    scaled = Standardizer().fit_transform(X)
    assert np.all(np.abs(scaled.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(scaled.std(axis=0) - 1.0) < 1e-9)


def test_standardizer_constant_column_and_frozen_params():
    X = np.array([[1.0, 5.0], [1.0, 7.0], [1.0, 9.0]])
    sc = Standardizer().fit(X)
    out = sc.transform(X)
    assert np.all(out[:, 0] == 0.0)
    # new data transformed with training parameters, not refit
    X_new = np.array([[2.0, 7.0]])
    out_new = sc.transform(X_new)
    assert out_new[0, 1] == pytest.approx((7.0 - 7.0) / X[:, 1].std())
    assert sc.mean_[1] == 7.0


def _oracle_impute(X, kinds, k):
    """Exhaustive linear-scan re-implementation used as the test oracle."""
    dist_cols = [j for j, kd in enumerate(kinds)
                 if kd in ("numeric", "ordinal", "binary")]
    D = X[:, dist_cols]
    mu = np.nanmean(D, axis=0)
    sd = np.nanstd(D, axis=0)
    sd = np.where(sd == 0, 1.0, sd)
    Z = (D - mu) / sd
    out = X.copy()
    for i in range(X.shape[0]):
        for col in range(X.shape[1]):
            if not np.isnan(X[i, col]):
                continue
            dists = []
            for d_idx in range(X.shape[0]):
                if np.isnan(X[d_idx, col]):
                    continue
                acc = 0.0
                for jj in range(len(dist_cols)):
                    a, b = Z[i, jj], Z[d_idx, jj]
                    if not np.isnan(a) and not np.isnan(b):
                        acc += (a - b) ** 2
                dists.append((acc, d_idx))
            dists.sort(key=lambda t: (t[0], t[1]))
            chosen = [d for _, d in dists[:k]]
            vals = X[chosen, col]
            if kinds[col] == "numeric":
                out[i, col] = vals.mean()
            else:
                codes, counts = np.unique(vals, return_counts=True)
                out[i, col] = codes[np.argmax(counts)]
    return out


def test_knn_impute_identity_when_complete():
    X = np.arange(12.0).reshape(4, 3)
    imp = KnnImputer(k=2).fit(X, ["numeric"] * 3)
    assert np.array_equal(imp.transform(X), X)


def test_knn_impute_copies_identical_row():
    X = np.array([
        [1.0, 2.0, 3.0],
        [1.0, 2.0, np.nan],
        [9.0, 9.0, 50.0],
        [8.0, 9.0, 40.0],
    ])
    imp = KnnImputer(k=1).fit(X, ["numeric"] * 3)
    out = imp.transform(X)
    assert out[1, 2] == 3.0


def test_knn_impute_matches_linear_scan_oracle():
    X = np.array([
        [0.0, 0.0, 10.0],
        [0.1, 0.0, 12.0],
        [5.0, 5.0, np.nan],
        [5.1, 4.9, 30.0],
        [4.9, 5.2, 34.0],
        [9.0, 1.0, 50.0],
    ])
    kinds = ["numeric"] * 3
    imp = KnnImputer(k=2).fit(X, kinds)
    out = imp.transform(X)
    expected = _oracle_impute(X, kinds, 2)
    assert np.allclose(out, expected)
    # hand computation: nearest donors of row 2 are rows 3 and 4
    assert out[2, 2] == pytest.approx((30.0 + 34.0) / 2.0)


def test_knn_impute_randomized_against_oracle():
    rng = np.random.default_rng(5)
    for trial in range(8):
        n, d = 14, 4
        X = rng.normal(size=(n, d)) * 3.0
        kinds = ["numeric", "numeric", "nominal", "binary"]
        X[:, 2] = rng.integers(0, 3, size=n)
        X[:, 3] = rng.integers(0, 2, size=n)
        mask = rng.random(size=(n, d)) < 0.15
        # keep at least one observed value per row and per column
        mask[0] = False
        mask[:, 0] = False
        X = X.copy()
        X[mask] = np.nan
        imp = KnnImputer(k=3).fit(X, kinds)
        out = imp.transform(X)
        expected = _oracle_impute(X, kinds, 3)
        assert np.allclose(out, expected), f"trial {trial}"
        assert not np.isnan(out).any()


def test_knn_impute_mode_lexicographic_tie():
    X = np.array([
        [0.0, 2.0],
        [0.0, 1.0],
        [0.0, np.nan],
        [50.0, 0.0],
    ])
    # k=2: donors rows 0 and 1 (equal distance 0), values {2, 1} tie ->
    # smallest code wins
    imp = KnnImputer(k=2).fit(X, ["numeric", "nominal"])
    out = imp.transform(X)
    assert out[2, 1] == 1.0


def test_knn_impute_clamps_and_errors():
    X = np.array([[1.0, np.nan], [2.0, 7.0], [3.0, np.nan]])
    imp = KnnImputer(k=3).fit(X, ["numeric", "numeric"])
    with pytest.warns(UserWarning, match="clamped"):
        out = imp.transform(X)
    assert out[0, 1] == 7.0
    all_nan = np.array([[np.nan, np.nan], [1.0, 2.0], [2.0, 1.0]])
    imp2 = KnnImputer(k=1).fit(all_nan, ["numeric", "numeric"])
    with pytest.raises(ArgumentError):
        imp2.transform(all_nan)


def test_zero_coordinates_marked_missing(crime_csv):
    table = ingest.load_csv(crime_csv)
    xs = list(table.column("X Coordinate"))
    xs[0] = 0.0
    table = table.with_columns(
        keep=[c for c in table.columns if c != "X Coordinate"],
        add={"X Coordinate": xs})
    cleaned = zero_coordinate_to_missing(table)
    assert cleaned.column("X Coordinate")[0] is None
    assert cleaned.column("X Coordinate")[1] == xs[1]


def test_feature_spec_validation():
    with pytest.raises(ArgumentError):
        FeatureSpec("Block", "nominal", "standardize")
    with pytest.raises(ArgumentError):
        FeatureSpec("X Coordinate", "numeric", "one_hot")
    FeatureSpec("X Coordinate", "numeric", "standardize")


def test_preprocessor_end_to_end(crime_csv_with_missing):
    table = ingest.load_csv(crime_csv_with_missing)
    pair = ingest.split(table, 0.8, seed=2)
    feats = ["Beat", "Block", "Community Area", "Domestic", "Hour", "Month",
             "Weekday", "X Coordinate", "Year"]
    prep = TablePreprocessor(feats, scale=True, impute_k=3)
    train = prep.fit_transform(pair.train, split="train")
    test = prep.transform(pair.test, split="test")
    assert train.values.shape[1] == len(feats)
    assert not np.isnan(train.values).any()
    assert not np.isnan(test.values).any()
    assert train.split == "train" and test.split == "test"
    # one matrix column per feature here (no one-hot)
    assert train.column_names == feats


def test_preprocessor_one_hot_expansion(crime_csv):
    table = ingest.load_csv(crime_csv)
    prep = TablePreprocessor(["Weekday", "Domestic"], one_hot=("Weekday",),
                             impute_k=None)
    out = prep.fit_transform(table)
    weekday_cols = [c for c in out.column_names if c.startswith("Weekday_")]
    assert len(weekday_cols) == 7
    block = out.values[:, :7]
    assert set(np.unique(block.sum(axis=1))) <= {0.0, 1.0}


def test_preprocessor_never_reads_test_statistics(crime_csv):
    table = ingest.load_csv(crime_csv)
    pair = ingest.split(table, 0.8, seed=3)
    feats = ["X Coordinate", "Y Coordinate", "Year"]
    prep = TablePreprocessor(feats, scale=True, impute_k=None)
    prep.fit(pair.train)
    mean_before = prep.scaler_.mean_.copy()
    # corrupt the test table wildly; encoder parameters must not move
    xs = [v if v is None else v + 1e9 for v in pair.test.column("X Coordinate")]
    corrupted = pair.test.with_columns(
        keep=[c for c in pair.test.columns if c != "X Coordinate"],
        add={"X Coordinate": xs})
    prep.transform(corrupted)
    assert np.array_equal(prep.scaler_.mean_, mean_before)


def test_preprocessor_deterministic(crime_csv_with_missing):
    table = ingest.load_csv(crime_csv_with_missing)
    feats = ["Beat", "Ward", "Hour", "X Coordinate"]
    a = TablePreprocessor(feats, scale=True).fit_transform(table)
    b = TablePreprocessor(feats, scale=True).fit_transform(table)
    assert np.array_equal(a.values, b.values)
