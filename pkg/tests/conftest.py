import csv
import datetime as dt

import numpy as np
import pytest

HEADER = [
    "ID", "Case Number", "Date", "Block", "IUCR", "Primary Type",
    "Description", "Location Description", "Arrest", "Domestic", "Beat",
    "District", "Ward", "Community Area", "FBI Code", "X Coordinate",
    "Y Coordinate", "Year", "Updated On", "Latitude", "Longitude", "Location",
]

# Weighted so THEFT is the most frequent label, as in the real extract.
PRIMARY_TYPES = [
    ("THEFT", 0.22), ("BATTERY", 0.18), ("CRIMINAL DAMAGE", 0.11),
    ("NARCOTICS", 0.10), ("ASSAULT", 0.07), ("OTHER OFFENSE", 0.06),
    ("BURGLARY", 0.06), ("MOTOR VEHICLE THEFT", 0.05), ("ROBBERY", 0.04),
    ("DECEPTIVE PRACTICE", 0.04), ("CRIMINAL TRESPASS", 0.03),
    ("WEAPONS VIOLATION", 0.02), ("PUBLIC PEACE VIOLATION", 0.02),
]

LOCATION_DESCS = [
    "STREET", "RESIDENCE", "APARTMENT", "SIDEWALK", "OTHER", "ALLEY",
    "PARKING LOT/GARAGE(NON.RESID.)", "SMALL RETAIL STORE", "RESTAURANT",
]

STREET_SUFFIXES = ["ST", "AVE", "AV", "DR", "BLVD", "TR", "TRL", "RD", "PL"]
STREET_NAMES = ["STATE", "MICHIGAN", "OHIO", "HALSTED", "WESTERN", "PULASKI",
                "KEDZIE", "ASHLAND", "CICERO", "MADISON"]

# IUCR -> FBI code pairs kept consistent so the two codes correlate.
IUCR_FBI = [
    ("0820", "06"), ("0460", "08B"), ("1320", "14"), ("2022", "18"),
    ("0560", "08A"), ("0610", "05"), ("0910", "07"), ("0320", "03"),
    ("1130", "11"), ("1330", "26"), ("1811", "18"), ("0486", "08B"),
]


def synthetic_rows(n_rows, seed, missing_rate=0.0):
    """Generate plausible Chicago-schema rows (list of string cells)."""
    rng = np.random.default_rng(seed)
    labels = [t for t, _ in PRIMARY_TYPES]
    weights = np.array([w for _, w in PRIMARY_TYPES])
    weights = weights / weights.sum()
    rows = []
    for i in range(n_rows):
        label_idx = rng.choice(len(labels), p=weights)
        primary = labels[label_idx]
        iucr, fbi = IUCR_FBI[label_idx % len(IUCR_FBI)]
        base = dt.datetime(2015, 1, 1) + dt.timedelta(
            minutes=int(rng.integers(0, 60 * 24 * 365 * 8)))
        block = "%03dXX %s %s %s" % (
            rng.integers(0, 120),
            rng.choice(["N", "S", "E", "W"]),
            STREET_NAMES[rng.integers(0, len(STREET_NAMES))],
            STREET_SUFFIXES[rng.integers(0, len(STREET_SUFFIXES))],
        )
        x = float(rng.integers(1_100_000, 1_205_000))
        y = float(rng.integers(1_810_000, 1_950_000))
        lat = 41.6 + (y - 1_810_000) / 1_400_000 * 0.4
        lon = -87.9 + (x - 1_100_000) / 1_050_000 * 0.4
        beat = int(rng.integers(1, 26)) * 100 + int(rng.integers(0, 5))
        district = beat // 100
        ward = int(rng.integers(1, 51))
        community = int(rng.integers(1, 78))
        row = [
            str(10_000_000 + i),
            "HZ%06d" % i,
            base.strftime("%m/%d/%Y %I:%M:%S %p"),
            block,
            iucr,
            primary,
            "DESCRIPTION OF %s" % primary,
            LOCATION_DESCS[rng.integers(0, len(LOCATION_DESCS))],
            "true" if rng.random() < 0.2 else "false",
            "true" if rng.random() < 0.15 else "false",
            str(beat),
            str(district),
            str(ward),
            str(community),
            fbi,
            repr(x),
            repr(y),
            str(base.year),
            (base + dt.timedelta(days=7)).strftime("%m/%d/%Y %I:%M:%S %p"),
            "%.9f" % lat,
            "%.9f" % lon,
            "(%.9f, %.9f)" % (lat, lon),
        ]
        if missing_rate:
            for j in (12, 13, 15, 16):  # Ward, Community Area, X, Y
                if rng.random() < missing_rate:
                    row[j] = ""
        rows.append(row)
    return rows


def write_crime_csv(path, n_rows, seed=0, missing_rate=0.0):
    rows = synthetic_rows(n_rows, seed, missing_rate=missing_rate)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    return path


@pytest.fixture
def crime_csv(tmp_path):
    return write_crime_csv(tmp_path / "crimes.csv", 300, seed=7)


@pytest.fixture
def crime_csv_with_missing(tmp_path):
    return write_crime_csv(tmp_path / "crimes_missing.csv", 240, seed=11,
                           missing_rate=0.1)
