"""Chicago crime CSV ingestion: load, validate, shuffle, sample, and split.

Tables are immutable after construction. Row identity is the source row
index, carried through every shuffle/split/sample so downstream audits can
verify that train and test never share a row.
"""

import csv
import math
import time
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

import numpy as np

from .errors import ArgumentError, ParseError, SchemaError

DATE_FORMAT = "%m/%d/%Y %I:%M:%S %p"

# Published column order of the crimes extract.
COLUMNS = (
    "ID",
    "Case Number",
    "Date",
    "Block",
    "IUCR",
    "Primary Type",
    "Description",
    "Location Description",
    "Arrest",
    "Domestic",
    "Beat",
    "District",
    "Ward",
    "Community Area",
    "FBI Code",
    "X Coordinate",
    "Y Coordinate",
    "Year",
    "Updated On",
    "Latitude",
    "Longitude",
    "Location",
)

_MISSING_TOKENS = {"", "na"}


def _is_missing(cell: str) -> bool:
    return cell is None or cell.strip().lower() in _MISSING_TOKENS


def _parse_int(cell: str):
    try:
        return int(cell)
    except ValueError:
        # Beat/Ward occasionally appear float-formatted ("12.0").
        f = float(cell)
        if f != int(f):
            raise ValueError(f"not an integer: {cell!r}")
        return int(f)


def _parse_float(cell: str) -> float:
    return float(cell)


def _parse_bool(cell: str) -> bool:
    low = cell.strip().lower()
    if low in ("true", "y", "1"):
        return True
    if low in ("false", "n", "0"):
        return False
    raise ValueError(f"not a boolean: {cell!r}")


def _parse_date(cell: str) -> datetime:
    return datetime.strptime(cell.strip(), DATE_FORMAT)


def _parse_str(cell: str) -> str:
    return cell


_PARSERS = {
    "ID": _parse_int,
    "Case Number": _parse_str,
    "Date": _parse_date,
    "Block": _parse_str,
    "IUCR": _parse_str,
    "Primary Type": _parse_str,
    "Description": _parse_str,
    "Location Description": _parse_str,
    "Arrest": _parse_bool,
    "Domestic": _parse_bool,
    "Beat": _parse_int,
    "District": _parse_int,
    "Ward": _parse_int,
    "Community Area": _parse_int,
    "FBI Code": _parse_str,
    "X Coordinate": _parse_float,
    "Y Coordinate": _parse_float,
    "Year": _parse_int,
    "Updated On": _parse_date,
    "Latitude": _parse_float,
    "Longitude": _parse_float,
    "Location": _parse_str,
}


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, datetime):
        return value.strftime(DATE_FORMAT)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Provenance:
    source: str
    row_count: int
    loaded_at: float


@dataclass(frozen=True)
class CrimeRecord:
    """One typed row of the 22-column extract; None marks a missing cell."""

    id: Optional[int]
    case_number: Optional[str]
    date: Optional[datetime]
    block: Optional[str]
    iucr: Optional[str]
    primary_type: Optional[str]
    description: Optional[str]
    location_description: Optional[str]
    arrest: Optional[bool]
    domestic: Optional[bool]
    beat: Optional[int]
    district: Optional[int]
    ward: Optional[int]
    community_area: Optional[int]
    fbi_code: Optional[str]
    x_coordinate: Optional[float]
    y_coordinate: Optional[float]
    year: Optional[int]
    updated_on: Optional[datetime]
    latitude: Optional[float]
    longitude: Optional[float]
    location: Optional[str]


class RawTable:
    """Columnar table of parsed cells. None is the missing mark.

    Columns are stored as plain lists keyed by column name; ``row_ids``
    carries each row's identity (source row index, or inherited identity
    for derived tables).
    """

    def __init__(self, columns, data, row_ids=None, provenance=None):
        self.columns = tuple(columns)
        self._data = {name: list(values) for name, values in data.items()}
        lengths = {len(v) for v in self._data.values()}
        if len(self._data) != len(self.columns):
            raise SchemaError("data keys do not match declared columns")
        if lengths and len(lengths) != 1:
            raise SchemaError(f"ragged columns: lengths {sorted(lengths)}")
        n = lengths.pop() if lengths else 0
        if row_ids is None:
            row_ids = list(range(n))
        if len(row_ids) != n:
            raise SchemaError("row_ids length does not match row count")
        self.row_ids = list(row_ids)
        self.provenance = provenance

    def __len__(self):
        return len(self.row_ids)

    @property
    def n_rows(self):
        return len(self.row_ids)

    def column(self, name):
        if name not in self._data:
            raise SchemaError(f"no such column: {name!r}")
        return self._data[name]

    def has_column(self, name):
        return name in self._data

    def record(self, i) -> CrimeRecord:
        if set(self.columns) != set(COLUMNS):
            raise SchemaError("record() requires the full 22-column schema")
        return CrimeRecord(*(self._data[c][i] for c in COLUMNS))

    def take(self, indices) -> "RawTable":
        """New table holding the given row positions, identities preserved."""
        data = {
            name: [vals[i] for i in indices]
            for name, vals in self._data.items()
        }
        row_ids = [self.row_ids[i] for i in indices]
        return RawTable(self.columns, data, row_ids=row_ids,
                        provenance=self.provenance)

    def with_columns(self, keep=None, add=None) -> "RawTable":
        """New table with a column subset and/or extra columns appended."""
        keep = list(self.columns) if keep is None else list(keep)
        data = {name: self._data[name] for name in keep}
        columns = list(keep)
        for name, values in (add or {}).items():
            if len(values) != len(self):
                raise SchemaError(f"new column {name!r} has wrong length")
            data[name] = list(values)
            columns.append(name)
        return RawTable(columns, data, row_ids=self.row_ids,
                        provenance=self.provenance)


@dataclass(frozen=True)
class SplitPair:
    train: RawTable
    test: RawTable
    ratio: float
    seed: int


def load_csv(path, strict=False) -> RawTable:
    """Parse a crimes CSV into a RawTable.

    In lenient mode (default) any unparseable cell becomes a missing mark;
    in strict mode it raises a row-addressed ParseError. A header that does
    not contain all 22 published columns raises SchemaError.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file has no header row")
        header = [h.strip() for h in header]
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing required column(s): {', '.join(missing)}"
            )
        positions = [header.index(c) for c in COLUMNS]
        parsers = [_PARSERS[c] for c in COLUMNS]

        data = {c: [] for c in COLUMNS}
        cols = [data[c] for c in COLUMNS]
        n = 0
        for row_no, row in enumerate(reader, start=2):
            for col, pos, parse, name in zip(cols, positions, parsers, COLUMNS):
                cell = row[pos] if pos < len(row) else ""
                if _is_missing(cell):
                    col.append(None)
                    continue
                try:
                    col.append(parse(cell))
                except (ValueError, OverflowError) as exc:
                    if strict:
                        raise ParseError(
                            f"{path}:{row_no}: column {name!r}: {exc}",
                            row=row_no, column=name,
                        ) from exc
                    col.append(None)
            n += 1

    provenance = Provenance(source=str(path), row_count=n,
                            loaded_at=time.time())
    return RawTable(COLUMNS, data, provenance=provenance)


def write_csv(table: RawTable, path) -> None:
    """Write a table back out in the same CSV dialect it was read in."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.columns)
        cols = [table.column(c) for c in table.columns]
        for i in range(len(table)):
            writer.writerow([_format_cell(col[i]) for col in cols])


def shuffle(table: RawTable, seed: int) -> RawTable:
    """Seeded random permutation of the rows."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(table))
    return table.take(perm.tolist())


def train_size(n: int, ratio: float) -> int:
    """Number of training rows for an n-row table: floor(ratio * n)."""
    if not 0.0 < ratio < 1.0:
        raise ArgumentError(f"split ratio must be in (0, 1), got {ratio}")
    return math.floor(ratio * n)


def split(table: RawTable, ratio: float, seed: int) -> SplitPair:
    """Random row-level split; |train| = floor(ratio * n)."""
    n_train = train_size(len(table), ratio)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(table))
    train = table.take(perm[:n_train].tolist())
    test = table.take(perm[n_train:].tolist())
    return SplitPair(train=train, test=test, ratio=ratio, seed=seed)


def sample(table: RawTable, n: int, seed: int) -> RawTable:
    """Uniform subsample of n rows without replacement, original order kept."""
    if n > len(table):
        raise ArgumentError(
            f"cannot sample {n} rows from a table of {len(table)}"
        )
    if n < 0:
        raise ArgumentError(f"sample size must be non-negative, got {n}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(table), size=n, replace=False)
    chosen.sort()
    return table.take(chosen.tolist())
