"""Rate-matrix ingestion and per-maturity series access.

The on-disk format is a plain CSV with header ``Date,<label>,...``, one row
per observation date, decimal-point numbers and no thousands separators.
Rates are kept in percent units exactly as published (0.606 means 0.606%)
and are never rescaled internally.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np

from ratecast.errors import ClassificationError, LoadError

_DATE_FORMATS = ("%d.%m.%Y", "%Y-%m-%d")


@dataclass(frozen=True)
class RateSeries:
    """Time-ordered observed rates for one maturity."""

    maturity: str
    dates: tuple[dt.date, ...]
    rates: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def observations(self) -> list[tuple[dt.date, float]]:
        return list(zip(self.dates, (float(r) for r in self.rates)))


@dataclass(frozen=True)
class RateMatrix:
    """Dense grid of rates: rows are dates, columns are maturities."""

    dates: tuple[dt.date, ...]
    maturities: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        n_dates, n_mats = self.values.shape
        if n_dates != len(self.dates) or n_mats != len(self.maturities):
            raise LoadError("value grid shape does not match dates/maturities")
        if len(set(self.maturities)) != len(self.maturities):
            raise LoadError("duplicate maturity labels")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise LoadError(f"dates not strictly increasing at {cur}")
        if not np.all(np.isfinite(self.values)):
            raise LoadError("non-finite rate values in matrix")


@dataclass(frozen=True)
class DatasetSplit:
    """Maturity labels split into money-market and term buckets."""

    money_market: tuple[str, ...]
    term: tuple[str, ...]


def _parse_date(text: str, row: int) -> dt.date:
    for fmt in _DATE_FORMATS:
        try:
            return dt.datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    raise LoadError(f"row {row}: unparseable date {text!r}")


def load_rate_matrix(path: str, format: str = "csv") -> RateMatrix:
    """Load a dense date-by-maturity rate grid from ``path``.

    Raises LoadError naming the offending row/column on any malformed,
    missing or unparseable cell.
    """
    if format != "csv":
        raise LoadError(f"unsupported format {format!r}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].strip().lstrip("﻿") != "Date":
            raise LoadError(f"{path}: header must be 'Date,<label>,...'")
        maturities = tuple(label.strip() for label in header[1:])
        if any(not label for label in maturities):
            raise LoadError(f"{path}: blank maturity label in header")
        dates: list[dt.date] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(maturities) + 1:
                raise LoadError(
                    f"row {lineno}: expected {len(maturities) + 1} cells, got {len(row)}"
                )
            dates.append(_parse_date(row[0], lineno))
            parsed = []
            for label, cell in zip(maturities, row[1:]):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise LoadError(
                        f"row {lineno}, column {label!r}: bad value {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise LoadError(f"{path}: no data rows")
    return RateMatrix(tuple(dates), maturities, np.array(rows, dtype=np.float64))


def write_rate_matrix(matrix: RateMatrix, path: str) -> None:
    """Write ``matrix`` in the ingestion CSV format (ISO dates, repr floats)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Date", *matrix.maturities])
        for i, date in enumerate(matrix.dates):
            writer.writerow([date.isoformat(), *(repr(float(v)) for v in matrix.values[i])])


def series_for(matrix: RateMatrix, maturity: str) -> RateSeries:
    """Extract one maturity column, in date order."""
    try:
        col = matrix.maturities.index(maturity)
    except ValueError:
        raise KeyError(maturity) from None
    return RateSeries(maturity, matrix.dates, matrix.values[:, col].copy())


def classify_maturity(label: str) -> str:
    """Classify a maturity label: day-count styled -> money market, '<n>Y' -> term."""
    if "/" in label:
        return "money_market"
    if label.endswith("Y") and label[:-1].isdigit():
        return "term"
    raise ClassificationError(f"maturity label {label!r} fits no known convention")


def split_datasets(matrix: RateMatrix) -> DatasetSplit:
    """Split all maturities into the money-market and term datasets."""
    money, term = [], []
    for label in matrix.maturities:
        if classify_maturity(label) == "money_market":
            money.append(label)
        else:
            term.append(label)
    return DatasetSplit(tuple(money), tuple(term))
