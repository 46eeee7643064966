"""Seeded synthetic rate datasets, with piecewise parameter schedules.

Used to generate regime-change fixtures for partitioner and forecast tests
and by the ``simulate`` CLI command.  Columns are simulated independently,
each from a child seed of the dataset seed, so a given (spec, seed) pair
always produces the same matrix.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from ratecast.marketdata import RateMatrix
from ratecast.models import ModelParams, simulate_exact_with


@dataclass(frozen=True)
class Segment:
    """A run of ``steps`` exact transitions under fixed parameters."""

    steps: int
    params: ModelParams

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"segment steps must be >= 1, got {self.steps}")


@dataclass(frozen=True)
class ColumnSpec:
    """One synthetic maturity: a label, a start value and its schedule."""

    label: str
    r_0: float
    segments: tuple[Segment, ...]

    @property
    def length(self) -> int:
        return sum(s.steps for s in self.segments) + 1


def simulate_piecewise(segments, r_0: float, seed) -> np.ndarray:
    """Exact-transition path whose parameters change at segment boundaries."""
    rng = np.random.default_rng(seed)
    out = [np.array([r_0])]
    r = r_0
    for seg in segments:
        path = simulate_exact_with(rng, seg.params, r, seg.steps)
        out.append(path[1:])
        r = float(path[-1])
    return np.concatenate(out)


def synthetic_matrix(
    columns,
    seed,
    start_date: dt.date = dt.date(2010, 12, 31),
    freq_days: int = 7,
) -> RateMatrix:
    """Build a dense RateMatrix from per-column schedules (equal lengths)."""
    columns = list(columns)
    if not columns:
        raise ValueError("need at least one column spec")
    lengths = {c.length for c in columns}
    if len(lengths) != 1:
        raise ValueError(f"column schedules have unequal lengths: {sorted(lengths)}")
    n = lengths.pop()
    values = np.empty((n, len(columns)), dtype=np.float64)
    for idx, col in enumerate(columns):
        child = np.random.SeedSequence((seed, idx))
        values[:, idx] = simulate_piecewise(col.segments, col.r_0, child)
    dates = tuple(start_date + dt.timedelta(days=freq_days * i) for i in range(n))
    return RateMatrix(dates, tuple(c.label for c in columns), values)
