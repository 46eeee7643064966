"""Experiment modes: whole-sample segmented fitting and rolling forecasts.

Fit mode shifts the series positive when needed, partitions it, calibrates
each sub-group (joining groups that are too small or fail to calibrate) and
tracks the market with the one-step conditional-mean path.  Forecast mode
rolls a fixed-size window, re-detects the latest homogeneous sub-window at
every step, and benchmarks the model forecast against an EWMA on the same
trailing window.

The total error aggregate follows the weighted form
sqrt(sum_k (n_k/n) * sum_h e_h^2) with the inner sums unnormalized; note
this is not the weighted mean of the per-group RMSE values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ratecast.errors import PipelineError, RatecastError
from ratecast.models import (
    CalibrationResult,
    ShiftSpec,
    apply_shift,
    calibrate,
    forecast_expected,
    make_shift,
    unapply_shift,
)
from ratecast.partition import Partition, backward_window, forward_partition

SCHEMA_VERSION = 1

#: sub-groups smaller than this are joined with a neighbour before calibration
MIN_CALIBRATION = 12


@dataclass(frozen=True)
class EwmaConfig:
    """Exponentially weighted moving average: decay ``lam`` over a fixed window."""

    lam: float
    window: int

    def __post_init__(self) -> None:
        if not (0.0 < self.lam < 1.0):
            raise ValueError(f"lam must be in (0, 1), got {self.lam}")
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")


def ewma_forecast(window_values, config: EwmaConfig) -> float:
    """Weighted mean with weights proportional to lam^lag (lag 0 = most recent)."""
    x = np.asarray(window_values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty window")
    if x.size != config.window:
        raise ValueError(f"window length {x.size} != configured {config.window}")
    w = config.lam ** np.arange(x.size - 1, -1, -1, dtype=np.float64)
    return float((w @ x) / w.sum())


def rmse(residuals) -> float:
    e = np.asarray(residuals, dtype=np.float64)
    if e.size == 0:
        raise ValueError("empty residuals")
    return float(np.sqrt(np.mean(e * e)))


def total_rmse(group_residuals, n: int) -> float:
    """Weighted whole-sample aggregate sqrt(sum_k (n_k/n) sum_h e_h^2)."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    groups = [np.asarray(g, dtype=np.float64) for g in group_residuals]
    if not groups or any(g.size == 0 for g in groups):
        raise ValueError("empty residual group")
    return float(math.sqrt(sum(g.size / n * float(g @ g) for g in groups)))


@dataclass(frozen=True)
class GroupFit:
    start: int
    end: int
    calibration: CalibrationResult
    rmse: float

    @property
    def size(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class FitReport:
    maturity: str
    model: str
    kind: str
    level: float
    shift: ShiftSpec
    partition: Partition
    per_group: tuple[GroupFit, ...]
    total_rmse: float
    fitted_path: np.ndarray
    group_residuals: tuple[np.ndarray, ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "report": "fit",
            "maturity": self.maturity,
            "model": self.model,
            "kind": self.kind,
            "level": self.level,
            "shift_alpha": self.shift.alpha,
            "shift_mode": self.shift.mode,
            "partition": self.partition.to_dict(),
            "groups": [
                {
                    "start": g.start,
                    "end": g.end,
                    "rmse": g.rmse,
                    "calibration": g.calibration.to_dict(),
                }
                for g in self.per_group
            ],
            "total_rmse": self.total_rmse,
            "total_rmse_note": "sqrt(sum_k (n_k/n) sum_h e_h^2); inner sums unnormalized,"
            " so this is not the weighted mean of the group rmse values",
            "fitted_path": [None if math.isnan(v) else v for v in self.fitted_path],
        }


@dataclass(frozen=True)
class ForecastRecord:
    index: int
    model_forecast: float
    ewma_forecast: float
    realized: float
    window_size: int
    change_point: int
    fallback: bool


@dataclass(frozen=True)
class ForecastReport:
    maturity: str
    model: str
    kind: str
    level: float
    m: int
    ewma: EwmaConfig
    records: tuple[ForecastRecord, ...]
    rmse_model: float
    rmse_ewma: float

    @property
    def window_sizes(self) -> list[int]:
        return [r.window_size for r in self.records]

    @property
    def change_points(self) -> list[int]:
        return [r.change_point for r in self.records]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "report": "forecast",
            "maturity": self.maturity,
            "model": self.model,
            "kind": self.kind,
            "level": self.level,
            "initial_window": self.m,
            "ewma_lambda": self.ewma.lam,
            "rmse_model": self.rmse_model,
            "rmse_ewma": self.rmse_ewma,
            "records": [
                {
                    "index": r.index,
                    "model_forecast": r.model_forecast,
                    "ewma_forecast": r.ewma_forecast,
                    "realized": r.realized,
                    "window_size": r.window_size,
                    "change_point": r.change_point,
                    "fallback": r.fallback,
                }
                for r in self.records
            ],
        }


def _series_values(series) -> tuple[str, np.ndarray]:
    maturity = getattr(series, "maturity", "")
    rates = getattr(series, "rates", series)
    return maturity, np.asarray(rates, dtype=np.float64)


def _merge_small(ranges: list[list[int]]) -> None:
    """Join groups below the minimum calibration size with their successor
    (predecessor for the last group)."""
    while len(ranges) > 1:
        idx = next(
            (i for i, (a, b) in enumerate(ranges) if b - a + 1 < MIN_CALIBRATION), None
        )
        if idx is None:
            return
        if idx + 1 < len(ranges):
            ranges[idx] = [ranges[idx][0], ranges[idx + 1][1]]
            del ranges[idx + 1]
        else:
            ranges[idx - 1] = [ranges[idx - 1][0], ranges[idx][1]]
            del ranges[idx]


def _calibrate_groups(
    values: np.ndarray, groups, model: str, shift: ShiftSpec
) -> list[tuple[tuple[int, int], CalibrationResult]]:
    """Per-group calibration with the join rule for small or invalid groups."""
    ranges = [[a, b] for a, b in groups]
    _merge_small(ranges)
    while True:
        cals = [calibrate(values[a : b + 1], model, shift) for a, b in ranges]
        bad = next((i for i, c in enumerate(cals) if not c.valid), None)
        if bad is None or len(ranges) == 1:
            break
        if bad + 1 < len(ranges):
            ranges[bad] = [ranges[bad][0], ranges[bad + 1][1]]
            del ranges[bad + 1]
        else:
            ranges[bad - 1] = [ranges[bad - 1][0], ranges[bad][1]]
            del ranges[bad]
    return [((a, b), c) for (a, b), c in zip(ranges, cals)]


def _group_path(values: np.ndarray, a: int, b: int, cal: CalibrationResult) -> np.ndarray:
    """One-step conditional-mean path over [a, b], seeded at the first observation.

    Each step conditions on the previous market observation; an invalid
    calibration degrades to the persistence predictor.
    """
    path = np.empty(b - a + 1, dtype=np.float64)
    path[0] = values[a]
    if b > a:
        if cal.valid:
            decay = math.exp(-cal.params.kappa)
            path[1:] = cal.params.theta + (values[a:b] - cal.params.theta) * decay
        else:
            path[1:] = values[a:b]
    return path


def fit_sample(series, kind: str, model: str, level: float = 0.05) -> FitReport:
    """Whole-sample segmented fit: shift, partition, normalize, calibrate, track.

    The fitted path covers every partitioned observation (leftover indices
    are NaN and excluded from all metrics); per-group and total errors are
    computed against the market rates in their original units.
    """
    maturity, x = _series_values(series)
    n = x.size
    if n < 4:
        raise ValueError(f"series must have at least 4 observations, got {n}")
    shift = make_shift(x)
    v = apply_shift(x, shift)
    part = forward_partition(v, kind, level)
    merged = _calibrate_groups(part.values, part.groups, model, shift)

    fitted = np.full(n, np.nan)
    per_group: list[GroupFit] = []
    residuals: list[np.ndarray] = []
    for (a, b), cal in merged:
        fitted[a : b + 1] = unapply_shift(_group_path(part.values, a, b, cal), shift)
        e = x[a : b + 1] - fitted[a : b + 1]
        residuals.append(e)
        per_group.append(GroupFit(a, b, cal, rmse(e)))
    return FitReport(
        maturity=maturity,
        model=model,
        kind=kind,
        level=level,
        shift=shift,
        partition=part,
        per_group=tuple(per_group),
        total_rmse=total_rmse(residuals, n),
        fitted_path=fitted,
        group_residuals=tuple(residuals),
    )


def _model_step(
    win: np.ndarray, kind: str, model: str, level: float, use_partition: bool
) -> tuple[float, int, int]:
    """One rolling-step forecast; returns (forecast, window size, start offset)."""
    shift = make_shift(win)
    v = apply_shift(win, shift)
    m = v.size
    start = 0
    if use_partition:
        sel = backward_window(v, kind, level)
        start = sel.window[0]
        if m - start < MIN_CALIBRATION:
            # join rule: extend past the change point to the minimum size
            start = max(0, m - MIN_CALIBRATION)
    cal = calibrate(v[start:], model, shift)
    if not cal.valid and start > 0:
        start = 0
        cal = calibrate(v, model, shift)
    if not cal.valid:
        raise PipelineError("no valid calibration in window")
    forecast = forecast_expected(cal.params, float(v[-1]), 1)
    return float(unapply_shift(forecast, shift)), m - start, start


def forecast_rolling(
    series,
    kind: str,
    model: str,
    m: int = 52,
    level: float = 0.05,
    ewma_lam: float = 0.94,
    use_partition: bool = True,
) -> ForecastReport:
    """Next-step forecasts over a rolling window of initial size ``m``.

    Each step selects the latest homogeneous sub-window (backward test from
    the newest observation), shifts it positive when required, calibrates
    and forecasts one step ahead; steps with no usable calibration fall back
    to the last observed value and are flagged.  The EWMA benchmark always
    uses the full fixed-size trailing window.
    """
    maturity, x = _series_values(series)
    n = x.size
    if m < 12:
        raise ValueError(f"initial window must be >= 12, got {m}")
    if n <= m:
        raise ValueError(f"series length {n} must exceed the initial window {m}")
    cfg = EwmaConfig(ewma_lam, m)
    records: list[ForecastRecord] = []
    for i in range(m, n):
        win = x[i - m : i]
        ewma_fc = ewma_forecast(win, cfg)
        try:
            fc, wsize, start = _model_step(win, kind, model, level, use_partition)
            fallback = False
        except RatecastError:
            fc, wsize, start = float(x[i - 1]), m, 0
            fallback = True
        records.append(
            ForecastRecord(
                index=i,
                model_forecast=fc,
                ewma_forecast=ewma_fc,
                realized=float(x[i]),
                window_size=wsize,
                change_point=i - m + start,
                fallback=fallback,
            )
        )
    model_resid = [r.realized - r.model_forecast for r in records]
    ewma_resid = [r.realized - r.ewma_forecast for r in records]
    return ForecastReport(
        maturity=maturity,
        model=model,
        kind=kind,
        level=level,
        m=m,
        ewma=cfg,
        records=tuple(records),
        rmse_model=rmse(model_resid),
        rmse_ewma=rmse(ewma_resid),
    )
