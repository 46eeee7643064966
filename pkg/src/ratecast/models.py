"""Vasicek/CIR calibration, positivity shift, forecasting and exact simulation.

Calibration uses the closed-form estimators derived from the approximately
optimal estimating functions for ergodic diffusions (Bibby, Jacobsen &
Sorensen); the observation interval is fixed to one time step and absorbed
into the units of kappa and sigma.  Both models share the conditional-mean
forecast theta + (r_s - theta) * exp(-kappa * steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ratecast.errors import ShiftError

VASICEK = "vasicek"
CIR = "cir"
MODELS = (VASICEK, CIR)

#: denominators smaller than this invalidate a calibration instead of
#: silently amplifying noise
_DENOM_GUARD = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Mean-reversion speed kappa (per step), long-term mean theta (percent)
    and volatility sigma (per sqrt step)."""

    kind: str
    kappa: float
    theta: float
    sigma: float

    def __post_init__(self) -> None:
        if self.kind not in MODELS:
            raise ValueError(f"kind must be one of {MODELS}, got {self.kind!r}")


@dataclass(frozen=True)
class ShiftSpec:
    """Additive translation making a sample strictly positive.

    ``add_p99`` adds the 99th percentile; ``subtract_p1`` subtracts the
    (negative) 1st percentile, which also adds a positive amount.
    """

    alpha: float
    mode: str  # {"none", "add_p99", "subtract_p1"}

    @staticmethod
    def none() -> "ShiftSpec":
        return ShiftSpec(0.0, "none")


@dataclass(frozen=True)
class CalibrationResult:
    params: ModelParams
    shift: ShiftSpec
    n_used: int
    valid: bool

    def with_shift(self, shift: ShiftSpec) -> "CalibrationResult":
        return replace(self, shift=shift)

    def to_dict(self) -> dict:
        return {
            "model": self.params.kind,
            "kappa": self.params.kappa,
            "theta": self.params.theta,
            "sigma": self.params.sigma,
            "shift_alpha": self.shift.alpha,
            "shift_mode": self.shift.mode,
            "n_used": self.n_used,
            "valid": self.valid,
        }


def make_shift(sample) -> ShiftSpec:
    """Choose the translation that moves ``sample`` strictly above zero.

    Already-positive samples need no shift.  Otherwise the 99th percentile
    is added; if that still leaves non-positive values (most of the sample
    negative), the 1st percentile is subtracted instead.  Raises ShiftError
    when neither mode works.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty sample")
    mn = float(x.min())
    if mn > 0.0:
        return ShiftSpec.none()
    p99 = float(np.percentile(x, 99.0))
    if mn + p99 > 0.0:
        return ShiftSpec(p99, "add_p99")
    p1 = float(np.percentile(x, 1.0))
    if mn - p1 > 0.0:
        return ShiftSpec(p1, "subtract_p1")
    raise ShiftError("no percentile shift yields strictly positive values")


def apply_shift(sample, spec: ShiftSpec):
    x = np.asarray(sample, dtype=np.float64)
    if spec.mode == "none":
        return x.copy()
    if spec.mode == "add_p99":
        return x + spec.alpha
    if spec.mode == "subtract_p1":
        return x - spec.alpha
    raise ValueError(f"unknown shift mode {spec.mode!r}")


def unapply_shift(value, spec: ShiftSpec):
    x = np.asarray(value, dtype=np.float64)
    if spec.mode == "none":
        out = x.copy()
    elif spec.mode == "add_p99":
        out = x - spec.alpha
    elif spec.mode == "subtract_p1":
        out = x + spec.alpha
    else:
        raise ValueError(f"unknown shift mode {spec.mode!r}")
    return float(out) if np.isscalar(value) else out


def _finite(*vals: float) -> bool:
    return all(map(math.isfinite, vals))


def calibrate_vasicek(sample, shift: ShiftSpec | None = None) -> CalibrationResult:
    """Closed-form Vasicek estimators (negative rates permitted).

    The autoregression coefficient b estimates exp(-kappa); the result is
    invalid (never an exception) when b is non-positive, the sample is
    degenerate, or any estimate is non-finite.
    """
    r = np.asarray(sample, dtype=np.float64)
    n = r.size
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    shift = shift or ShiftSpec.none()
    x, y = r[:-1], r[1:]
    nm1 = float(n - 1)
    sx, sy = x.sum(), y.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        num = sx * sy / nm1 - float(x @ y)
        den = sx * sx / nm1 - float(x @ x)
        b = num / den if abs(den) > _DENOM_GUARD else float("nan")
        if not (b > 0.0) or not math.isfinite(b) or abs(1.0 - b) < _DENOM_GUARD:
            return _invalid(VASICEK, shift, n)
        kappa = -math.log(b)
        theta = (sy / nm1 - b * sx / nm1) / (1.0 - b)
        resid = y - x * b - theta * (1.0 - b)
        one_m_b2 = 1.0 - b * b
        if abs(one_m_b2) < _DENOM_GUARD:
            return _invalid(VASICEK, shift, n)
        sigma2 = 2.0 * kappa / one_m_b2 * float(resid @ resid) / nm1
    if sigma2 <= 0.0 or not _finite(kappa, theta, sigma2):
        return _invalid(VASICEK, shift, n)
    return CalibrationResult(
        ModelParams(VASICEK, kappa, theta, math.sqrt(sigma2)), shift, n, True
    )


def calibrate_cir(sample, shift: ShiftSpec | None = None) -> CalibrationResult:
    """Closed-form CIR estimators; requires a strictly positive sample."""
    r = np.asarray(sample, dtype=np.float64)
    n = r.size
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if np.any(r <= 0.0):
        raise ValueError("CIR calibration requires strictly positive rates")
    shift = shift or ShiftSpec.none()
    x, y = r[:-1], r[1:]
    nm1 = float(n - 1)
    inv_x = 1.0 / x
    s_ratio = float((y * inv_x).sum())
    s_inv = float(inv_x.sum())
    s_y = float(y.sum())
    s_x = float(x.sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        den = nm1 * nm1 - s_x * s_inv
        if abs(den) < _DENOM_GUARD:
            return _invalid(CIR, shift, n)
        b = (nm1 * s_ratio - s_y * s_inv) / den
        if not (b > 0.0) or not math.isfinite(b) or abs(1.0 - b) < _DENOM_GUARD:
            return _invalid(CIR, shift, n)
        kappa = -math.log(b)
        theta = s_y / nm1 + b * (r[-1] - r[0]) / (nm1 * (1.0 - b))
        resid = y - x * b - theta * (1.0 - b)
        numer = float((inv_x * resid * resid).sum())
        # per-step conditional variance of the square-root process, over sigma^2
        phi = (0.5 * theta - x) * b * b - (theta - x) * b + 0.5 * theta
        denom = float((inv_x * phi).sum()) / kappa
        if abs(denom) < _DENOM_GUARD:
            return _invalid(CIR, shift, n)
        sigma2 = numer / denom
    if sigma2 <= 0.0 or not _finite(kappa, theta, sigma2):
        return _invalid(CIR, shift, n)
    return CalibrationResult(
        ModelParams(CIR, kappa, theta, math.sqrt(sigma2)), shift, n, True
    )


def _invalid(kind: str, shift: ShiftSpec, n: int) -> CalibrationResult:
    return CalibrationResult(
        ModelParams(kind, float("nan"), float("nan"), float("nan")), shift, n, False
    )


def calibrate(sample, model: str, shift: ShiftSpec | None = None) -> CalibrationResult:
    if model == VASICEK:
        return calibrate_vasicek(sample, shift)
    if model == CIR:
        return calibrate_cir(sample, shift)
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")


def forecast_expected(params: ModelParams, r_s: float, steps: int = 1) -> float:
    """Conditional expectation of the rate ``steps`` ahead of observed ``r_s``."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    return params.theta + (r_s - params.theta) * math.exp(-params.kappa * steps)


def _check_sim_params(params: ModelParams, r_0: float) -> None:
    if not _finite(params.kappa, params.theta, params.sigma) or params.sigma <= 0.0:
        raise ValueError(f"cannot simulate with parameters {params}")
    if params.kind == CIR:
        if params.kappa <= 0.0 or params.theta <= 0.0 or r_0 <= 0.0:
            raise ValueError("CIR simulation requires kappa, theta, r_0 > 0")


def _vasicek_step_sd(params: ModelParams) -> float:
    kappa = params.kappa
    if abs(kappa) < 1e-12:
        return params.sigma
    return params.sigma * math.sqrt(-math.expm1(-2.0 * kappa) / (2.0 * kappa))


def simulate_exact_with(rng, params: ModelParams, r_0: float, steps: int) -> np.ndarray:
    """Like :func:`simulate_exact` but drawing from a caller-owned generator."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    _check_sim_params(params, r_0)
    out = np.empty(steps + 1, dtype=np.float64)
    out[0] = r_0
    if params.kind == VASICEK:
        b = math.exp(-params.kappa)
        sd = _vasicek_step_sd(params)
        noise = rng.standard_normal(steps)
        r = r_0
        for t in range(steps):
            r = params.theta + (r - params.theta) * b + sd * noise[t]
            out[t + 1] = r
        return out
    b = math.exp(-params.kappa)
    c = 2.0 * params.kappa / (params.sigma**2 * (1.0 - b))
    df = 4.0 * params.kappa * params.theta / params.sigma**2
    r = r_0
    for t in range(steps):
        nonc = 2.0 * c * r * b
        y = rng.noncentral_chisquare(df, nonc) if nonc > 0.0 else rng.chisquare(df)
        r = y / (2.0 * c)
        out[t + 1] = r
    return out


def simulate_exact(params: ModelParams, r_0: float, steps: int, seed) -> np.ndarray:
    """Simulate ``steps`` transitions from the exact conditional law.

    Vasicek steps are Gaussian with the conditional mean of
    :func:`forecast_expected` and variance sigma^2(1-exp(-2 kappa))/(2 kappa);
    CIR steps are scaled noncentral chi-square draws with
    df = 4 kappa theta / sigma^2.
    """
    return simulate_exact_with(np.random.default_rng(seed), params, r_0, steps)


def transition_sample(params: ModelParams, r_s: float, n: int, seed) -> np.ndarray:
    """Draw ``n`` one-step transitions from ``r_s`` (vectorized)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_sim_params(params, r_s)
    rng = np.random.default_rng(seed)
    if params.kind == VASICEK:
        b = math.exp(-params.kappa)
        mean = params.theta + (r_s - params.theta) * b
        return mean + _vasicek_step_sd(params) * rng.standard_normal(n)
    b = math.exp(-params.kappa)
    c = 2.0 * params.kappa / (params.sigma**2 * (1.0 - b))
    df = 4.0 * params.kappa * params.theta / params.sigma**2
    nonc = 2.0 * c * r_s * b
    y = rng.noncentral_chisquare(df, nonc, n) if nonc > 0.0 else rng.chisquare(df, n)
    return y / (2.0 * c)
