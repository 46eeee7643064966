"""Probability machinery: normal and noncentral chi-square CDFs, moment-based
noncentral chi-square fitting, and the Johnson translation system.

Sampling is reproducible by contract: every sampler takes an explicit seed
and draws from ``numpy.random.default_rng`` (PCG64), with no shared
generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ratecast import _kernels
from ratecast.errors import FitError, NumericError

#: fitted noncentrality is capped here; past this the mixture series window
#: would approach the term cap while the fit is statistically indistinguishable
#: from the two-moment one
NONCENTRALITY_CAP = 1e5

#: relative variance floor below which a sample is treated as degenerate
_REL_VAR_FLOOR = 1e-8

_QUANTILE_Z = 0.5
_FAMILY_TOL = 0.1


@dataclass(frozen=True)
class NoncentralChiSquareParams:
    """Scaled noncentral chi-square: X = scale * Y, Y ~ ncx2(df, noncentrality)."""

    df: float
    noncentrality: float
    scale: float

    def __post_init__(self) -> None:
        if not (self.df > 0.0):
            raise ValueError(f"df must be > 0, got {self.df}")
        if not (self.noncentrality >= 0.0):
            raise ValueError(f"noncentrality must be >= 0, got {self.noncentrality}")
        if not (self.scale > 0.0):
            raise ValueError(f"scale must be > 0, got {self.scale}")

    @property
    def mean(self) -> float:
        return self.scale * (self.df + self.noncentrality)


def normal_cdf(x, mean: float = 0.0, sd: float = 1.0):
    """Normal CDF at ``x`` (scalar or array)."""
    if not (sd > 0.0):
        raise ValueError(f"sd must be > 0, got {sd}")
    z = (np.asarray(x, dtype=np.float64) - mean) / sd
    out = special.ndtr(z)
    return float(out) if np.isscalar(x) else out


def ncx2_cdf(x, params: NoncentralChiSquareParams):
    """CDF of the scaled noncentral chi-square at ``x`` (scalar or array).

    Evaluated as a Poisson-weighted series of central chi-square CDFs,
    truncated when the residual Poisson mass falls below 1e-12; raises
    NumericError if the series does not converge within the term cap.
    """
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xs < 0.0):
        raise ValueError("ncx2_cdf requires x >= 0")
    out = _kernels.ncx2_cdf_standard(xs / params.scale, params.df, params.noncentrality)
    if np.any(np.isnan(out)):
        raise NumericError(
            f"mixture series exceeded {_kernels.MAX_TERMS} terms for {params}"
        )
    return float(out[0]) if scalar else out


def _ncx2_from_moments(m1, m2c, m3c, m4c):
    """Vectorized moment-matching fit; returns (df, noncentrality, scale) arrays.

    Tries the three-moment solution (both roots of the scale quadratic,
    fourth-moment tie-break) and falls back to the two-moment central fit
    when no admissible solution exists.
    """
    m1 = np.atleast_1d(np.asarray(m1, dtype=np.float64))
    m2c = np.atleast_1d(np.asarray(m2c, dtype=np.float64))
    m3c = np.atleast_1d(np.asarray(m3c, dtype=np.float64))
    m4c = np.atleast_1d(np.asarray(m4c, dtype=np.float64))

    with np.errstate(divide="ignore", invalid="ignore"):
        # two-moment fallback: noncentrality 0, Gamma-style match
        c = m2c / (2.0 * m1)
        k = 2.0 * m1 * m1 / m2c
        lam = np.zeros_like(m1)
        mu4 = c**4 * (12.0 * (k + 2.0 * lam) ** 2 + 48.0 * (k + 4.0 * lam))
        best_err = np.abs(mu4 - m4c)

        disc = m2c**2 - 0.5 * m1 * m3c
        ok = disc >= 0.0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        for sign in (1.0, -1.0):
            c_i = (m2c + sign * sq) / (2.0 * m1)
            lam_i = m2c / (2.0 * c_i**2) - m1 / c_i
            k_i = m1 / c_i - lam_i
            lam_i = np.clip(lam_i, 0.0, None)
            admissible = (
                ok
                & (c_i > 0.0)
                & (k_i > 0.0)
                & (m2c / (2.0 * c_i**2) - m1 / c_i >= -1e-9 * (k_i + 1.0))
                & (lam_i <= NONCENTRALITY_CAP)
            )
            mu4_i = c_i**4 * (12.0 * (k_i + 2.0 * lam_i) ** 2 + 48.0 * (k_i + 4.0 * lam_i))
            err_i = np.abs(mu4_i - m4c)
            better = admissible & (err_i < best_err)
            c = np.where(better, c_i, c)
            k = np.where(better, k_i, k)
            lam = np.where(better, lam_i, lam)
            best_err = np.where(better, err_i, best_err)
    return k, lam, c


def _central_moments(sample: np.ndarray):
    m1 = sample.mean()
    d = sample - m1
    return m1, float((d**2).mean()), float((d**3).mean()), float((d**4).mean())


def fit_ncx2(sample) -> NoncentralChiSquareParams:
    """Fit a scaled noncentral chi-square to a strictly positive sample.

    Matches the first three raw moments (mean c(k+l), variance 2c^2(k+2l),
    third central moment 8c^3(k+3l)); when the moment system has no
    admissible solution the fit falls back to two-moment matching with
    zero noncentrality.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 4:
        raise FitError(f"need at least 4 observations, got {x.size}")
    if np.any(x <= 0.0):
        raise ValueError("fit_ncx2 requires strictly positive values")
    m1, m2c, m3c, m4c = _central_moments(x)
    if m2c <= _REL_VAR_FLOOR * m1 * m1:
        raise FitError("degenerate sample: variance is (numerically) zero")
    k, lam, c = _ncx2_from_moments(m1, m2c, m3c, m4c)
    return NoncentralChiSquareParams(float(k[0]), float(lam[0]), float(c[0]))


def sample_ncx2(params: NoncentralChiSquareParams, n: int, seed) -> np.ndarray:
    """Draw ``n`` variates; reproducible for a given seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return _sample_ncx2_with(rng, params.df, params.noncentrality, params.scale, n)


def _sample_ncx2_with(rng, df: float, nonc: float, scale: float, size) -> np.ndarray:
    if nonc > 0.0:
        y = rng.noncentral_chisquare(df, nonc, size=size)
    else:
        y = rng.chisquare(df, size=size)
    return scale * y


# ---------------------------------------------------------------------------
# Johnson translation system

_FORWARD = {
    "SU": np.arcsinh,
    "SB": lambda u: np.log(u / (1.0 - u)),
    "SL": np.log,
    "SN": lambda u: u,
}

_INVERSE = {
    "SU": np.sinh,
    "SB": lambda w: 1.0 / (1.0 + np.exp(-w)),
    "SL": np.exp,
    "SN": lambda w: w,
}


@dataclass(frozen=True)
class JohnsonFit:
    """Johnson-system transform z = gamma + delta * f((x - xi) / lam)."""

    family: str
    gamma: float
    delta: float
    xi: float
    lam: float

    def __post_init__(self) -> None:
        if self.family not in _FORWARD:
            raise ValueError(f"unknown Johnson family {self.family!r}")
        if not (self.delta > 0.0 and self.lam > 0.0):
            raise ValueError("delta and lam must be > 0")


def _johnson_from_quantiles(x3: float, x1: float, xm1: float, xm3: float) -> JohnsonFit:
    """Family selection and parameters from four symmetric data quantiles.

    Quantile-ratio method (Slifker & Shapiro, 1980) at normal points
    +-z and +-3z with z = 0.5: the ratio mn/p^2 discriminates SU (>1),
    SB (<1) and the lognormal boundary (=1).
    """
    z = _QUANTILE_Z
    m = x3 - x1
    n = xm1 - xm3
    p = x1 - xm1
    if not (m > 0.0 and n > 0.0 and p > 0.0):
        raise FitError("degenerate quantiles: need strictly increasing spread")
    qr = m * n / (p * p)
    b1 = m / p
    b2 = n / p
    if qr > 1.0 + _FAMILY_TOL:
        delta = 2.0 * z / math.acosh(0.5 * (b1 + b2))
        gamma = delta * math.asinh((b2 - b1) / (2.0 * math.sqrt(b1 * b2 - 1.0)))
        lam = (
            2.0
            * p
            * math.sqrt(b1 * b2 - 1.0)
            / ((b1 + b2 - 2.0) * math.sqrt(b1 + b2 + 2.0))
        )
        xi = 0.5 * (x1 + xm1) + p * (b2 - b1) / (2.0 * (b1 + b2 - 2.0))
        return JohnsonFit("SU", gamma, delta, xi, lam)
    if qr < 1.0 - _FAMILY_TOL:
        a1 = p / m
        a2 = p / n
        prod = (1.0 + a1) * (1.0 + a2)
        delta = z / math.acosh(0.5 * math.sqrt(prod))
        gamma = delta * math.asinh(
            (a2 - a1) * math.sqrt(prod - 4.0) / (2.0 * (a1 * a2 - 1.0))
        )
        lam = p * math.sqrt((prod - 2.0) ** 2 - 4.0) / (a1 * a2 - 1.0)
        xi = 0.5 * (x1 + xm1) - 0.5 * lam + p * (a2 - a1) / (2.0 * (a1 * a2 - 1.0))
        return JohnsonFit("SB", gamma, delta, xi, lam)
    if abs(b1 - 1.0) <= _FAMILY_TOL:
        return JohnsonFit("SN", 0.0, 1.0, 0.0, 1.0)
    if b1 > 1.0:
        delta = 2.0 * z / math.log(b1)
        gamma = delta * math.log((b1 - 1.0) / (p * math.sqrt(b1)))
        xi = 0.5 * (x1 + xm1) - 0.5 * p * (b1 + 1.0) / (b1 - 1.0)
        return JohnsonFit("SL", gamma, delta, xi, 1.0)
    # left-skewed lognormal boundary: no SL form with positive scale; the
    # bounded family is the closest admissible neighbour
    a1 = p / m
    a2 = p / n
    prod = (1.0 + a1) * (1.0 + a2)
    if prod <= 4.0 or a1 * a2 <= 1.0:
        return JohnsonFit("SN", 0.0, 1.0, 0.0, 1.0)
    delta = z / math.acosh(0.5 * math.sqrt(prod))
    gamma = delta * math.asinh(
        (a2 - a1) * math.sqrt(prod - 4.0) / (2.0 * (a1 * a2 - 1.0))
    )
    lam = p * math.sqrt((prod - 2.0) ** 2 - 4.0) / (a1 * a2 - 1.0)
    xi = 0.5 * (x1 + xm1) - 0.5 * lam + p * (a2 - a1) / (2.0 * (a1 * a2 - 1.0))
    return JohnsonFit("SB", gamma, delta, xi, lam)


def fit_johnson(sample) -> JohnsonFit:
    """Fit a Johnson-system transform by the quantile-ratio method.

    For the SN family the transform standardizes by the sample mean and
    standard deviation, so the forward map lands on the standard normal
    scale for every family.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 4:
        raise FitError(f"need at least 4 observations, got {x.size}")
    sd = x.std(ddof=1)
    if not (sd > 0.0):
        raise FitError("degenerate sample: zero variance")
    z = _QUANTILE_Z
    probs = [special.ndtr(v) * 100.0 for v in (3.0 * z, z, -z, -3.0 * z)]
    x3, x1, xm1, xm3 = (float(np.percentile(x, p)) for p in probs)
    fit = _johnson_from_quantiles(x3, x1, xm1, xm3)
    if fit.family == "SN":
        fit = JohnsonFit("SN", 0.0, 1.0, float(x.mean()), float(sd))
    if not all(map(math.isfinite, (fit.gamma, fit.delta, fit.xi, fit.lam))):
        raise FitError("Johnson fit produced non-finite parameters")
    return fit


def johnson_forward(fit: JohnsonFit, x):
    """Apply z = gamma + delta * f((x - xi) / lam); domain errors raise ValueError."""
    u = (np.asarray(x, dtype=np.float64) - fit.xi) / fit.lam
    if fit.family == "SB" and np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("SB transform requires (x - xi)/lam inside (0, 1)")
    if fit.family == "SL" and np.any(u <= 0.0):
        raise ValueError("SL transform requires x > xi")
    out = fit.gamma + fit.delta * _FORWARD[fit.family](u)
    return float(out) if np.isscalar(x) else out


def johnson_inverse(fit: JohnsonFit, z):
    """Exact inverse of :func:`johnson_forward` on its domain."""
    w = (np.asarray(z, dtype=np.float64) - fit.gamma) / fit.delta
    out = fit.xi + fit.lam * _INVERSE[fit.family](w)
    return float(out) if np.isscalar(z) else out
