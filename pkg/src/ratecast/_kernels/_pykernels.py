"""Numpy/scipy reference implementations of the hot statistical kernels.

The compiled extension (``_ckernels``) implements the same four functions
with identical semantics; this module is the fallback selected at import
time when the extension is unavailable.  All samples passed to the
Lilliefors/KS kernels must be sorted ascending.
"""

from __future__ import annotations

import numpy as np
from scipy import special

#: residual Poisson tail mass at which the mixture series is truncated
TAIL_TOL = 1e-12
#: hard cap on the number of series terms before giving up (NaN result)
MAX_TERMS = 10_000


def lilliefors_statistic(sorted_x: np.ndarray) -> float:
    """Sup-distance between the ECDF and a normal CDF with estimated moments.

    Returns NaN when the sample variance is zero.
    """
    x = np.asarray(sorted_x, dtype=np.float64)
    n = x.size
    mu = x.mean()
    sd = x.std(ddof=1)
    if not np.isfinite(sd) or sd <= 0.0:
        return float("nan")
    f = special.ndtr((x - mu) / sd)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1.0) / n)
    return float(max(d_plus, d_minus, 0.0))


def lilliefors_null_statistics(sorted_rows: np.ndarray) -> np.ndarray:
    """Row-wise Lilliefors statistics for a (replicates, n) matrix."""
    x = np.asarray(sorted_rows, dtype=np.float64)
    n = x.shape[1]
    mu = x.mean(axis=1, keepdims=True)
    sd = x.std(axis=1, ddof=1, keepdims=True)
    f = special.ndtr((x - mu) / sd)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = np.max(i / n - f, axis=1)
    d_minus = np.max(f - (i - 1.0) / n, axis=1)
    return np.maximum(d_plus, d_minus)


def ks_statistic_from_cdf(cdf_values: np.ndarray) -> float:
    """One-sample KS statistic given fitted CDF values at the sorted sample."""
    f = np.asarray(cdf_values, dtype=np.float64)
    n = f.size
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(i / n - f), np.max(f - (i - 1.0) / n), 0.0))


def _poisson_window(half_nonc: float) -> tuple[int, int]:
    """Index range carrying all but < TAIL_TOL of the Poisson(half_nonc) mass."""
    mode = int(half_nonc)
    width = int(7.5 * np.sqrt(half_nonc) + 25.0)
    return max(mode - width, 0), mode + width


def ncx2_cdf_standard(x: np.ndarray, df: float, nonc: float) -> np.ndarray:
    """Noncentral chi-square CDF (unit scale) via the Poisson mixture series.

    Central chi-square CDFs enter through the regularized lower incomplete
    gamma; terms are generated around the Poisson mode and the series is
    truncated once the residual Poisson mass drops below TAIL_TOL.  Returns
    an all-NaN array when MAX_TERMS would be exceeded.
    """
    xs = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(xs)
    pos = xs > 0.0
    if not np.any(pos):
        return out
    y = 0.5 * xs[pos]
    hk = 0.5 * df
    hl = 0.5 * nonc
    if hl == 0.0:
        out[pos] = special.gammainc(hk, y)
        return out
    lo, hi = _poisson_window(hl)
    if hi - lo + 1 > MAX_TERMS:
        return np.full_like(xs, np.nan)
    js = np.arange(lo, hi + 1, dtype=np.float64)
    logw = js * np.log(hl) - hl - special.gammaln(js + 1.0)
    w = np.exp(logw)
    if 1.0 - w.sum() > TAIL_TOL:
        return np.full_like(xs, np.nan)
    a = hk + js
    # t[j, i] = P(a_j, y_i) built from P(a_lo, y) via
    # P(a + 1, y) = P(a, y) - exp(a*log(y) - y - lgamma(a + 1))
    logc = np.outer(a, np.log(y)) - y[None, :] - special.gammaln(a + 1.0)[:, None]
    c = np.exp(logc)
    t0 = special.gammainc(a[0], y)
    drops = np.vstack([np.zeros((1, y.size)), np.cumsum(c[:-1], axis=0)])
    t = np.clip(t0[None, :] - drops, 0.0, 1.0)
    out[pos] = np.clip(w @ t, 0.0, 1.0)
    return out
