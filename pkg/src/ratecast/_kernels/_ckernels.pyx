# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot statistical kernels.

Mirrors ``_pykernels`` exactly: Lilliefors/KS sup-distances on sorted
samples and the noncentral chi-square CDF as a Poisson-weighted series of
regularized incomplete gamma values.
"""

from libc.math cimport NAN, erfc, exp, fabs, isfinite, lgamma, log, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

TAIL_TOL = 1e-12
MAX_TERMS = 10_000

cdef double _TAIL_TOL = 1e-12
cdef int _MAX_TERMS = 10_000
cdef double _INV_SQRT2 = 0.7071067811865475244


cdef inline double _norm_cdf(double z) noexcept nogil:
    return 0.5 * erfc(-z * _INV_SQRT2)


cdef double _gammainc_p(double a, double y) noexcept nogil:
    """Regularized lower incomplete gamma P(a, y), series/continued fraction."""
    cdef double ap, summ, term, b, c, d, h, an, delt
    cdef long i
    if y <= 0.0:
        return 0.0
    if y < a + 1.0:
        ap = a
        summ = 1.0 / a
        term = summ
        for i in range(1_000_000):
            ap += 1.0
            term *= y / ap
            summ += term
            if fabs(term) < fabs(summ) * 1e-16:
                break
        return summ * exp(-y + a * log(y) - lgamma(a))
    b = y + 1.0 - a
    c = 1e300
    d = 1.0 / b
    h = d
    for i in range(1, 1_000_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < 1e-300:
            d = 1e-300
        c = b + an / c
        if fabs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        delt = d * c
        h *= delt
        if fabs(delt - 1.0) < 1e-16:
            break
    return 1.0 - exp(-y + a * log(y) - lgamma(a)) * h


cdef double _lilliefors_sorted(const double* x, Py_ssize_t n) noexcept nogil:
    cdef double mean = 0.0, var = 0.0, sd, f, d = 0.0, dp, dm, dn = <double> n
    cdef Py_ssize_t i
    for i in range(n):
        mean += x[i]
    mean /= dn
    for i in range(n):
        var += (x[i] - mean) * (x[i] - mean)
    var /= dn - 1.0
    if not isfinite(var) or var <= 0.0:
        return NAN
    sd = sqrt(var)
    for i in range(n):
        f = _norm_cdf((x[i] - mean) / sd)
        dp = (i + 1.0) / dn - f
        dm = f - i / dn
        if dp > d:
            d = dp
        if dm > d:
            d = dm
    return d


def lilliefors_statistic(sorted_x) -> float:
    """Sup-distance between the ECDF and a normal CDF with estimated moments.

    Returns NaN when the sample variance is zero.
    """
    cdef double[::1] x = np.ascontiguousarray(sorted_x, dtype=np.float64)
    return _lilliefors_sorted(&x[0], x.shape[0])


def lilliefors_null_statistics(sorted_rows):
    """Row-wise Lilliefors statistics for a (replicates, n) matrix."""
    cdef double[:, ::1] x = np.ascontiguousarray(sorted_rows, dtype=np.float64)
    cdef Py_ssize_t nrep = x.shape[0], n = x.shape[1], b
    out_arr = np.empty(nrep, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for b in range(nrep):
            out[b] = _lilliefors_sorted(&x[b, 0], n)
    return out_arr


def ks_statistic_from_cdf(cdf_values) -> float:
    """One-sample KS statistic given fitted CDF values at the sorted sample."""
    cdef double[::1] f = np.ascontiguousarray(cdf_values, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], i
    cdef double d = 0.0, dp, dm, dn = <double> n
    for i in range(n):
        dp = (i + 1.0) / dn - f[i]
        dm = f[i] - i / dn
        if dp > d:
            d = dp
        if dm > d:
            d = dm
    return d


cdef double _ncx2_cdf_one(double y, double hk, const double* w, double a_lo,
                          Py_ssize_t nterms) noexcept nogil:
    """Series value at y = x/2 given precomputed Poisson weights from a_lo."""
    cdef double t, acc, a, lga, ly
    cdef Py_ssize_t idx
    if y <= 0.0:
        return 0.0
    t = _gammainc_p(a_lo, y)
    acc = w[0] * t
    a = a_lo
    lga = lgamma(a_lo + 1.0)
    ly = log(y)
    for idx in range(1, nterms):
        # P(a + 1, y) = P(a, y) - exp(a*log(y) - y - lgamma(a + 1))
        t -= exp(a * ly - y - lga)
        if t < 0.0:
            t = 0.0
        a += 1.0
        lga += log(a)
        acc += w[idx] * t
    if acc < 0.0:
        return 0.0
    if acc > 1.0:
        return 1.0
    return acc


def ncx2_cdf_standard(x, double df, double nonc):
    """Noncentral chi-square CDF (unit scale) via the Poisson mixture series.

    Truncation and cap semantics match ``_pykernels.ncx2_cdf_standard``:
    the Poisson window around the mode keeps all but < TAIL_TOL of the
    mass, and an all-NaN array is returned once MAX_TERMS would be
    exceeded.
    """
    xs = np.ascontiguousarray(x, dtype=np.float64)
    out_arr = np.zeros(xs.shape[0], dtype=np.float64)
    cdef double[::1] xv = xs
    cdef double[::1] out = out_arr
    cdef Py_ssize_t npts = xv.shape[0], i, nterms
    cdef double hk = 0.5 * df, hl = 0.5 * nonc
    cdef long lo, hi, j, mode
    cdef double wsum, a_lo

    if npts == 0:
        return out_arr
    if hl == 0.0:
        with nogil:
            for i in range(npts):
                if xv[i] > 0.0:
                    out[i] = _gammainc_p(hk, 0.5 * xv[i])
        return out_arr

    mode = <long> hl
    j = <long> (7.5 * sqrt(hl) + 25.0)
    lo = mode - j
    if lo < 0:
        lo = 0
    hi = mode + j
    nterms = hi - lo + 1
    if nterms > _MAX_TERMS:
        out_arr[:] = np.nan
        return out_arr

    w_arr = np.empty(nterms, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double lw
    wsum = 0.0
    for j in range(nterms):
        lw = (lo + j) * log(hl) - hl - lgamma(lo + j + 1.0)
        w[j] = exp(lw)
        wsum += w[j]
    if 1.0 - wsum > _TAIL_TOL:
        out_arr[:] = np.nan
        return out_arr

    a_lo = hk + lo
    with nogil:
        for i in range(npts):
            out[i] = _ncx2_cdf_one(0.5 * xv[i], hk, &w[0], a_lo, nterms)
    return out_arr
