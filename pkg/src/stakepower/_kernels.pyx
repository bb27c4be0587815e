# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, fabs, lgamma, NAN, isnan

cnp.import_array()

cdef double FPMIN = 1e-300
cdef double CF_EPS = 1e-15
cdef int CF_MAXIT = 10000


cdef inline Py_ssize_t _bisect_right(const double[:] q, Py_ssize_t nq, double v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = nq, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if v < q[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


def pivot_counts(const double[:] x, const unsigned char[:, :] member,
                 const double[:] totals, const double[:] quotas):
    cdef Py_ssize_t n = x.shape[0], R = member.shape[0], nq = quotas.shape[0]
    cdef Py_ssize_t t, i, j, lo, hi
    cdef double a, b
    diff_arr = np.zeros((n, nq + 1), dtype=np.int64)
    cdef cnp.int64_t[:, :] diff = diff_arr
    with nogil:
        for t in range(R):
            for i in range(n):
                a = totals[t] - member[t, i] * x[i]
                b = a + x[i]
                lo = _bisect_right(quotas, nq, a)
                hi = _bisect_right(quotas, nq, b)
                diff[i, lo] += 1
                diff[i, hi] -= 1
        for i in range(n):
            for j in range(1, nq + 1):
                diff[i, j] += diff[i, j - 1]
    return diff_arr[:, :nq].copy()


cdef double _betacf(double a, double b, double x) noexcept nogil:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d, h, aa, delta
    cdef int m, m2
    d = 1.0 - qab * x / qap
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < CF_EPS:
            return h
    return NAN


cdef double _ibeta(double x, double a, double b, double lbeta) noexcept nogil:
    cdef double front, v
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = exp(a * log(x) + b * log1p(-x) - lbeta)
    if x < (a + 1.0) / (a + b + 2.0):
        v = front * _betacf(a, b, x) / a
    else:
        v = 1.0 - front * _betacf(b, a, 1.0 - x) / b
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef double _gap(double lo, double hi, double width, double a, double b, double lbeta,
                 const double[:] gl_x, const double[:] gl_w) noexcept nogil:
    # width is hi - lo, supplied separately to avoid cancellation
    cdef double s, t
    cdef Py_ssize_t g
    if lo <= 0.0:
        return _ibeta(hi, a, b, lbeta)
    if width <= 0.1 * (lo if lo < 1.0 - hi else 1.0 - hi):
        s = 0.0
        for g in range(gl_x.shape[0]):
            t = lo + 0.5 * width * (gl_x[g] + 1.0)
            s += gl_w[g] * exp((a - 1.0) * log(t) + (b - 1.0) * log1p(-t) - lbeta)
        return 0.5 * width * s
    return _ibeta(hi, a, b, lbeta) - _ibeta(lo, a, b, lbeta)


def cond_banzhaf(const double[:] c, double theta, int n, double alpha,
                 const double[:] kw, const double[:] ka, const double[:] kb,
                 const double[:] klbeta, const double[:] gl_x, const double[:] gl_w):
    cdef Py_ssize_t m = c.shape[0], K = kw.shape[0], i, k
    cdef double atom = 0.5 ** (n - 1)
    cdef double ci, hi, lo, width, acc
    cdef bint low = theta <= 0.5, middle
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[:] out = out_arr
    with nogil:
        for i in range(m):
            ci = c[i]
            if (low and ci >= 1.0 - theta) or (not low and ci > theta):
                out[i] = 1.0
                continue
            hi = theta / (1.0 - ci)
            if hi > 1.0:
                hi = 1.0
            lo = (theta - ci) / (1.0 - ci)
            if lo < 0.0:
                lo = 0.0
            width = ci / (1.0 - ci)
            acc = 0.0
            if low:
                for k in range(K):
                    acc += kw[k] * _gap(lo, hi, width, ka[k], kb[k], klbeta[k], gl_x, gl_w)
                if ci > theta:
                    acc += atom
            else:
                middle = ci >= 1.0 - theta
                if middle:
                    hi = 1.0
                    width = 1.0 - lo
                for k in range(K):
                    acc += kw[k] * _gap(lo, hi, width, ka[k], kb[k], klbeta[k], gl_x, gl_w)
                if middle:
                    acc += atom
            if acc < 0.0:
                acc = 0.0
            elif acc > 1.0:
                acc = 1.0
            out[i] = acc
    return out_arr


def ibeta(h, a, b):
    hh, aa, bb = np.broadcast_arrays(np.asarray(h, dtype=np.float64),
                                     np.asarray(a, dtype=np.float64),
                                     np.asarray(b, dtype=np.float64))
    shape = hh.shape
    cdef double[:] hv = np.ascontiguousarray(hh).ravel()
    cdef double[:] av = np.ascontiguousarray(aa).ravel()
    cdef double[:] bv = np.ascontiguousarray(bb).ravel()
    out_arr = np.empty(hv.shape[0], dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(hv.shape[0]):
            out[i] = _ibeta(hv[i], av[i], bv[i],
                            lgamma(av[i]) + lgamma(bv[i]) - lgamma(av[i] + bv[i]))
    return out_arr.reshape(shape)
