# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``."""

import numpy as np

from libc.math cimport atan2, cos, exp, fabs, log, log1p, sin, sqrt

from bergman_bloch._pykernels import LANCZOS_COEF, LGAMMA1P_COEF

cdef double LANCZOS_G = 5.24218750000000000
cdef double LANCZOS_C0 = 0.999999999999997092
cdef double SQRT_2PI = 2.5066282746310005

cdef double _lcoef[14]
cdef double _tcoef[31]
cdef int _i
for _i in range(14):
    _lcoef[_i] = LANCZOS_COEF[_i]
for _i in range(31):
    _tcoef[_i] = LGAMMA1P_COEF[_i]


cdef inline double _lgamma1p(double e) nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(30, -1, -1):
        acc = acc * e + _tcoef[i]
    return acc * e


cpdef double lgamma(double x):
    cdef double y, tmp, ser, e
    cdef int j
    if 0.75 <= x <= 1.25:
        return _lgamma1p(x - 1.0)
    if 1.75 <= x <= 2.25:
        e = x - 2.0
        return log1p(e) + _lgamma1p(e)
    y = x
    tmp = x + LANCZOS_G
    tmp = (x + 0.5) * log(tmp) - tmp
    ser = LANCZOS_C0
    for j in range(14):
        y += 1.0
        ser += _lcoef[j] / y
    return tmp + log(SQRT_2PI * ser / x)


def hyp2f1_sum(double a, double b, double c, double x, double tol,
               double k_bound, double rho, long max_terms):
    cdef double tail = rho / (1.0 - rho)
    cdef double term = 1.0, total = 1.0, comp = 0.0, t
    cdef long k = 0, used = -1
    with nogil:
        while k < max_terms:
            if term == 0.0 or (k >= k_bound and fabs(term) * tail <= tol):
                used = k + 1
                break
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
            k += 1
            t = total + term
            if fabs(total) >= fabs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
    return total + comp, used


def deriv_integrand(const double complex[:, ::1] W, const double complex[::1] z,
                    m, double s):
    cdef Py_ssize_t k = W.shape[0], n = W.shape[1], row, i
    cdef long[::1] mm = np.ascontiguousarray(m, dtype=np.int_)
    out_arr = np.empty(k, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double tr, ti, wr, wi, mod, arg, pr, pi, qr, qi, tmp
    cdef long p
    with nogil:
        for row in range(k):
            tr = 1.0
            ti = 0.0
            for i in range(n):
                # subtract z_i * conj(w_i)
                wr = W[row, i].real
                wi = W[row, i].imag
                tr -= z[i].real * wr + z[i].imag * wi
                ti -= z[i].imag * wr - z[i].real * wi
            mod = exp(-s * 0.5 * log(tr * tr + ti * ti))
            arg = -s * atan2(ti, tr)
            pr = mod * cos(arg)
            pi = mod * sin(arg)
            for i in range(n):
                wr = W[row, i].real
                wi = -W[row, i].imag
                for p in range(mm[i]):
                    qr = pr * wr - pi * wi
                    qi = pr * wi + pi * wr
                    pr = qr
                    pi = qi
            out[row] = pr + 1j * pi
    return out_arr


def involution(const double complex[::1] a, const double complex[:, ::1] W):
    cdef Py_ssize_t k = W.shape[0], n = W.shape[1], row, i
    cdef double aa = 0.0
    for i in range(n):
        aa += a[i].real * a[i].real + a[i].imag * a[i].imag
    if aa < 1e-30:
        return -np.asarray(W)
    out_arr = np.empty((k, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double s = sqrt(1.0 - aa)
    cdef double complex wa, pj, den
    with nogil:
        for row in range(k):
            wa = 0.0
            for i in range(n):
                wa = wa + W[row, i] * a[i].conjugate()
            den = 1.0 - wa
            for i in range(n):
                pj = wa * a[i] / aa
                out[row, i] = (a[i] - pj - s * (W[row, i] - pj)) / den
    return out_arr
