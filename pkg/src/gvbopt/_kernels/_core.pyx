# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same interface, model codes, and numerical scheme as ``_pykernels``; see
that module for the reference semantics.  The only differences are C loop
order and floating-point summation order, which stay within roundoff.
"""

import numpy as np

from libc.math cimport exp, fabs, pow

cdef double[32] GL_X
cdef double[32] GL_W

_nodes, _weights = np.polynomial.legendre.leggauss(32)
for _i in range(32):
    GL_X[_i] = _nodes[_i]
    GL_W[_i] = _weights[_i]

cdef double REL_TOL = 1e-12
cdef int MAX_PANELS = 1024


cdef inline double _mu(int vcode, double p0, double p1, double c) nogil:
    if vcode == 0:
        return p0 + p1 * c
    elif vcode == 1:
        return p0 * exp(p1 * c)
    return p0 * pow(1.0 + c * c * c, p1)


cdef inline double _flux(int fcode, double fpar, double x) nogil:
    cdef double t
    if fcode == 0:
        t = fpar * pow(x, 0.25) + (1.0 - fpar)
        t = t * t
        return 1.0 / (t * t)
    return pow(x, -fpar)


cdef double _gl_panels(int vcode, double p0, double p1, double k,
                       double a, double b, int n_panels) nogil:
    cdef double h = (b - a) / n_panels
    cdef double half = 0.5 * h
    cdef double total = 0.0
    cdef double mid
    cdef int p, i
    for p in range(n_panels):
        mid = a + (p + 0.5) * h
        for i in range(32):
            total += half * GL_W[i] * (k / _mu(vcode, p0, p1, mid + half * GL_X[i]))
    return total


cdef double _mob_integral(int vcode, double p0, double p1, double k,
                          double a, double b) nogil:
    cdef double prev = _gl_panels(vcode, p0, p1, k, a, b, 1)
    cdef double cur
    cdef int n = 2
    while n <= MAX_PANELS:
        cur = _gl_panels(vcode, p0, p1, k, a, b, n)
        if fabs(cur - prev) <= REL_TOL * fabs(cur):
            return cur
        prev = cur
        n *= 2
    return prev


def mobility_integral(int vcode, double p0, double p1, double k,
                      double a, double b):
    return _mob_integral(vcode, p0, p1, k, a, b)


def times_tfe(int vcode, double p0, double p1, double k, c):
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = cv.shape[0] - 1
    out = np.empty(n + 1)
    cdef double[::1] ov = out
    cdef double m_top = k / _mu(vcode, p0, p1, cv[0])
    cdef double integral
    cdef int j
    for j in range(n):
        integral = _mob_integral(vcode, p0, p1, k, cv[j + 1], cv[j])
        ov[j] = 1.0 - m_top * (cv[j] - cv[j + 1]) / integral
    ov[n] = 1.0
    return out


def times_gk(int fcode, double fpar, int vcode, double p0, double p1,
             double k, c):
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = cv.shape[0] - 1
    out = np.empty(n + 1)
    cdef double[::1] ov = out
    cdef double lead = 1.0
    cdef double f
    cdef int j
    for j in range(n):
        f = _flux(fcode, fpar,
                  _mu(vcode, p0, p1, cv[j]) / _mu(vcode, p0, p1, cv[j + 1]))
        ov[j] = 1.0 - f * lead
        lead *= f * f
    ov[n] = 1.0
    return out


def partition_volume_tfe(int vcode, double p0, double p1, double k, c):
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = cv.shape[0] - 1
    cdef double m_top = k / _mu(vcode, p0, p1, cv[0])
    cdef double total = 0.0
    cdef double width, integral
    cdef int j
    for j in range(n):
        width = cv[j] - cv[j + 1]
        integral = _mob_integral(vcode, p0, p1, k, cv[j + 1], cv[j])
        total += width * (1.0 - m_top * width / integral)
    return total + cv[n]


def partition_volume_gk(int fcode, double fpar, int vcode, double p0,
                        double p1, double k, c):
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef int n = cv.shape[0] - 1
    cdef double lead = 1.0
    cdef double total = 0.0
    cdef double f
    cdef int j
    for j in range(n):
        f = _flux(fcode, fpar,
                  _mu(vcode, p0, p1, cv[j]) / _mu(vcode, p0, p1, cv[j + 1]))
        total += (cv[j] - cv[j + 1]) * (1.0 - f * lead)
        lead *= f * f
    return total + cv[n]


def scan_two_tfe(grid, prefix, double m_top):
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] F = np.ascontiguousarray(prefix, dtype=np.float64)
    cdef int top = g.shape[0] - 1
    out = np.empty(top - 1)
    cdef double[::1] ov = out
    cdef double c_lo = g[0]
    cdef double c_hi = g[top]
    cdef double f_top = F[top]
    cdef double t1, t2
    cdef int i
    for i in range(1, top):
        t1 = 1.0 - m_top * (c_hi - g[i]) / (f_top - F[i])
        t2 = 1.0 - m_top * (g[i] - c_lo) / F[i]
        ov[i - 1] = (c_hi - g[i]) * t1 + (g[i] - c_lo) * t2 + c_lo
    return out


def scan_three_tfe(grid, prefix, double m_top):
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] F = np.ascontiguousarray(prefix, dtype=np.float64)
    cdef int top = g.shape[0] - 1
    cdef double c_lo = g[0]
    cdef double c_hi = g[top]
    cdef double f_top = F[top]
    cdef double best_v = np.inf
    cdef int best_i = -1
    cdef int best_j = -1
    cdef double t1, t2, t3, v
    cdef int i, j
    for i in range(2, top):
        t1 = 1.0 - m_top * (c_hi - g[i]) / (f_top - F[i])
        for j in range(1, i):
            t2 = 1.0 - m_top * (g[i] - g[j]) / (F[i] - F[j])
            t3 = 1.0 - m_top * (g[j] - c_lo) / F[j]
            v = ((c_hi - g[i]) * t1 + (g[i] - g[j]) * t2
                 + (g[j] - c_lo) * t3 + c_lo)
            if v < best_v:
                best_v = v
                best_i = i
                best_j = j
    return best_v, best_i, best_j


def scan_two_gk(int fcode, double fpar, grid, mob):
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] m = np.ascontiguousarray(mob, dtype=np.float64)
    cdef int top = g.shape[0] - 1
    out = np.empty(top - 1)
    cdef double[::1] ov = out
    cdef double c_lo = g[0]
    cdef double c_hi = g[top]
    cdef double f1, f2, t1, t2
    cdef int i
    for i in range(1, top):
        f1 = _flux(fcode, fpar, m[i] / m[top])
        f2 = _flux(fcode, fpar, m[0] / m[i])
        t1 = 1.0 - f1
        t2 = 1.0 - f2 * f1 * f1
        ov[i - 1] = (c_hi - g[i]) * t1 + (g[i] - c_lo) * t2 + c_lo
    return out


def scan_three_gk(int fcode, double fpar, grid, mob):
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] m = np.ascontiguousarray(mob, dtype=np.float64)
    cdef int top = g.shape[0] - 1
    cdef double c_lo = g[0]
    cdef double c_hi = g[top]
    cdef double best_v = np.inf
    cdef int best_i = -1
    cdef int best_j = -1
    cdef double f1, f2, f3, t1, t2, t3, v, pair
    cdef int i, j
    for i in range(2, top):
        f1 = _flux(fcode, fpar, m[i] / m[top])
        t1 = 1.0 - f1
        for j in range(1, i):
            f2 = _flux(fcode, fpar, m[j] / m[i])
            f3 = _flux(fcode, fpar, m[0] / m[j])
            t2 = 1.0 - f2 * f1 * f1
            pair = f2 * f1
            t3 = 1.0 - f3 * pair * pair
            v = ((c_hi - g[i]) * t1 + (g[i] - g[j]) * t2
                 + (g[j] - c_lo) * t3 + c_lo)
            if v < best_v:
                best_v = v
                best_i = i
                best_j = j
    return best_v, best_i, best_j
