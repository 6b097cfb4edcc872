# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Gauss-Seidel kernels. Must stay bit-compatible with _pycore."""

import numpy as np
from libc.math cimport fabs


cdef double _residual(const double[:, :, ::1] c, const double[:, ::1] b,
                      const double[:, ::1] p, Py_ssize_t nx, Py_ssize_t ny) nogil:
    cdef Py_ssize_t i, j
    cdef double s, rmax = 0.0
    for i in range(nx):
        for j in range(ny):
            s = b[i, j] - c[4, i, j] * p[i, j]
            if i > 0:
                s -= c[1, i, j] * p[i - 1, j]
                if j > 0:
                    s -= c[0, i, j] * p[i - 1, j - 1]
                if j < ny - 1:
                    s -= c[2, i, j] * p[i - 1, j + 1]
            if j > 0:
                s -= c[3, i, j] * p[i, j - 1]
            if j < ny - 1:
                s -= c[5, i, j] * p[i, j + 1]
            if i < nx - 1:
                s -= c[7, i, j] * p[i + 1, j]
                if j > 0:
                    s -= c[6, i, j] * p[i + 1, j - 1]
                if j < ny - 1:
                    s -= c[8, i, j] * p[i + 1, j + 1]
            if fabs(s) > rmax:
                rmax = fabs(s)
    return rmax


def residual_9pt(const double[:, :, ::1] c, const double[:, ::1] b, const double[:, ::1] p):
    return _residual(c, b, p, p.shape[0], p.shape[1])


def gauss_seidel_9pt(const double[:, :, ::1] c, const double[:, ::1] b, double[:, ::1] p,
                     double omega, double tol, long max_iter):
    """Lexicographic (i outer, j inner) SOR sweeps on a folded 9-point stencil.

    ``c[k]`` holds the coefficient of neighbour ``(di, dj)`` with
    ``k = 3 * (di + 1) + (dj + 1)``; ``p`` is updated in place.
    Returns ``(sweeps, residual)``; sweeps > max_iter signals failure.
    """
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1]
    cdef Py_ssize_t i, j
    cdef long it
    cdef double s, r, rmax, res = 0.0
    cdef long done = max_iter + 1
    with nogil:
        for it in range(max_iter):
            rmax = 0.0
            for i in range(nx):
                for j in range(ny):
                    s = b[i, j]
                    if i > 0:
                        s -= c[1, i, j] * p[i - 1, j]
                        if j > 0:
                            s -= c[0, i, j] * p[i - 1, j - 1]
                        if j < ny - 1:
                            s -= c[2, i, j] * p[i - 1, j + 1]
                    if j > 0:
                        s -= c[3, i, j] * p[i, j - 1]
                    if j < ny - 1:
                        s -= c[5, i, j] * p[i, j + 1]
                    if i < nx - 1:
                        s -= c[7, i, j] * p[i + 1, j]
                        if j > 0:
                            s -= c[6, i, j] * p[i + 1, j - 1]
                        if j < ny - 1:
                            s -= c[8, i, j] * p[i + 1, j + 1]
                    r = s - c[4, i, j] * p[i, j]
                    if fabs(r) > rmax:
                        rmax = fabs(r)
                    p[i, j] += omega * r / c[4, i, j]
            if rmax < tol:
                res = _residual(c, b, p, nx, ny)
                if res < tol:
                    done = it + 1
                    break
        if done > max_iter:
            res = _residual(c, b, p, nx, ny)
    return done, res


def smooth_grid(double[:, ::1] x, double[:, ::1] y, long max_iter, double tol,
                bint winslow):
    """Gauss-Seidel smoothing of interior nodes; boundary rows/columns fixed.

    Returns the max absolute nodal update of every sweep performed.
    """
    cdef Py_ssize_t ni = x.shape[0], nj = x.shape[1]
    cdef Py_ssize_t i, j
    cdef long it
    cdef double xn, yn, dx, dy, upd
    cdef double xxi, yxi, xeta, yeta, a, bt, g, den
    history = []
    for it in range(max_iter):
        upd = 0.0
        with nogil:
            for i in range(1, ni - 1):
                for j in range(1, nj - 1):
                    if winslow:
                        xxi = 0.5 * (x[i + 1, j] - x[i - 1, j])
                        yxi = 0.5 * (y[i + 1, j] - y[i - 1, j])
                        xeta = 0.5 * (x[i, j + 1] - x[i, j - 1])
                        yeta = 0.5 * (y[i, j + 1] - y[i, j - 1])
                        a = xeta * xeta + yeta * yeta
                        bt = xxi * xeta + yxi * yeta
                        g = xxi * xxi + yxi * yxi
                        den = 2.0 * (a + g)
                        xn = (a * (x[i + 1, j] + x[i - 1, j]) + g * (x[i, j + 1] + x[i, j - 1])
                              - 0.5 * bt * (x[i + 1, j + 1] - x[i - 1, j + 1]
                                            - x[i + 1, j - 1] + x[i - 1, j - 1])) / den
                        yn = (a * (y[i + 1, j] + y[i - 1, j]) + g * (y[i, j + 1] + y[i, j - 1])
                              - 0.5 * bt * (y[i + 1, j + 1] - y[i - 1, j + 1]
                                            - y[i + 1, j - 1] + y[i - 1, j - 1])) / den
                    else:
                        xn = 0.25 * (x[i + 1, j] + x[i - 1, j] + x[i, j + 1] + x[i, j - 1])
                        yn = 0.25 * (y[i + 1, j] + y[i - 1, j] + y[i, j + 1] + y[i, j - 1])
                    dx = fabs(xn - x[i, j])
                    dy = fabs(yn - y[i, j])
                    if dx > upd:
                        upd = dx
                    if dy > upd:
                        upd = dy
                    x[i, j] = xn
                    y[i, j] = yn
        history.append(upd)
        if upd < tol:
            break
    return history
