# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled relaxation inner loop, matching ``_kernels_py``."""

from libc.math cimport fabs, sqrt, INFINITY
from scipy.linalg.cython_blas cimport dgemv, ddot, dcopy

import numpy as np

cdef enum:
    _CONVERGED = 0
    _ITERATION_LIMIT = 1
    _SCREEN_HIT = 2

CONVERGED = _CONVERGED
ITERATION_LIMIT = _ITERATION_LIMIT
SCREEN_HIT = _SCREEN_HIT


cdef double _steps(const double[:, ::1] a, const double[::1] y, double[::1] x,
                   double[::1] z, double t, const double[::1] weights,
                   double big_m, double step, int n_steps,
                   double[::1] r, double[::1] g, double[::1] x_new) noexcept nogil:
    cdef int m = a.shape[0]
    cdef int p = a.shape[1]
    cdef int one = 1
    cdef double d_one = 1.0, d_minus_one = -1.0, d_zero = 0.0
    cdef double t_new, v, thr, beta, restart, diff
    cdef int it, i
    cdef char trans_n = b'N'
    cdef char trans_t = b'T'

    for it in range(n_steps):
        # C-ordered (m, p) is Fortran (p, m): "T" gives a @ z, "N" gives a.T @ r
        dcopy(&m, <double*>&y[0], &one, &r[0], &one)
        dgemv(&trans_t, &p, &m, &d_minus_one, <double*>&a[0, 0], &p,
              &z[0], &one, &d_one, &r[0], &one)
        dgemv(&trans_n, &p, &m, &d_one, <double*>&a[0, 0], &p,
              &r[0], &one, &d_zero, &g[0], &one)
        restart = 0.0
        for i in range(p):
            v = z[i] + step * g[i]
            thr = step * weights[i]
            if v > thr:
                v = v - thr
            elif v < -thr:
                v = v + thr
            else:
                v = 0.0
            if v > big_m:
                v = big_m
            elif v < -big_m:
                v = -big_m
            x_new[i] = v
            restart += (z[i] - v) * (v - x[i])
        t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t))
        if restart > 0.0:
            t_new = 1.0
            for i in range(p):
                z[i] = x_new[i]
                x[i] = x_new[i]
        else:
            beta = (t - 1.0) / t_new
            for i in range(p):
                diff = x_new[i] - x[i]
                z[i] = x_new[i] + beta * diff
                x[i] = x_new[i]
        t = t_new
    return t


def fista_steps(const double[:, ::1] a, const double[::1] y, double[::1] x,
                double[::1] z, double t, const double[::1] weights,
                double big_m, double step, int n_steps):
    cdef int m = a.shape[0]
    cdef int p = a.shape[1]
    if p == 0 or m == 0 or n_steps <= 0:
        return t
    cdef double[::1] r = np.empty(m)
    cdef double[::1] g = np.empty(p)
    cdef double[::1] x_new = np.empty(p)
    with nogil:
        t = _steps(a, y, x, z, t, weights, big_m, step, n_steps, r, g, x_new)
    return t


cdef void _evaluate(const double[:, ::1] a, const double[::1] y, const double[::1] x,
                    const unsigned char[::1] is_bar, double lam, double big_m,
                    double y_sqnorm, int n_one, double[::1] u, double[::1] corr,
                    double* primal, double* dual) noexcept nogil:
    cdef int m = a.shape[0]
    cdef int p = a.shape[1]
    cdef int one = 1
    cdef double d_one = 1.0, d_minus_one = -1.0, d_zero = 0.0
    cdef char trans_n = b'N'
    cdef char trans_t = b'T'
    cdef double ratio = lam / big_m
    cdef double uu = 0.0, axax = 0.0, l1 = 0.0, pen = 0.0, zz, w
    cdef int i
    dcopy(&m, <double*>&y[0], &one, &u[0], &one)
    if p > 0:
        dgemv(&trans_t, &p, &m, &d_minus_one, <double*>&a[0, 0], &p,
              <double*>&x[0], &one, &d_one, &u[0], &one)
        dgemv(&trans_n, &p, &m, &d_one, <double*>&a[0, 0], &p,
              &u[0], &one, &d_zero, &corr[0], &one)
    for i in range(m):
        uu += u[i] * u[i]
        w = y[i] - u[i]
        axax += w * w
    for i in range(p):
        zz = fabs(corr[i]) - ratio
        if is_bar[i]:
            l1 += fabs(x[i])
            if zz > 0.0:
                pen += big_m * zz
        else:
            pen += big_m * zz
    primal[0] = 0.5 * uu + ratio * l1 + lam * n_one
    dual[0] = 0.5 * y_sqnorm - 0.5 * axax - pen


def evaluate(const double[:, ::1] a, const double[::1] y, const double[::1] x,
             const unsigned char[::1] is_bar, double lam, double big_m,
             double y_sqnorm, int n_one, double[::1] u, double[::1] corr):
    cdef double primal, dual
    _evaluate(a, y, x, is_bar, lam, big_m, y_sqnorm, n_one, u, corr, &primal, &dual)
    return primal, dual


def relax_loop(const double[:, ::1] a, const double[::1] y, double[::1] x,
               double[::1] z, double t, const unsigned char[::1] is_bar,
               double lam, double big_m, double step, double y_sqnorm, int n_one,
               double gap_tol, long it0, long it_max, int period,
               double screen_limit, double[::1] u, double[::1] corr):
    cdef int m = a.shape[0]
    cdef int p = a.shape[1]
    cdef double ratio = lam / big_m
    cdef double primal = 0.0, dual = 0.0, worst, zz
    cdef long it = it0
    cdef int i, n_steps, status = -1
    cdef bint any_bar = False
    cdef double[::1] weights = np.empty(p)
    cdef double[::1] r = np.empty(m)
    cdef double[::1] g = np.empty(p)
    cdef double[::1] x_new = np.empty(p)
    for i in range(p):
        weights[i] = ratio if is_bar[i] else 0.0
        if is_bar[i]:
            any_bar = True
    with nogil:
        while True:
            _evaluate(a, y, x, is_bar, lam, big_m, y_sqnorm, n_one, u, corr, &primal, &dual)
            if primal - dual <= gap_tol:
                status = _CONVERGED
                break
            if it > 0 and screen_limit < INFINITY and any_bar:
                worst = 0.0
                for i in range(p):
                    if is_bar[i]:
                        zz = fabs(fabs(corr[i]) - ratio)
                        if zz > worst:
                            worst = zz
                if dual + big_m * worst > screen_limit:
                    status = _SCREEN_HIT
                    break
            if it >= it_max:
                status = _ITERATION_LIMIT
                break
            n_steps = <int>min(<long>period, it_max - it)
            if p > 0:
                t = _steps(a, y, x, z, t, weights, big_m, step, n_steps, r, g, x_new)
            it += n_steps
    return status, it, t, primal, dual
