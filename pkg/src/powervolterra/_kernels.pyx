# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: the midpoint iteration and the extremal recurrence."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, pow, isfinite

from powervolterra.errors import SolverError

cnp.import_array()

DEF KIND_CONST = 0
DEF KIND_EXPCONV = 1
DEF KIND_POWER = 2


cdef inline double _kval(int kind, double p0, double p1, double p2,
                         double x, double t) nogil:
    if kind == KIND_CONST:
        return p0
    elif kind == KIND_EXPCONV:
        return exp(x - t)
    return p0 * pow(x, p1) * pow(t, p2)


cdef inline double _root(double s, double inv) nogil:
    return exp(log(s) * inv)


cdef int _finish_node(double[::1] y, Py_ssize_t n, double rhs, double inv) except -1:
    if rhs > 0.0 and isfinite(rhs):
        y[n] = _root(rhs, inv)
        if not isfinite(y[n]):
            raise SolverError(f"non-finite iterate at n={n}", n)
    elif rhs == 0.0 and y[1] == 0.0:
        # zero start: the scheme stays on the trivial solution
        y[n] = 0.0
    else:
        raise SolverError(f"right-hand side {rhs!r} is not positive and finite at n={n}", n)
    return 0


def midpoint_solve_builtin(int kind, params, double m, double h, Py_ssize_t N, double y1):
    """Fill y_0..y_N for a built-in kernel with compensated summation."""
    cdef double p0 = 0.0, p1 = 0.0, p2 = 0.0
    if len(params) > 0:
        p0 = params[0]
    if len(params) > 2:
        p1 = params[1]
        p2 = params[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(N + 1, dtype=np.float64)
    cdef double[::1] y = out
    cdef double inv = 1.0 / (m + 1.0)
    cdef Py_ssize_t n, i, k
    cdef double xn, s, c, term, tmp
    y[1] = y1
    for n in range(2, N + 1):
        k = n % 2
        xn = n * h
        s = 0.5 * _kval(kind, p0, p1, p2, xn, k * h) * y[k]
        c = 0.0
        i = k + 1
        while i < n:
            term = 2.0 * _kval(kind, p0, p1, p2, xn, i * h) * y[i]
            tmp = s + term
            if abs(s) >= abs(term):
                c += (s - tmp) + term
            else:
                c += (term - tmp) + s
            s = tmp
            i += 2
        _finish_node(y, n, h * (s + c), inv)
    return out


def midpoint_solve_rows(rowfunc, double m, double h, Py_ssize_t N, double y1):
    """Same iteration with kernel rows supplied by ``rowfunc(n)``.

    ``rowfunc(n)`` returns K(x_n, x_j) for j = 0..n-1.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(N + 1, dtype=np.float64)
    cdef double[::1] y = out
    cdef const double[::1] row
    cdef double inv = 1.0 / (m + 1.0)
    cdef Py_ssize_t n, i, k
    cdef double s, c, term, tmp
    y[1] = y1
    for n in range(2, N + 1):
        row = np.ascontiguousarray(rowfunc(n), dtype=np.float64)
        k = n % 2
        s = 0.5 * row[k] * y[k]
        c = 0.0
        i = k + 1
        while i < n:
            term = 2.0 * row[i] * y[i]
            tmp = s + term
            if abs(s) >= abs(term):
                c += (s - tmp) + term
            else:
                c += (term - tmp) + s
            s = tmp
            i += 2
        _finish_node(y, n, h * (s + c), inv)
    return out


def simulate_recurrence(double A, double B, double e1, Py_ssize_t n_max):
    """Extremal sequence e_n = (A * sum_{i<n} e_i + B) / n, returned as e_1..e_{n_max}."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_max, dtype=np.float64)
    cdef double[::1] e = out
    cdef double s = e1, c = 0.0, tmp, v
    cdef Py_ssize_t n
    e[0] = e1
    for n in range(2, n_max + 1):
        v = (A * (s + c) + B) / n
        if not isfinite(v):
            raise OverflowError(f"recurrence overflowed at n={n}")
        e[n - 1] = v
        tmp = s + v
        if abs(s) >= abs(v):
            c += (s - tmp) + v
        else:
            c += (v - tmp) + s
        s = tmp
    return out
