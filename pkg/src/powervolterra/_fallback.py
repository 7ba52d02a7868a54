"""Pure-Python implementations of the compiled inner loops.

Signatures match ``_kernels.pyx``; sums use ``math.fsum`` so results agree
with the compiled path to rounding.
"""

import math

import numpy as np

from .errors import SolverError

KIND_CONST = 0
KIND_EXPCONV = 1
KIND_POWER = 2


def _builtin_row(kind, params, xn, t):
    if kind == KIND_CONST:
        return np.full(t.shape, params[0])
    if kind == KIND_EXPCONV:
        return np.exp(xn - t)
    c, mu, nu = params
    return c * xn**mu * np.power(t, nu)


def _finish_node(y, n, rhs, inv):
    if rhs > 0.0 and math.isfinite(rhs):
        y[n] = math.exp(math.log(rhs) * inv)
        if not math.isfinite(y[n]):
            raise SolverError(f"non-finite iterate at n={n}", n)
    elif rhs == 0.0 and y[1] == 0.0:
        y[n] = 0.0
    else:
        raise SolverError(f"right-hand side {rhs!r} is not positive and finite at n={n}", n)


def _run(row_at, m, h, N, y1):
    y = np.zeros(N + 1)
    y[1] = y1
    inv = 1.0 / (m + 1.0)
    for n in range(2, N + 1):
        row = row_at(n)
        k = n % 2
        terms = 2.0 * row[k + 1 : n : 2] * y[k + 1 : n : 2]
        s = math.fsum([0.5 * row[k] * y[k], *terms.tolist()])
        _finish_node(y, n, h * s, inv)
    return y


def midpoint_solve_builtin(kind, params, m, h, N, y1):
    t = np.arange(N + 1) * h
    return _run(lambda n: _builtin_row(kind, params, n * h, t[:n]), m, h, N, y1)


def midpoint_solve_rows(rowfunc, m, h, N, y1):
    return _run(lambda n: np.asarray(rowfunc(n), dtype=float), m, h, N, y1)


def simulate_recurrence(A, B, e1, n_max):
    e = np.empty(n_max)
    e[0] = e1
    s, c = e1, 0.0
    for n in range(2, n_max + 1):
        v = (A * (s + c) + B) / n
        if not math.isfinite(v):
            raise OverflowError(f"recurrence overflowed at n={n}")
        e[n - 1] = v
        tmp = s + v
        c += (s - tmp) + v if abs(s) >= abs(v) else (v - tmp) + s
        s = tmp
    return e
