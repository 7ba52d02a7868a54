"""Oracle suites behind ``powervolterra verify``."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .analysis import exact_example1, exact_example2
from .model import ProblemSpec, constant_kernel, make_grid
from .oracles import (
    check_bracketing,
    gronwall_bound,
    iteration_lower_bound,
    recurrence_bound,
    simulate_recurrence,
    zeta_euler_maclaurin,
    zeta_open_interval,
)
from .quad import MIDPOINT, epsilon_max
from .solver import SolverConfig, solve

ZETA_HALF = -1.4603545088095868  # zeta(1/2)

RECURRENCE_A = (0.25, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0)
RECURRENCE_N = 100_000
ITERATION_M = (1.0, 2.0, 10.0)
ITERATION_H = (1e-2, 1e-3)
BRACKET_M = (1.0, 2.0, 10.0)
BRACKET_DEPTHS = range(1, 13)


class CheckResult(NamedTuple):
    suite: str
    check: str
    passed: bool
    value: float
    limit: float


def suite_zeta():
    out = []
    z = zeta_open_interval(0.5)
    out.append(CheckResult("zeta", "zeta(0.5) error", abs(z - ZETA_HALF) <= 1e-8, abs(z - ZETA_HALF), 1e-8))
    s = np.linspace(0.025, 0.975, 20)
    diff = max(abs(zeta_open_interval(v) - zeta_euler_maclaurin(v)) for v in s)
    out.append(CheckResult("zeta", "series vs Euler-Maclaurin, 20 points", diff <= 1e-9, diff, 1e-9))
    prods = [(1.0 - v) * zeta_open_interval(v) for v in s]
    worst = max(max(p for p in prods) , -1.0 - min(prods))
    out.append(CheckResult("zeta", "-1 < A zeta(1-A) < 0", all(-1 < p < 0 for p in prods), worst, 0.0))
    return out


def suite_recurrence(n_max: int = RECURRENCE_N):
    out = []
    for A in RECURRENCE_A:
        rb = recurrence_bound(A, 1.0, 1.0)
        e = simulate_recurrence(A, 1.0, 1.0, n_max)
        n = np.arange(1, n_max + 1, dtype=float)
        ratio = float(np.max(e * n ** (1.0 - A)) / rb.M)
        out.append(CheckResult("recurrence", f"A={A:g}: max e_n n^(1-A) / M",
                               ratio <= 1.0 + 1e-12, ratio, 1.0 + 1e-12))
    return out


def suite_gronwall():
    out = []
    x = np.linspace(1e-6, 1.0, 200)
    for m in (1.0, 2.0, 10.0, 100.0):
        rel = float(np.max(np.abs(gronwall_bound(1.0, 0.0, 0.0, m, x) / exact_example1(m, x) - 1.0)))
        out.append(CheckResult("gronwall", f"m={m:g}: equality case vs exact solution", rel <= 1e-14, rel, 1e-14))
    xs = np.linspace(1e-6, 1e-3, 200)
    for m in (1.0, 2.0, 10.0):
        gap = float(np.min(exact_example2(m, xs) - gronwall_bound(1.0, 0.0, 0.0, m, xs)))
        out.append(CheckResult("gronwall", f"m={m:g}: exp kernel solution above comparison", gap >= 0, gap, 0.0))
    return out


def suite_iteration(X: float = 1.0):
    out = []
    for m in ITERATION_M:
        spec = ProblemSpec(m=m, kernel=constant_kernel(1.0), X=X)
        for h in ITERATION_H:
            N = int(round(X / h))
            grid = make_grid(X, N)
            sol = solve(SolverConfig(spec=spec, grid=grid))
            eps = epsilon_max(grid.h, m, N)
            ratio = eps * grid.h ** (-(m + 1.0) / m)
            n = np.arange(2, N + 1)
            bound = iteration_lower_bound(1.0, m, grid.h, eps, n)
            slack = float(np.min(sol.values[2:] - bound))
            out.append(CheckResult("iteration", f"m={m:g}, h={h:g}: min(y_n - bound)", slack >= 0, slack, 0.0))
            out.append(CheckResult("iteration", f"m={m:g}, h={h:g}: eps(h) h^-(m+1)/m", ratio <= 0.6, ratio, 0.6))
    return out


def suite_bracketing(X: float = 1.0, tol: float = 1e-13):
    out = []
    for m in BRACKET_M:
        spec = ProblemSpec(m=m, kernel=constant_kernel(1.0), X=X)
        worst = -math.inf
        for j in BRACKET_DEPTHS:
            sol = solve(SolverConfig(spec=spec, grid=make_grid(X, 2**j)))
            rep = check_bracketing(sol, lambda x: exact_example1(m, x), MIDPOINT.delta_sign)
            worst = max(worst, rep.worst_violation)
        out.append(CheckResult("bracketing", f"m={m:g}: max(y(x_n) - y_n), N <= 2^12", worst <= tol, worst, tol))
    return out


SUITES = {
    "zeta": suite_zeta,
    "recurrence": suite_recurrence,
    "gronwall": suite_gronwall,
    "iteration": suite_iteration,
    "bracketing": suite_bracketing,
}


def run_suites(names):
    results = []
    for name in names:
        results.extend(SUITES[name]())
    return results
