"""Exact solutions of the two model problems, error measurement and order fitting."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import SolverError
from .model import ProblemSpec, Solution, make_grid
from .quad import MIDPOINT
from .solver import SolverConfig, solve

__all__ = [
    "exact_example1",
    "exact_example2",
    "error_at",
    "OrderFit",
    "estimate_order",
    "theoretical_order",
    "AsymptoticForm",
    "asymptotic_form",
    "ConvergenceReport",
    "convergence_sweep",
    "ROUNDING_FLOOR",
]

# errors below this multiple of machine epsilon count as exact
ROUNDING_FLOOR = 100.0 * np.finfo(float).eps


def exact_example1(m: float, x):
    """Solution of y^(m+1) = int_0^x y(t) dt: (m x / (m+1))^(1/m)."""
    return np.power(m / (m + 1.0) * np.asarray(x, dtype=float), 1.0 / m)[()]


def exact_example2(m: float, x):
    """Solution for the kernel exp(x - t): e^(x/(m+1)) (1 - e^(-m x/(m+1)))^(1/m)."""
    x = np.asarray(x, dtype=float)
    return (np.exp(x / (m + 1.0)) * np.power(-np.expm1(-m * x / (m + 1.0)), 1.0 / m))[()]


def error_at(sol: Solution, exact: Callable, x_star: float) -> float:
    """|exact(x*) - y_n*| where x* must be a grid node (no interpolation)."""
    ratio = x_star / sol.grid.h
    n = int(round(ratio))
    if n < 0 or n > sol.grid.N or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"x*={x_star} is not a node of the grid with h={sol.grid.h}")
    return float(abs(exact(x_star) - sol.values[n]))


class OrderFit(NamedTuple):
    order: float  # math.inf marks exact integration
    r2: float
    used: int
    excluded: int

    @property
    def exact(self) -> bool:
        return math.isinf(self.order)


def estimate_order(samples, scale: float = 1.0) -> OrderFit:
    """Least-squares slope of log(error) against log(h).

    ``samples`` is an iterable of ``(h, error)``.  Errors below
    ``ROUNDING_FLOOR * scale`` are dropped; if none remain the integration
    is exact and ``order`` is infinite.
    """
    pts = [(float(h), float(e)) for h, e in samples]
    hs = [h for h, _ in pts]
    if len(set(hs)) != len(hs):
        raise ValueError("step sizes must be distinct")
    kept = [(h, e) for h, e in pts if e > ROUNDING_FLOOR * scale]
    excluded = len(pts) - len(kept)
    if not kept:
        return OrderFit(math.inf, math.nan, 0, excluded)
    if len(kept) < 2:
        raise ValueError("need at least two samples above the rounding floor")
    lh = np.log([h for h, _ in kept])
    le = np.log([e for _, e in kept])
    slope, intercept = np.polyfit(lh, le, 1)
    resid = le - (slope * lh + intercept)
    ss_tot = float(np.sum((le - le.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return OrderFit(float(slope), r2, len(kept), excluded)


def theoretical_order(m: float, W: float, D: float, C: float, p: float,
                      delta_exp: float, E: float = 1.0) -> float:
    """Exponent of h in the a priori error bound.

    ``1 - W D / (m C E) + min(p, delta_exp - 1)``.  ``E = 1`` is the case of
    nonpositive consistency errors; pass the measured E(h) otherwise.  A
    nonpositive result means the bound guarantees nothing.
    """
    for name, v in (("m", m), ("W", W), ("D", D), ("C", C), ("p", p), ("delta_exp", delta_exp), ("E", E)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return 1.0 - W * D / (m * C * E) + min(p, delta_exp - 1.0)


@dataclass(frozen=True)
class AsymptoticForm:
    coeff: float
    exponent: float

    def __call__(self, x):
        return self.coeff * np.power(x, self.exponent)


def asymptotic_form(C: float, mu: float, m: float) -> AsymptoticForm:
    """Leading behaviour y ~ coeff x^exponent near 0 when K ~ C x^mu."""
    if not C > 0 or mu < 0 or not m > 0:
        raise ValueError("need C > 0, mu >= 0, m > 0")
    coeff = (C * (m / (m + 1.0)) / (1.0 + mu / (m + 1.0))) ** (1.0 / m)
    return AsymptoticForm(coeff=coeff, exponent=(1.0 + mu) / m)


@dataclass
class ConvergenceReport:
    eval_point: float
    samples: list = field(default_factory=list)  # (h, N, error)
    fitted_order: float = math.nan
    theoretical_order: Optional[float] = None
    regression_r2: float = math.nan
    failure: Optional[str] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("h,N,error,log10_h,log10_error\n")
        for h, N, e in self.samples:
            le = math.log10(e) if e > 0 else -math.inf
            buf.write(f"{h:.15e},{N},{e:.15e},{math.log10(h):.15e},{le:.15e}\n")
        buf.write(f"# eval_point={self.eval_point:.15e}\n")
        buf.write(f"# fitted_order={_fmt_order(self.fitted_order)}\n")
        buf.write(f"# regression_r2={self.regression_r2:.15e}\n")
        th = "none" if self.theoretical_order is None else f"{self.theoretical_order:.15e}"
        buf.write(f"# theoretical_order={th}\n")
        if self.failure:
            buf.write(f"# failure={self.failure}\n")
        return buf.getvalue()


def _fmt_order(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.15e}"


def convergence_sweep(spec: ProblemSpec, x_star: float, depths, exact: Callable,
                      richardson: bool = False, rule=MIDPOINT,
                      theoretical: Optional[float] = None) -> ConvergenceReport:
    """Solve on [0, x*] with N = 2^j panels for each depth j and fit the order.

    ``spec.X`` must be at least ``x*``.  A solver failure stops the sweep
    and leaves the samples collected so far in the report.
    """
    if not x_star > 0:
        raise ValueError("x* must be positive")
    sub = spec if spec.X == x_star else ProblemSpec(m=spec.m, kernel=spec.kernel, X=x_star)
    report = ConvergenceReport(eval_point=x_star, theoretical_order=theoretical)
    for j in depths:
        if j < 1:
            raise ValueError("depths must be >= 1 so that N = 2^j is even")
        grid = make_grid(x_star, 2**j)
        try:
            sol = solve(SolverConfig(spec=sub, grid=grid, rule=rule, richardson=richardson))
        except SolverError as exc:
            report.failure = f"depth {j}: {exc}"
            break
        report.samples.append((grid.h, grid.N, error_at(sol, exact, x_star)))
    usable = [(h, e) for h, _, e in report.samples]
    if len(usable) >= 2:
        fit = estimate_order(usable, scale=abs(float(exact(x_star))))
        report.fitted_order, report.regression_r2 = fit.order, fit.r2
    return report
