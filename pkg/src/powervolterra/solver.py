"""Explicit iteration for y^(m+1) = int_0^x K(x,t) y(t) dt."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _core
from .errors import IntegrationError, SolverError
from .model import Grid, ProblemSpec, Solution, to_original_form
from .oracles import iteration_lower_bound
from .quad import MIDPOINT, WeightRule, adaptive_integrate, epsilon_ratio, generic_rhs

__all__ = [
    "SolverConfig",
    "kernel_row_integral",
    "initial_value",
    "richardson_initial",
    "solve",
    "solve_original",
]


@dataclass(frozen=True)
class SolverConfig:
    spec: ProblemSpec
    grid: Grid
    rule: WeightRule = MIDPOINT
    richardson: bool = False
    start_override: Optional[float] = None

    def __post_init__(self):
        if self.start_override is not None and not self.start_override >= 0:
            raise ValueError("start_override must be nonnegative")
        if self.grid.X > self.spec.X * (1 + 1e-12):
            raise ValueError(f"grid end {self.grid.X} exceeds problem interval {self.spec.X}")


def kernel_row_integral(spec: ProblemSpec, h: float) -> float:
    """int_0^h K(h, t) dt, in closed form for built-in kernels."""
    k = spec.kernel
    if k.kind == "const":
        return k.params[0] * h
    if k.kind == "expconv":
        return math.expm1(h)
    if k.kind == "power":
        c, mu, nu = k.params
        return c * h**mu * h ** (nu + 1.0) / (nu + 1.0)
    f = lambda t: np.asarray(k(h, t), dtype=float)  # noqa: E731
    return adaptive_integrate(f, 0.0, h, atol=0.0, rtol=1e-14)


def initial_value(spec: ProblemSpec, h: float) -> float:
    """Starting value y_1 = (int_0^h K(h,t) dt)^(1/m).

    Bounding y(t) by y(h) inside the integral makes this an overestimate of
    y(h) for increasing solutions and positive kernels.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    try:
        integral = kernel_row_integral(spec, h)
    except IntegrationError as exc:
        raise SolverError(f"starting integral failed: {exc}", 1) from exc
    if not integral > 0:
        raise SolverError(f"int_0^h K(h,t) dt = {integral!r} is not positive", 1)
    return integral ** (1.0 / spec.m)


def _even_panels(spec: ProblemSpec, h: float) -> int:
    N = max(2, int(round(spec.X / h)))
    return N + (N % 2)


def _richardson(spec: ProblemSpec, h: float, N: Optional[int]) -> tuple:
    q = 1.0 / spec.m
    denom = math.expm1(q * math.log(2.0))
    coarse = initial_value(spec, h)
    if not denom > 0 or not math.isfinite(denom):
        warnings.warn(
            f"Richardson denominator 2^(1/m) - 1 vanishes for m={spec.m}; using plain start",
            RuntimeWarning,
            stacklevel=3,
        )
        return coarse, False
    fine = initial_value(spec, 0.5 * h)
    extrapolated = (2.0**q * fine - coarse) / denom
    N = _even_panels(spec, h) if N is None else N
    eps = epsilon_ratio(spec.m, N) * h ** ((spec.m + 1.0) / spec.m)
    floor = iteration_lower_bound(spec.C, spec.m, h, eps, 1)
    if extrapolated >= floor:
        return extrapolated, False
    if floor > 0:
        return floor, True
    warnings.warn(
        "extrapolated start is below a vacuous lower bound; using plain start",
        RuntimeWarning,
        stacklevel=3,
    )
    return coarse, False


def richardson_initial(spec: ProblemSpec, h: float, N: Optional[int] = None) -> float:
    """Extrapolate the starting value from steps h and h/2 with exponent 1/m.

    The result is raised to the iterate lower bound when it falls below it,
    which keeps the iteration away from the trivial solution.  ``N`` is the
    panel count used for the consistency error; it defaults to ``X / h``.
    """
    return _richardson(spec, h, N)[0]


def _midpoint_values(spec: ProblemSpec, grid: Grid, y1: float) -> np.ndarray:
    k = spec.kernel
    m, h, N = spec.m, grid.h, grid.N
    if k.kind in _core.KIND_CODES:
        return _core.midpoint_solve_builtin(_core.KIND_CODES[k.kind], k.params, m, h, N, y1)
    nodes = grid.nodes

    def row(n):
        return np.broadcast_to(np.asarray(k(n * h, nodes[:n]), dtype=float), (n,))

    return _core.midpoint_solve_rows(row, m, h, N, y1)


def _generic_values(cfg: SolverConfig, y1: float) -> np.ndarray:
    spec, grid = cfg.spec, cfg.grid
    y = np.zeros(grid.N + 1)
    y[1] = y1
    inv = 1.0 / (spec.m + 1.0)
    for n in range(2, grid.N + 1):
        rhs = generic_rhs(n, y[:n], spec, grid, cfg.rule)
        if rhs > 0 and math.isfinite(rhs):
            y[n] = math.exp(math.log(rhs) * inv)
        elif rhs == 0 and y1 == 0:
            y[n] = 0.0
        else:
            raise SolverError(f"right-hand side {rhs!r} is not positive and finite at n={n}", n)
    return y


def solve(cfg: SolverConfig) -> Solution:
    """Run the explicit scheme on ``cfg.grid`` and return y_0..y_N."""
    spec, grid = cfg.spec, cfg.grid
    if spec.m < 1:
        warnings.warn(
            f"m={spec.m} < 1: the scheme runs but carries no convergence guarantee",
            RuntimeWarning,
            stacklevel=2,
        )
    clamped = False
    if cfg.start_override is not None:
        y1, start = float(cfg.start_override), "override"
    elif cfg.richardson:
        (y1, clamped), start = _richardson(spec, grid.h, grid.N), "richardson"
    else:
        y1, start = initial_value(spec, grid.h), "rectangle"
    if cfg.rule is MIDPOINT:
        values = _midpoint_values(spec, grid, y1)
    else:
        values = _generic_values(cfg, y1)
    values.setflags(write=False)
    meta = {
        "scheme": cfg.rule.name,
        "start": start,
        "richardson": cfg.richardson,
        "clamped": clamped,
        "backend": _core.BACKEND,
    }
    return Solution(grid=grid, values=values, m=spec.m, meta=meta)


def solve_original(cfg: SolverConfig) -> np.ndarray:
    """Solve and map to u_n = y_n^(m+1)."""
    return to_original_form(solve(cfg))
