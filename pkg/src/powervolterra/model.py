"""Problem definition for y(x)^(m+1) = int_0^x K(x,t) y(t) dt.

Kernels are pure two-argument callables that accept scalars or numpy arrays
and carry enough metadata to produce their bounds ``C <= K <= D`` on the
triangle ``0 <= t <= x <= X``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "InvalidKernelError",
    "Kernel",
    "Grid",
    "ProblemSpec",
    "Solution",
    "constant_kernel",
    "exp_convolution_kernel",
    "power_kernel",
    "make_grid",
    "kernel_eval",
    "kernel_bounds",
    "to_original_form",
    "SAMPLE_POINTS",
    "SAFETY_MARGIN",
]

# lattice resolution and relative widening used for sampled bounds
SAMPLE_POINTS = 501
SAFETY_MARGIN = 0.01


class InvalidKernelError(ValueError):
    """Kernel is not bounded away from zero on the triangle."""


@dataclass(frozen=True)
class Kernel:
    """Evaluatable kernel K(x, t).

    ``kind`` identifies built-in kernels so the compiled core can evaluate
    them inline; user expressions use ``kind="expr"``.  ``asym`` holds
    ``(C_a, mu, nu)`` when K(x,t) ~ C_a x^mu t^nu near the origin.
    """

    func: Callable
    name: str
    kind: str = "expr"
    params: tuple = ()
    asym: Optional[tuple] = None
    analytic_bounds: Optional[Callable[[float], tuple]] = field(
        default=None, compare=False, repr=False
    )

    def __call__(self, x, t):
        return self.func(x, t)


def constant_kernel(c: float = 1.0) -> Kernel:
    c = float(c)
    return Kernel(
        func=lambda x, t: np.full(np.broadcast(x, t).shape, c)[()],
        name=f"{c!r}",
        kind="const",
        params=(c,),
        asym=(c, 0.0, 0.0),
        analytic_bounds=lambda X: (c, c),
    )


def exp_convolution_kernel() -> Kernel:
    """K(x,t) = exp(x - t); bounds (1, e^X) on the triangle."""
    return Kernel(
        func=lambda x, t: np.exp(np.subtract(x, t))[()],
        name="exp(x-t)",
        kind="expconv",
        params=(),
        asym=(1.0, 0.0, 0.0),
        analytic_bounds=lambda X: (1.0, math.exp(X)),
    )


def power_kernel(coeff: float, mu: float, nu: float) -> Kernel:
    """Separable K(x,t) = coeff * x^mu * t^nu."""
    if coeff <= 0 or mu < 0 or nu < 0:
        raise ValueError("power kernel needs coeff > 0 and mu, nu >= 0")
    coeff, mu, nu = float(coeff), float(mu), float(nu)

    def bounds(X):
        # x^mu t^nu is nondecreasing in both arguments on the triangle
        lo = coeff if (mu == 0 and nu == 0) else 0.0
        return lo, coeff * X ** (mu + nu)

    return Kernel(
        func=lambda x, t: (coeff * np.power(x, mu) * np.power(t, nu))[()],
        name=f"{coeff!r}*x^{mu!r}*t^{nu!r}",
        kind="power",
        params=(coeff, mu, nu),
        asym=(coeff, mu, nu),
        analytic_bounds=bounds,
    )


def kernel_eval(k: Kernel, x: float, t: float) -> float:
    """Evaluate K(x, t) on the triangle ``0 <= t <= x``."""
    if t < 0 or x < 0:
        raise ValueError(f"kernel arguments must be nonnegative, got x={x}, t={t}")
    if t > x:
        raise ValueError(f"kernel evaluated outside 0 <= t <= x (x={x}, t={t})")
    return float(k.func(float(x), float(t)))


def _sampled_bounds(k: Kernel, X: float) -> tuple:
    s = np.linspace(0.0, X, SAMPLE_POINTS)
    xx, tt = np.meshgrid(s, s, indexing="ij")
    mask = tt <= xx
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(k.func(xx[mask], tt[mask]), xx[mask].shape)
    if not np.all(np.isfinite(vals)):
        raise InvalidKernelError(f"kernel {k.name} is not finite on [0, {X}]^2")
    return float(vals.min()), float(vals.max())


def kernel_bounds(k: Kernel, X: float) -> tuple:
    """Return ``(C, D)`` with ``0 < C <= K(x,t) <= D`` on the triangle.

    Built-in kernels use closed forms.  Other kernels are sampled on a
    501x501 triangular lattice and the extremes widened by 1%.
    """
    if X <= 0:
        raise ValueError("X must be positive")
    if k.analytic_bounds is not None:
        C, D = k.analytic_bounds(X)
    else:
        lo, hi = _sampled_bounds(k, X)
        if lo <= 0:
            raise InvalidKernelError(
                f"kernel {k.name} takes nonpositive values (min {lo:.6g}) on the triangle"
            )
        C, D = lo * (1 - SAFETY_MARGIN), hi * (1 + SAFETY_MARGIN)
    if not C > 0:
        raise InvalidKernelError(f"kernel {k.name} has lower bound {C} <= 0 on [0, {X}]")
    return C, D


@dataclass(frozen=True)
class Grid:
    X: float
    N: int
    h: float

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h


def make_grid(X: float, N: int) -> Grid:
    """Uniform grid ``x_n = n h`` with ``h = X / N``.  N must be even."""
    if not X > 0:
        raise ValueError(f"interval end X must be positive, got {X}")
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if N % 2:
        raise ValueError(f"N must be even so that 2h midpoint panels tile [0, X]; got N={N}")
    N = int(N)
    return Grid(X=float(X), N=N, h=float(X) / N)


@dataclass(frozen=True)
class ProblemSpec:
    m: float
    kernel: Kernel
    X: float
    C: float = field(init=False)
    D: float = field(init=False)

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"exponent m must be positive, got {self.m}")
        if not self.X > 0:
            raise ValueError(f"interval end X must be positive, got {self.X}")
        C, D = kernel_bounds(self.kernel, self.X)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)


@dataclass(frozen=True, eq=False)
class Solution:
    grid: Grid
    values: np.ndarray
    m: float
    meta: dict = field(default_factory=dict)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes


def to_original_form(s: Solution) -> np.ndarray:
    """Map y_n to u_n = y_n^(m+1), the unknown of u = int K u^(1/(m+1))."""
    return np.power(s.values, s.m + 1.0)
