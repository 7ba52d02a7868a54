"""Independent checks of the comparison and recurrence bounds behind the scheme.

Nothing here calls the solver; every function is a closed form or a
brute-force simulation so it can be used to audit solver output.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _core

__all__ = [
    "zeta_open_interval",
    "zeta_euler_maclaurin",
    "RecurrenceBound",
    "recurrence_bound",
    "simulate_recurrence",
    "gronwall_bound",
    "iteration_prefactor",
    "iteration_lower_bound",
    "BracketReport",
    "check_bracketing",
]

ETA_TERMS = 64


def _check_open_interval(s):
    if not 0.0 < s < 1.0:
        raise ValueError(f"zeta evaluator only covers 0 < s < 1, got s={s}")


def zeta_open_interval(s: float) -> float:
    """Riemann zeta on (0, 1) through the alternating eta series.

    Partial sums of eta(s) = sum (-1)^(k-1) k^(-s) are averaged pairwise
    until one value remains (Euler's transform in van Wijngaarden's form),
    then zeta(s) = eta(s) / (1 - 2^(1-s)).
    """
    _check_open_interval(s)
    k = np.arange(1, ETA_TERMS + 1, dtype=float)
    terms = np.where(k % 2 == 1, 1.0, -1.0) * k ** (-s)
    partial = np.cumsum(terms)
    while partial.size > 1:
        partial = 0.5 * (partial[:-1] + partial[1:])
    eta = float(partial[0])
    return eta / -math.expm1((1.0 - s) * math.log(2.0))


_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)]


def zeta_euler_maclaurin(s: float, n: int = 24) -> float:
    """zeta(s) from a truncated Dirichlet sum plus Euler-Maclaurin tail.

    Shares nothing with :func:`zeta_open_interval`; used to cross-check it.
    """
    _check_open_interval(s)
    head = math.fsum(k ** (-s) for k in range(1, n))
    tail = [n ** (1.0 - s) / (s - 1.0), 0.5 * n ** (-s)]
    rising = s  # s (s+1) ... (s+2j-2)
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        tail.append(float(b) / fact * rising * n ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + math.fsum(tail)


@dataclass(frozen=True)
class RecurrenceBound:
    A: float
    B: float
    e1: float
    M: float
    exponent: float

    def __call__(self, n):
        return self.M / np.power(n, self.exponent)


def recurrence_bound(A: float, B: float, e1: float) -> RecurrenceBound:
    """Algebraic bound e_n <= M / n^(1-A) for e_n <= (A sum_{i<n} e_i + B) / n."""
    if not A > 0:
        raise ValueError("A must be positive")
    if B < 0 or e1 < 0:
        raise ValueError("B and e1 must be nonnegative")
    scale = max(e1, B)
    if A < 1:
        scale /= -A * zeta_open_interval(1.0 - A)
    return RecurrenceBound(A=A, B=B, e1=e1, M=scale, exponent=1.0 - A)


def simulate_recurrence(A: float, B: float, e1: float, n_max: int) -> np.ndarray:
    """The sequence that meets the recurrence with equality; returns e_1..e_{n_max}.

    Any positive sequence satisfying the inequality is dominated termwise by
    this one (induction on n), so it is the worst case for the bound.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    return _core.simulate_recurrence(float(A), float(B), float(e1), int(n_max))


def gronwall_bound(C: float, mu: float, nu: float, m: float, x):
    """Comparison function for y^(m+1) vs C x^mu int_0^x t^nu y(t) dt."""
    coeff = (C * m / (m + 1.0) / (1.0 + nu + mu / (m + 1.0))) ** (1.0 / m)
    return coeff * np.power(x, (1.0 + nu + mu) / m)


def iteration_prefactor(m: float, h: float, eps: float) -> float:
    """1 - (m+1)/m * eps / h^((m+1)/m); the bound below is vacuous when <= 0."""
    return 1.0 - (m + 1.0) / m * eps / h ** ((m + 1.0) / m)


def iteration_lower_bound(C: float, m: float, h: float, eps: float, n):
    """Lower bound on the iterates for kernels bounded below by C (m >= 1)."""
    return iteration_prefactor(m, h, eps) * np.power(C * m / (m + 1.0) * np.multiply(n, h), 1.0 / m)


@dataclass(frozen=True)
class BracketReport:
    direction: str
    worst_violation: float
    worst_index: int
    skipped: bool = False

    @property
    def ok(self) -> bool:
        return self.skipped or self.worst_violation <= 0.0


def check_bracketing(sol, exact, direction: str, tol: float = 0.0) -> BracketReport:
    """Check that iterates stay on one side of the exact solution.

    ``direction`` is the sign of the local consistency errors: with
    ``"nonpositive"`` the iterates must satisfy y_n >= y(x_n), with
    ``"nonnegative"`` y_n <= y(x_n).  ``"unknown"`` skips the check.
    The reported violation is the largest amount by which the wrong side
    is reached, minus ``tol``.
    """
    if direction == "unknown":
        warnings.warn("consistency-error sign unknown; bracketing check skipped", stacklevel=2)
        return BracketReport(direction, 0.0, -1, skipped=True)
    if direction not in ("nonpositive", "nonnegative"):
        raise ValueError(f"unknown direction {direction!r}")
    y = np.asarray(sol.values, dtype=float)
    ref = np.asarray(exact(sol.nodes), dtype=float)
    gap = ref - y if direction == "nonpositive" else y - ref
    gap = gap[1:]
    i = int(np.argmax(gap))
    return BracketReport(direction, float(gap[i]) - tol, i + 1)
