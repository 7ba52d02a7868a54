"""Quadrature layer: weight rules, scheme right-hand sides, consistency errors.

The midpoint rule works on panels of width 2h.  Node ``n`` belongs to the
even (``k = 0``) or odd (``k = 1``) chain; odd nodes add a trapezoid term on
``[0, h]`` before the midpoint panels ``[h, 3h], [3h, 5h], ...``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationError
from .model import Grid, ProblemSpec

__all__ = [
    "WeightRule",
    "ConsistencyReport",
    "MIDPOINT",
    "RECTANGLE",
    "TRAPEZOID_TAIL",
    "midpoint_rhs",
    "generic_rhs",
    "scaled_node_errors",
    "epsilon_nodes",
    "epsilon_max",
    "epsilon_ratio",
    "adaptive_integrate",
    "delta_report",
    "bv_local_error_bound",
]


@dataclass(frozen=True)
class WeightRule:
    """Quadrature weights w_{n,i} over the support of node ``n``.

    ``support(n)`` returns ``(indices, weights)`` for the summands of
    ``h * sum_i w_{n,i} K_{n,i} y_i``; indices lie in ``1..n-1``.
    """

    name: str
    support: Callable[[int], tuple]
    W: float
    delta_sign: str = "unknown"  # "nonpositive", "nonnegative" or "unknown"

    def weight(self, n: int, i: int) -> float:
        idx, w = self.support(n)
        hit = np.nonzero(idx == i)[0]
        return float(w[hit[0]]) if hit.size else 0.0


def _midpoint_support(n):
    k = n % 2
    odd = np.arange(k + 1, n, 2)
    if k == 1:
        return np.concatenate(([1], odd)), np.concatenate(([0.5], np.full(odd.size, 2.0)))
    return odd, np.full(odd.size, 2.0)


def _rectangle_support(n):
    idx = np.arange(1, n)
    return idx, np.ones(idx.size)


def _trapezoid_tail_support(n):
    idx = np.arange(1, n)
    w = np.ones(idx.size)
    w[-1] = 0.5
    return idx, w


MIDPOINT = WeightRule("midpoint", _midpoint_support, W=2.0, delta_sign="nonpositive")
RECTANGLE = WeightRule("rectangle", _rectangle_support, W=1.0)
TRAPEZOID_TAIL = WeightRule("trapezoid-tail", _trapezoid_tail_support, W=1.0)


def _check_node(n, history):
    if n < 2:
        raise ValueError(f"the scheme defines y_n only for n >= 2, got n={n}")
    if len(history) < n:
        raise ValueError(f"history must hold y_0..y_{n - 1}")


def midpoint_rhs(n: int, history, spec: ProblemSpec, grid: Grid) -> float:
    """Right-hand side of the midpoint iteration, i.e. y_n^(m+1)."""
    _check_node(n, history)
    y = np.asarray(history, dtype=float)
    k = n % 2
    xn = n * grid.h
    idx = np.arange(k + 1, n, 2)
    kv = np.atleast_1d(spec.kernel(xn, idx * grid.h))
    terms = [0.5 * float(spec.kernel(xn, k * grid.h)) * y[k]]
    terms += (2.0 * kv * y[idx]).tolist()
    return grid.h * math.fsum(terms)


def generic_rhs(n: int, history, spec: ProblemSpec, grid: Grid, rule: WeightRule) -> float:
    """``h * sum_i w_{n,i} K(x_n, x_i) y_i`` for an arbitrary positive rule."""
    _check_node(n, history)
    y = np.asarray(history, dtype=float)
    idx, w = rule.support(n)
    if np.any(w <= 0):
        raise ValueError(f"rule {rule.name} produced a nonpositive weight at node {n}")
    kv = np.atleast_1d(spec.kernel(n * grid.h, idx * grid.h))
    return grid.h * math.fsum((w * kv * y[idx]).tolist())


def _panel_errors(q: float, centers: np.ndarray) -> np.ndarray:
    """Exact minus midpoint for t^q on panels [c-1, c+1], unit step.

    The panel centred at 1 starts at the origin and is done in closed form;
    the rest use the binomial expansion of (1 + u)^q around the centre, which
    avoids cancelling two nearly equal antiderivative values.
    """
    c = np.asarray(centers, dtype=float)
    out = np.zeros(c.shape)
    first = c == 1.0
    out[first] = 2.0 ** (q + 1) / (q + 1) - 2.0
    cc = c[~first]
    if cc.size:
        s = 1.0 / cc
        total = np.zeros(cc.shape)
        binom = 1.0  # C(q, 0)
        j = 0
        while j < 400:
            binom *= (q - j) / (j + 1)
            binom *= (q - j - 1) / (j + 2)
            j += 2
            if binom == 0.0:
                break
            term = binom / (j + 1) * s ** (j + 1)
            total += term
            if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
                break
        out[~first] = 2.0 * cc ** (q + 1) * total
    return out


def scaled_node_errors(m: float, N: int) -> np.ndarray:
    """Consistency errors of the midpoint rule for t^(1/m), divided by h^((m+1)/m).

    Entry ``n`` (2 <= n <= N) is the exact integral over [0, x_n] minus the
    scheme's quadrature; entries 0 and 1 are zero.  The ratio does not depend
    on h because t^(1/m) is homogeneous.
    """
    q = 1.0 / m
    out = np.zeros(N + 1)
    if N < 2:
        return out
    even_c = np.arange(1, N, 2)  # panel centres feeding even nodes
    odd_c = np.arange(2, N, 2)
    even_cum = np.cumsum(_panel_errors(q, even_c))
    odd_cum = np.cumsum(_panel_errors(q, odd_c))
    trap = 1.0 / (q + 1) - 0.5
    out[2::2] = even_cum[: out[2::2].size]
    out[3::2] = trap + odd_cum[: out[3::2].size]
    return out


def epsilon_nodes(h: float, m: float, N: int) -> np.ndarray:
    return scaled_node_errors(m, N) * h ** ((m + 1.0) / m)


def epsilon_ratio(m: float, N: int) -> float:
    """max_n |eps_n(h)| * h^(-(m+1)/m); independent of h."""
    if N % 2 or N < 2:
        raise ValueError("N must be even and >= 2")
    return float(np.max(np.abs(scaled_node_errors(m, N))))


def epsilon_max(h: float, m: float, N: int) -> float:
    """Largest consistency error of the midpoint scheme applied to t^(1/m)."""
    if not m > 0:
        raise ValueError("m must be positive")
    return epsilon_ratio(m, N) * h ** ((m + 1.0) / m)


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_WK15 = np.concatenate((_WGK[:-1], _WGK[::-1]))
_WG7 = np.zeros(15)
_WG7[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate((_WG[:-1], _WG[::-1]))


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    fx = np.asarray(f(0.5 * (a + b) + half * _NODES), dtype=float)
    if fx.shape != _NODES.shape:
        fx = np.broadcast_to(fx, _NODES.shape)
    k = half * float(np.dot(_WK15, fx))
    g = half * float(np.dot(_WG7, fx))
    return k, abs(k - g)


def adaptive_integrate(f, a: float, b: float, atol: float = 1e-13, rtol: float = 0.0,
                       panels: int = 1, max_intervals: int = 5000) -> float:
    """Integrate a vectorised ``f`` over [a, b] by bisecting the worst panel.

    Each panel is estimated with the 15-point Kronrod rule and its error with
    the embedded 7-point Gauss rule.  Raises IntegrationError when the
    summed error estimate does not fall below ``max(atol, rtol*|I|)``.
    """
    if b == a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, lo, hi)
        heapq.heappush(heap, (-err, lo, hi, val))
    while True:
        total = math.fsum(item[3] for item in heap)
        err_total = math.fsum(-item[0] for item in heap)
        if err_total <= max(atol, rtol * abs(total)):
            return total
        if len(heap) >= max_intervals:
            raise IntegrationError(
                f"no convergence on [{a}, {b}]: error estimate {err_total:.3e} "
                f"after {len(heap)} panels"
            )
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise IntegrationError(f"panel [{lo}, {hi}] cannot be bisected further")
        for l2, h2 in ((lo, mid), (mid, hi)):
            val, err = _gk15(f, l2, h2)
            heapq.heappush(heap, (-err, l2, h2, val))


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    nodes: np.ndarray  # node indices n = 2..N
    per_node: np.ndarray
    delta_max: float


def delta_report(exact, spec: ProblemSpec, grid: Grid, rule: WeightRule = MIDPOINT,
                 atol: float = 1e-13) -> ConsistencyReport:
    """Local consistency errors of ``rule`` applied to a known solution.

    ``exact`` must accept numpy arrays.  Reference integrals come from
    :func:`adaptive_integrate`.
    """
    h = grid.h
    nodes = np.arange(2, grid.N + 1)
    xs = grid.nodes
    yx = np.asarray(exact(xs), dtype=float)
    out = np.empty(nodes.size)
    for j, n in enumerate(nodes):
        xn = xs[n]

        def integrand(t, xn=xn):
            return np.asarray(spec.kernel(xn, t), dtype=float) * exact(t)

        ref = adaptive_integrate(integrand, 0.0, xn, atol=atol, panels=max(1, n // 2))
        idx, w = rule.support(int(n))
        kv = np.atleast_1d(spec.kernel(xn, xs[idx]))
        out[j] = ref - h * math.fsum((w * kv * yx[idx]).tolist())
    dmax = float(np.max(np.abs(out))) if out.size else 0.0
    return ConsistencyReport(nodes=nodes, per_node=out, delta_max=dmax)


def bv_local_error_bound(h: float, m: float) -> float:
    """Midpoint error on [0, h] for t^(1/m): (h/2) times the variation h^(1/m)."""
    if m < 1:
        raise ValueError("bound requires m >= 1 (monotone integrand)")
    return 0.5 * h * h ** (1.0 / m)
