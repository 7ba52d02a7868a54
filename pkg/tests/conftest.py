import mpmath as mp
import pytest


def mp_midpoint_error(m, n, h=1):
    """Exact minus scheme quadrature of t^(1/m) over [0, n h], in 40-digit arithmetic."""
    with mp.workdps(40):
        q = mp.mpf(1) / m
        h = mp.mpf(h)
        k = n % 2
        Q = mp.mpf(k) / 2 * h * h**q + 2 * h * mp.fsum((i * h) ** q for i in range(k + 1, n, 2))
        return (n * h) ** (q + 1) / (q + 1) - Q


@pytest.fixture
def midpoint_error_oracle():
    return mp_midpoint_error
