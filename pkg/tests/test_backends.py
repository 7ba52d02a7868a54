import numpy as np
import pytest

from powervolterra import _core, _fallback

compiled = pytest.importorskip("powervolterra._kernels")


@pytest.mark.parametrize(
    "kind,params",
    [("const", (1.0,)), ("const", (2.5,)), ("expconv", ()), ("power", (1.5, 0.0, 0.5))],
)
@pytest.mark.parametrize("m", [1.0, 2.0, 10.0, 1000.0])
def test_builtin_solvers_agree(kind, params, m):
    code = _core.KIND_CODES[kind]
    h, N, y1 = 1.0 / 512, 512, 0.05
    a = compiled.midpoint_solve_builtin(code, params, m, h, N, y1)
    b = _fallback.midpoint_solve_builtin(code, params, m, h, N, y1)
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_row_solvers_agree():
    h, N = 1.0 / 128, 128
    nodes = np.arange(N + 1) * h

    def row(n):
        return np.exp(n * h - nodes[:n]) * (1 + nodes[:n])

    a = compiled.midpoint_solve_rows(row, 2.0, h, N, 0.1)
    b = _fallback.midpoint_solve_rows(row, 2.0, h, N, 0.1)
    np.testing.assert_allclose(a, b, rtol=1e-14)


@pytest.mark.parametrize("A", [0.25, 1.0, 2.0])
def test_recurrence_simulators_agree(A):
    a = compiled.simulate_recurrence(A, 1.0, 1.0, 10000)
    b = _fallback.simulate_recurrence(A, 1.0, 1.0, 10000)
    np.testing.assert_allclose(a, b, rtol=1e-13)


def test_zero_start_handled_by_both():
    for mod in (compiled, _fallback):
        assert np.all(mod.midpoint_solve_builtin(0, (1.0,), 2.0, 0.1, 10, 0.0) == 0.0)


def test_backend_selection_reported():
    assert _core.BACKEND in ("cython", "python")
    assert "python" in _core.backends()
