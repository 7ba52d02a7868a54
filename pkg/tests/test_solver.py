import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powervolterra import solver as solver_mod
from powervolterra.analysis import exact_example1, exact_example2
from powervolterra.cli import parse_kernel_expression
from powervolterra.errors import SolverError
from powervolterra.model import Kernel, ProblemSpec, constant_kernel, exp_convolution_kernel, make_grid
from powervolterra.oracles import iteration_lower_bound
from powervolterra.quad import MIDPOINT, WeightRule, epsilon_max
from powervolterra.solver import (
    SolverConfig,
    initial_value,
    kernel_row_integral,
    richardson_initial,
    solve,
    solve_original,
)


def const_spec(m, X=1.0):
    return ProblemSpec(m=m, kernel=constant_kernel(1.0), X=X)


def test_initial_value_examples():
    assert initial_value(const_spec(1.0), 0.1) == pytest.approx(0.1, rel=1e-15)
    assert initial_value(const_spec(2.0), 0.01) == pytest.approx(0.1, rel=1e-15)
    spec = ProblemSpec(m=2.0, kernel=exp_convolution_kernel(), X=1.0)
    assert initial_value(spec, 1e-3) == pytest.approx(math.sqrt(math.expm1(1e-3)), rel=1e-15)


@pytest.mark.parametrize("m", [1.0, 2.0, 10.0])
def test_starting_error_scales_like_h_to_1_over_m(m):
    # the plain start overshoots y(h) by the fixed factor ((m+1)/m)^(1/m)
    for h in (1e-2, 1e-4):
        ratio = initial_value(const_spec(m), h) / exact_example1(m, h)
        assert ratio == pytest.approx(((m + 1) / m) ** (1 / m), rel=1e-13)


def test_kernel_row_integral_quadrature_path():
    k = Kernel(func=lambda x, t: np.exp(np.subtract(x, t)), name="exp(x-t)")
    spec = ProblemSpec(m=2.0, kernel=k, X=1.0)
    assert kernel_row_integral(spec, 0.01) == pytest.approx(math.expm1(0.01), rel=1e-13)


def test_richardson_exact_for_m1():
    for h in (0.5, 0.1, 1e-3):
        assert richardson_initial(const_spec(1.0), h) == pytest.approx(h / 2, rel=1e-14)


@pytest.mark.parametrize("m", [2.0, 10.0])
def test_richardson_clamps_to_lower_bound(m):
    h, N = 1e-2, 100
    spec = const_spec(m)
    eps = epsilon_max(h, m, N)
    y = richardson_initial(spec, h, N)
    assert y == pytest.approx(iteration_lower_bound(1.0, m, h, eps, 1), rel=1e-14)
    assert 0 < y < exact_example1(m, h)


def test_richardson_vanishing_denominator_warns(monkeypatch):
    monkeypatch.setattr(solver_mod.math, "expm1", lambda v: 0.0)
    with pytest.warns(RuntimeWarning, match="denominator"):
        y = richardson_initial(const_spec(2.0), 0.01)
    assert y == pytest.approx(0.1, rel=1e-15)


def test_solve_two_step_hand_computation():
    # m=2, K=1, X=1, N=2: y1 = sqrt(1/2), y2^3 = 2 * 0.5 * y1
    sol = solve(SolverConfig(spec=const_spec(2.0), grid=make_grid(1.0, 2)))
    y1 = math.sqrt(0.5)
    assert sol.values[1] == pytest.approx(y1, rel=1e-15)
    assert sol.values[2] == pytest.approx(y1 ** (1 / 3), rel=1e-15)
    assert sol.meta["start"] == "rectangle"


def test_zero_start_gives_trivial_solution():
    sol = solve(SolverConfig(spec=const_spec(2.0), grid=make_grid(1.0, 16), start_override=0.0))
    assert np.all(sol.values == 0.0)
    assert sol.meta["start"] == "override"


def test_negative_override_rejected():
    with pytest.raises(ValueError):
        SolverConfig(spec=const_spec(2.0), grid=make_grid(1.0, 4), start_override=-1e-3)


def test_grid_longer_than_problem_rejected():
    with pytest.raises(ValueError):
        SolverConfig(spec=const_spec(2.0, X=0.5), grid=make_grid(1.0, 4))


def test_solution_is_read_only_and_deterministic():
    cfg = SolverConfig(spec=const_spec(2.0), grid=make_grid(1.0, 256))
    a, b = solve(cfg), solve(cfg)
    assert a.values.tobytes() == b.values.tobytes()
    with pytest.raises(ValueError):
        a.values[1] = 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 50.0), st.integers(1, 200), st.floats(0.01, 3.0))
def test_iterates_positive_and_above_lower_bound(m, half, X):
    N = 2 * half
    spec = const_spec(m, X)
    grid = make_grid(X, N)
    sol = solve(SolverConfig(spec=spec, grid=grid))
    assert np.all(sol.values[1:] > 0)
    eps = epsilon_max(grid.h, m, N)
    if eps * grid.h ** (-(m + 1) / m) < 1:
        lb = iteration_lower_bound(1.0, m, grid.h, eps, np.arange(1, N + 1))
        assert np.all(sol.values[1:] >= lb * (1 - 1e-13))


@pytest.mark.parametrize("m", [1.0, 2.0])
def test_upper_bracketing_small_m(m):
    grid = make_grid(1.0, 256)
    sol = solve(SolverConfig(spec=const_spec(m), grid=grid))
    assert np.all(sol.values >= exact_example1(m, grid.nodes) - 1e-13)


def test_m1_plain_start_is_not_exact():
    grid = make_grid(1.0, 8)
    sol = solve(SolverConfig(spec=const_spec(1.0), grid=grid))
    assert sol.values[1] == pytest.approx(grid.h)
    assert sol.values[2] == pytest.approx(math.sqrt(2) * grid.h)  # y2^2 = 2 h * h
    assert sol.values[2] != grid.nodes[2] / 2


def test_m1_richardson_is_exact():
    grid = make_grid(1.0, 64)
    sol = solve(SolverConfig(spec=const_spec(1.0), grid=grid, richardson=True))
    np.testing.assert_allclose(sol.values, grid.nodes / 2, atol=1e-15)
    assert sol.meta["start"] == "richardson"


def test_solve_original():
    grid = make_grid(1.0, 16)
    cfg = SolverConfig(spec=const_spec(1.0), grid=grid, richardson=True)
    np.testing.assert_allclose(solve_original(cfg), (grid.nodes / 2) ** 2, atol=1e-15)


def test_generic_midpoint_path_matches_builtin():
    grid = make_grid(1.0, 64)
    spec = ProblemSpec(m=2.0, kernel=exp_convolution_kernel(), X=1.0)
    a = solve(SolverConfig(spec=spec, grid=grid)).values
    clone = WeightRule("midpoint-clone", MIDPOINT.support, MIDPOINT.W, MIDPOINT.delta_sign)
    b = solve(SolverConfig(spec=spec, grid=grid, rule=clone)).values
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_expression_kernel_matches_builtin():
    grid = make_grid(1.0, 128)
    expr = ProblemSpec(m=2.0, kernel=parse_kernel_expression("exp(x - t)"), X=1.0)
    builtin = ProblemSpec(m=2.0, kernel=exp_convolution_kernel(), X=1.0)
    a = solve(SolverConfig(spec=expr, grid=grid)).values
    b = solve(SolverConfig(spec=builtin, grid=grid)).values
    np.testing.assert_allclose(a, b, rtol=1e-13)


def test_example2_converges():
    errs = []
    for N in (64, 256, 1024):
        sol = solve(SolverConfig(spec=ProblemSpec(m=2.0, kernel=exp_convolution_kernel(), X=1.0),
                                 grid=make_grid(1.0, N)))
        errs.append(abs(sol.values[-1] - exact_example2(2.0, 1.0)))
    assert errs[0] > errs[1] > errs[2]


def test_small_m_warns():
    with pytest.warns(RuntimeWarning, match="m=0.5"):
        solve(SolverConfig(spec=const_spec(0.5), grid=make_grid(1.0, 4)))


def test_no_warning_for_m_at_least_one():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve(SolverConfig(spec=const_spec(1.0), grid=make_grid(1.0, 4)))


def test_solver_error_reports_node():
    # declared bounds claim positivity, but the kernel vanishes for x > 0.5
    k = Kernel(func=lambda x, t: np.where(np.asarray(x) > 0.5, 0.0, 1.0) + 0 * np.asarray(t),
               name="step", analytic_bounds=lambda X: (1.0, 1.0))
    spec = ProblemSpec(m=2.0, kernel=k, X=1.0)
    with pytest.raises(SolverError) as info:
        solve(SolverConfig(spec=spec, grid=make_grid(1.0, 8), start_override=0.1))
    assert info.value.index == 5
