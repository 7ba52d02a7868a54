"""Explicit midpoint solver for Volterra equations with power-type nonlinearity.

Solves ``y(x)^(m+1) = int_0^x K(x,t) y(t) dt`` on a uniform grid and ships
the closed forms and oracles needed to audit convergence.
"""

__version__ = "0.1.0"

from ._core import BACKEND
from .analysis import (
    AsymptoticForm,
    ConvergenceReport,
    OrderFit,
    asymptotic_form,
    convergence_sweep,
    error_at,
    estimate_order,
    exact_example1,
    exact_example2,
    theoretical_order,
)
from .errors import IntegrationError, SolverError
from .model import (
    Grid,
    InvalidKernelError,
    Kernel,
    ProblemSpec,
    Solution,
    constant_kernel,
    exp_convolution_kernel,
    kernel_bounds,
    kernel_eval,
    make_grid,
    power_kernel,
    to_original_form,
)
from .oracles import (
    check_bracketing,
    gronwall_bound,
    iteration_lower_bound,
    recurrence_bound,
    simulate_recurrence,
    zeta_open_interval,
)
from .quad import (
    MIDPOINT,
    WeightRule,
    bv_local_error_bound,
    delta_report,
    epsilon_max,
    generic_rhs,
    midpoint_rhs,
)
from .solver import SolverConfig, initial_value, richardson_initial, solve, solve_original
