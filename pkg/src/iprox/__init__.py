"""Inertial proximal gradient solvers with convergence diagnostics.

The package solves composite problems min F(x) = f(x) + g(x), with f
smooth (gradient Lipschitz) and g prox-friendly, by forward-backward
steps carrying a heavy-ball inertia term.  Full, cyclic-block and
stochastic-block update orders share one trace format, so the audit and
rate-fitting tools in :mod:`iprox.diagnostics` apply uniformly.
"""

from .errors import (
    ConfigError,
    ContractViolation,
    DivergenceError,
    IntegrationBlowup,
    UnsupportedOracle,
)
from .problems import CompositeProblem, IterateState, make_state
from .prox import ProxKind, group_shrink, project_box, prox_apply, prox_value, soft_threshold
from .schedules import ConstantBeta, DiminishingBeta, ParamSchedule
from .solvers import RunConfig, Trace, run_cyclic, run_inertial, run_stochastic
from .diagnostics import (
    RateEstimate,
    descent_audit,
    expectation_descent_audit,
    fit_rate,
    linear_ratio_audit,
    lyapunov_xi,
    max_lyapunov_increase,
    residual_S,
    running_min,
    select_window,
    squared_lyapunov_audit,
    value_floor,
)
from .reference import ReferenceSolution, solve_reference, with_reference
from .library import InstanceSpec, is_coercive, make_instance, start_point
from .ode import OdeTrace, ode_audit, simulate_heavy_ball
from .rng import SplitMix64

__version__ = "0.1.0"

__all__ = [
    "CompositeProblem",
    "ConfigError",
    "ConstantBeta",
    "ContractViolation",
    "DiminishingBeta",
    "DivergenceError",
    "InstanceSpec",
    "IntegrationBlowup",
    "IterateState",
    "OdeTrace",
    "ParamSchedule",
    "ProxKind",
    "RateEstimate",
    "ReferenceSolution",
    "RunConfig",
    "SplitMix64",
    "Trace",
    "UnsupportedOracle",
    "descent_audit",
    "expectation_descent_audit",
    "fit_rate",
    "group_shrink",
    "is_coercive",
    "linear_ratio_audit",
    "lyapunov_xi",
    "make_instance",
    "make_state",
    "max_lyapunov_increase",
    "ode_audit",
    "project_box",
    "prox_apply",
    "prox_value",
    "residual_S",
    "run_cyclic",
    "run_inertial",
    "run_stochastic",
    "running_min",
    "select_window",
    "simulate_heavy_ball",
    "soft_threshold",
    "solve_reference",
    "squared_lyapunov_audit",
    "start_point",
    "value_floor",
    "with_reference",
]
