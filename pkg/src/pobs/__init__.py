"""Penalized solver and free-boundary geometry suite for the variable-
coefficient p-obstacle problem div(a(x)|grad u|^{p-2} grad u) =
m1 chi_{u>0} - m2 u^{lam-1} chi_{u>0} on a box with zero boundary data.
"""

from .core import (
    CoefficientField,
    Grid,
    GridField,
    ProblemParams,
    build_grid,
    eval_coefficient,
    field_from_function,
    zero_field,
)
from .energy import (
    EnergyBreakdown,
    energy,
    energy_gradient,
    estimate_sobolev_constant,
    mountain_pass_floor,
    ray_profile,
)
from .errors import (
    CoefficientError,
    ConfigurationError,
    DomainError,
    FieldIOError,
    FitError,
    NumericError,
    ParameterError,
    PobsError,
    SeedError,
    ShapeError,
)
from .freeboundary import (
    BoxCountResult,
    FreeBoundary,
    PositivityMask,
    SmallGradientSet,
    box_count_measure,
    default_tau_pos,
    extract_free_boundary,
    gradient_smallness_measure,
    porosity_estimate,
    positivity_set,
    small_gradient_set,
)
from .operator import (
    apply_divergence_form,
    barrier_operator_value,
    p_flux,
    residual,
)
from .penalty import PenaltyFn, chi_eps, chi_eps_prime, phi_eps
from .solver import (
    BumpSpec,
    ContinuationResult,
    SolveResult,
    continuation_solve,
    default_seed_spec,
    find_descent_seed,
    solve_penalized,
)

__version__ = "1.0.0"
