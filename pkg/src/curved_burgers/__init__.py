"""Finite-volume solvers for Burgers-type flows on flat and Schwarzschild
backgrounds: model physics, first- and second-order central schemes, a
well-balanced second-order scheme, and experiment presets behind a CLI."""

from .model import (
    DomainError,
    Geometry,
    ModelKind,
    ModelSpec,
    SteadyProfile,
    boost_velocity,
    flux,
    flux_deriv,
    flux_inv,
    lorentz_gamma,
    lorentz_residuals,
    v_to_w,
    velocity_flux,
    w_to_v,
)
from .schemes import (
    Grid,
    NumericalError,
    Scheme,
    State,
    godunov_flux,
    llf_flux,
    minmod,
    source_quadrature,
    step_lf1,
    step_nt2,
    step_wb2,
    wb_reconstruct,
)
from .solver import (
    BumpedInitial,
    ExplicitInitial,
    RunConfig,
    Snapshot,
    SteadyInitial,
    SteadyShockInitial,
    apply_boundary,
    compute_dt,
    l1_error,
    make_edge_data,
    run,
    shock_speed_estimate,
)

__version__ = "0.1.0"
