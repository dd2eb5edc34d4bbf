import math

import numpy as np
import pytest

from curved_burgers.model import DomainError, Geometry, ModelKind, ModelSpec, v_to_w
from curved_burgers.schemes import Grid, NumericalError, State
from curved_burgers.solver import (
    BumpedInitial,
    ExplicitInitial,
    RunConfig,
    SteadyInitial,
    SteadyShockInitial,
    apply_boundary,
    compute_dt,
    l1_error,
    make_edge_data,
    run,
    shock_speed_estimate,
)

GEOM = Geometry(0.05, 1.0)
FLAT_CLASSICAL = ModelSpec(ModelKind.FLAT_CLASSICAL, 0.0, Geometry(0.0, 1.0))
FLAT_REL = ModelSpec(ModelKind.FLAT_RELATIVISTIC, 1.0, Geometry(0.0, 1.0))
GEOM_REL = ModelSpec(ModelKind.GEOM_RELATIVISTIC, 1.0, GEOM)
GEOM_PRESSURELESS = ModelSpec(ModelKind.GEOM_PRESSURELESS, 1.0, GEOM)


# --- time step ----------------------------------------------------------------

def test_compute_dt_arithmetic():
    grid = Grid(0.0, 1.0, 10)
    state = State(np.full(10, 2.0), 0.0)
    assert compute_dt(FLAT_CLASSICAL, grid, state, 0.5) == pytest.approx(0.025)


def test_compute_dt_floor_for_motionless_data():
    grid = Grid(0.0, 1.0, 10)
    state = State(np.zeros(10), 0.0)
    assert compute_dt(FLAT_CLASSICAL, grid, state, 0.5) == pytest.approx(0.05)


def test_run_never_oversteps_t_end():
    cfg = RunConfig(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=16, cfl=0.9,
                    t_end=0.123, initial=SteadyInitial(0.5), snapshot_dt=0.05)
    snaps = run(cfg)
    assert snaps[-1].t == pytest.approx(0.123, abs=1e-15)
    assert all(s.t <= 0.123 + 1e-15 for s in snaps)


# --- boundary fluxes ------------------------------------------------------------

def test_horizon_flux_zero_for_pressureless():
    grid = Grid(0.1, 1.0, 16)
    initial = SteadyInitial(0.52)
    u0 = initial.sample(GEOM_PRESSURELESS, grid)
    fluxes = apply_boundary(GEOM_PRESSURELESS, grid, make_edge_data(GEOM_PRESSURELESS, grid, initial, u0))
    ql, _ = fluxes(u0[0], u0[-1])
    assert ql == 0.0


def test_horizon_flux_is_steady_invariant_for_relativistic():
    wR = float(v_to_w(1.0, 0.3))
    grid = Grid(0.1, 1.0, 16)
    initial = SteadyInitial(wR)
    u0 = initial.sample(GEOM_REL, grid)
    k = float(GEOM_REL.k_invariant(1.0, wR))
    fluxes = apply_boundary(GEOM_REL, grid, make_edge_data(GEOM_REL, grid, initial, u0))
    ql, qr = fluxes(u0[0], u0[-1])
    assert ql == pytest.approx(k, rel=1e-13)


def test_steady_boundary_fluxes_match_interior():
    # a steady run must see the same weighted flux at both edges: no drift
    wR = float(v_to_w(1.0, 0.3))
    grid = Grid(0.1, 1.0, 16)
    initial = SteadyInitial(wR)
    u0 = initial.sample(GEOM_REL, grid)
    k = float(GEOM_REL.k_invariant(1.0, wR))
    fluxes = apply_boundary(GEOM_REL, grid, make_edge_data(GEOM_REL, grid, initial, u0))
    # the right inner value a well-balanced step supplies is the exact trace
    trace_R = float(GEOM_REL.steady_value(k, 1.0, 1.0))
    ql, qr = fluxes(u0[0], trace_R)
    assert ql == pytest.approx(k, rel=1e-13)
    assert qr == pytest.approx(k, rel=1e-13)


def test_flat_boundary_godunov_upwind():
    grid = Grid(0.0, 1.0, 8)
    u0 = np.full(8, 0.5)
    initial = ExplicitInitial(tuple(u0))
    fluxes = apply_boundary(FLAT_CLASSICAL, grid, make_edge_data(FLAT_CLASSICAL, grid, initial, u0))
    ql, qr = fluxes(0.5, 0.5)
    assert ql == pytest.approx(0.125)
    assert qr == pytest.approx(0.125)


# --- initial data ----------------------------------------------------------------

def test_bump_support_validation():
    base = SteadyInitial(0.52)
    bad = BumpedInitial(base, 0.95, 0.2, 0.01)
    grid = Grid(0.1, 1.0, 32)
    with pytest.raises(DomainError):
        bad.sample(GEOM_PRESSURELESS, grid)


def test_bump_vanishes_at_support_edge():
    base = SteadyInitial(0.52)
    init = BumpedInitial(base, 0.4, 0.2, 0.1)
    grid = Grid(0.1, 1.0, 90)
    bump = init.bump(grid)
    inside = np.abs(grid.centers - 0.4) < 0.1
    assert np.all(bump[~inside] == 0.0)
    assert bump.max() > 0.09
    assert init.perturbation_l1(grid) == pytest.approx(np.sum(bump) * grid.dr)


def test_explicit_initial_length_checked():
    grid = Grid(0.0, 1.0, 8)
    with pytest.raises(DomainError):
        ExplicitInitial((1.0, 2.0)).sample(FLAT_CLASSICAL, grid)


def test_steady_shock_sample_sides():
    wR = float(v_to_w(1.0, 0.09))
    init = SteadyShockInitial(wR, -wR, 0.5)
    grid = Grid(0.1, 1.0, 18)
    u0 = init.sample(GEOM_REL, grid)
    assert np.all(u0[grid.centers < 0.5] > 0.0)
    assert np.all(u0[grid.centers > 0.5] < 0.0)


# --- run() ----------------------------------------------------------------------

def test_run_zero_t_end_returns_initial():
    cfg = RunConfig(spec=GEOM_PRESSURELESS, scheme="wb2", n_cells=16, cfl=0.45,
                    t_end=0.0, initial=SteadyInitial(0.52))
    snaps = run(cfg)
    assert len(snaps) == 1
    assert snaps[0].t == 0.0
    assert snaps[0].l1_to_reference == 0.0


def test_run_steady_wb2_stays_on_profile():
    cfg = RunConfig(spec=GEOM_PRESSURELESS, scheme="wb2", n_cells=64, cfl=0.45,
                    t_end=2.0, initial=SteadyInitial(0.52), snapshot_dt=0.5)
    snaps = run(cfg)
    assert snaps[-1].l1_to_reference < 1e-10


def test_run_is_deterministic():
    cfg = dict(spec=GEOM_PRESSURELESS, scheme="wb2", n_cells=32, cfl=0.45,
               t_end=0.5, initial=SteadyShockInitial(0.9, 0.1, 0.5), snapshot_dt=0.1)
    a = run(RunConfig(**cfg))
    b = run(RunConfig(**cfg))
    assert len(a) == len(b)
    for sa, sb in zip(a, b):
        assert sa.t == sb.t
        assert np.array_equal(sa.u, sb.u)
        assert sa.total_mass == sb.total_mass


def test_run_snapshot_times_are_nominal():
    cfg = RunConfig(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=32, cfl=0.9,
                    t_end=1.0, initial=SteadyInitial(0.7), snapshot_dt=0.25)
    snaps = run(cfg)
    assert [s.t for s in snaps] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0], abs=1e-15)


def test_run_snapshot_steps_mode():
    cfg = RunConfig(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=32, cfl=0.9,
                    t_end=0.3, initial=SteadyInitial(0.7), snapshot_steps=5)
    snaps = run(cfg)
    assert len(snaps) >= 2
    assert snaps[-1].t == pytest.approx(0.3, abs=1e-12)


def test_run_propagates_numerical_error_with_location():
    # the central scheme drives the near-horizon cell past the light cone on
    # this shock datum; the error must carry the failing time and cell
    cfg = RunConfig(spec=GEOM_PRESSURELESS, scheme="nt2", n_cells=18, cfl=0.45,
                    t_end=1.0, initial=SteadyShockInitial(0.9, 0.1, 0.5), snapshot_dt=0.2)
    with pytest.raises(NumericalError) as err:
        run(cfg)
    assert err.value.t > 0.0
    assert 0 <= err.value.cell < 18
    assert hasattr(err.value, "snapshots")


def test_config_validation():
    good = dict(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=8, cfl=0.9, t_end=1.0,
                initial=SteadyInitial(0.5))
    RunConfig(**good)
    with pytest.raises(DomainError):
        RunConfig(**{**good, "scheme": "nt2"})  # cfl 0.9 over the 0.5 cap
    with pytest.raises(DomainError):
        RunConfig(**{**good, "cfl": 1.5})
    with pytest.raises(DomainError):
        RunConfig(**{**good, "scheme": "weno"})


# --- diagnostics -----------------------------------------------------------------

def test_l1_error_values():
    grid = Grid(0.0, 1.0, 10)
    u = np.linspace(0.0, 1.0, 10)
    assert l1_error(grid, u, u.copy()) == 0.0
    assert l1_error(grid, u + 0.25, u) == pytest.approx(0.25 * 10 * grid.dr)
    assert l1_error(grid, u, lambda r: np.interp(r, grid.centers, u)) < 1e-15


def test_perturbation_decays_after_wave_exit():
    spec = GEOM_REL
    u_edge = float(v_to_w(1.0, 0.03))
    base = SteadyInitial(u_edge)
    k = float(spec.k_invariant(1.0, u_edge))
    amp = 0.3 * float(spec.steady_value(k, 1.0, 0.4))
    init = BumpedInitial(base, 0.4, 0.2, amp)
    cfg = RunConfig(spec=spec, scheme="wb2", n_cells=30, cfl=0.45, t_end=30.0,
                    initial=init, snapshot_dt=5.0)
    snaps = run(cfg)
    pert = init.perturbation_l1(cfg.grid())
    assert snaps[0].l1_to_reference == pytest.approx(pert, rel=1e-12)
    assert snaps[-1].l1_to_reference < 1e-3 * pert


def test_outgoing_wave_mass_decreases_during_exit():
    # total conserved mass is monotone nonincreasing while the hump leaves
    spec = GEOM_REL
    u_edge = float(v_to_w(1.0, 0.03))
    base = SteadyInitial(u_edge)
    k = float(spec.k_invariant(1.0, u_edge))
    amp = 0.3 * float(spec.steady_value(k, 1.0, 0.4))
    init = BumpedInitial(base, 0.4, 0.2, amp)
    cfg = RunConfig(spec=spec, scheme="wb2", n_cells=30, cfl=0.45, t_end=30.0,
                    initial=init, snapshot_dt=1.0)
    snaps = run(cfg)
    masses = np.array([s.total_mass for s in snaps])
    assert masses[-1] < masses[0]
    assert np.max(np.diff(masses)) < 1e-12  # never gains mass


# --- shock speed ------------------------------------------------------------------

def test_shock_speed_classical():
    cfg = RunConfig(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=200, cfl=0.9, t_end=1.2,
                    initial=SteadyShockInitial(1.0, 0.0, 0.25), snapshot_dt=0.05)
    snaps = run(cfg)
    s = shock_speed_estimate(cfg.grid(), [x for x in snaps if x.t >= 0.2])
    assert s == pytest.approx(0.5, abs=0.02)


def test_shock_speed_relativistic():
    cfg = RunConfig(spec=FLAT_REL, scheme="lf1", n_cells=200, cfl=0.9, t_end=1.2,
                    initial=SteadyShockInitial(1.0, 0.0, 0.25), snapshot_dt=0.05)
    snaps = run(cfg)
    s = shock_speed_estimate(cfg.grid(), [x for x in snaps if x.t >= 0.2])
    assert s == pytest.approx(math.sqrt(2.0) - 1.0, abs=0.02)


def test_shock_speed_requires_discontinuity():
    cfg = RunConfig(spec=FLAT_CLASSICAL, scheme="lf1", n_cells=64, cfl=0.9, t_end=0.2,
                    initial=SteadyInitial(0.5), snapshot_dt=0.05)
    snaps = run(cfg)
    with pytest.raises(ValueError):
        shock_speed_estimate(cfg.grid(), snaps)


def test_stationary_steady_shock_speed_near_zero():
    wR = float(v_to_w(1.0, 0.09))
    cfg = RunConfig(spec=GEOM_REL, scheme="wb2", n_cells=18, cfl=0.45, t_end=1.0,
                    initial=SteadyShockInitial(wR, -wR, 0.5), snapshot_dt=0.1)
    snaps = run(cfg)
    s = shock_speed_estimate(cfg.grid(), snaps)
    assert abs(s) <= cfg.grid().dr / 1.0
