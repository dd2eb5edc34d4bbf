"""Finite-volume building blocks and the three one-step updates.

Schemes advance cell averages of the evolved variable through the
conserved density D(r, u):

    D_j^{n+1} = D_j^n - (dt/dr) * (Q_{j+1/2} - Q_{j-1/2}) + dt * S_j,

where Q are weighted interface fluxes and S a discrete source.  Three
updates are provided:

* ``step_lf1``  first order, local Lax-Friedrichs fluxes, pointwise source;
* ``step_nt2``  second-order central predictor-corrector with minmod
  limiting, written in conservative flux form so boundary fluxes and the
  mass ledger are exact;
* ``step_wb2``  well balanced second order: interface states are slid
  along each cell's steady-family continuation, and the source is the
  cell average of the pointwise source along that same continuation, so
  every exact steady profile is preserved to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelKind, ModelSpec, flux_inv

__all__ = [
    "CellProfiles",
    "Grid",
    "NumericalError",
    "Scheme",
    "State",
    "StepResult",
    "cell_profiles",
    "cfl_cap",
    "godunov_flux",
    "llf_flux",
    "minmod",
    "source_quadrature",
    "step_lf1",
    "step_nt2",
    "step_wb2",
    "wb_reconstruct",
    "wb_traces",
]


class NumericalError(RuntimeError):
    """A step left the state space; carries the failing time and cell."""

    def __init__(self, message: str, t: float, cell: int):
        super().__init__(f"{message} (t={t:.6g}, cell={cell})")
        self.t = t
        self.cell = cell


class Grid:
    """Uniform cells on (r_min, r_max]; the first face sits exactly at r_min."""

    def __init__(self, r_min: float, r_max: float, n_cells: int):
        if n_cells < 3:
            raise ValueError("need at least 3 cells")
        if r_max <= r_min:
            raise ValueError("r_max must exceed r_min")
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.n_cells = int(n_cells)
        self.dr = (self.r_max - self.r_min) / self.n_cells
        self.faces = self.r_min + np.arange(self.n_cells + 1) * self.dr
        self.centers = self.r_min + (np.arange(self.n_cells) + 0.5) * self.dr


@dataclass
class State:
    """Cell averages of the evolved variable at time t."""

    u: np.ndarray
    t: float


@dataclass
class StepResult:
    state: State
    flux_left: float
    flux_right: float


class Scheme:
    LF1 = "lf1"
    NT2 = "nt2"
    WB2 = "wb2"
    ALL = ("lf1", "nt2", "wb2")


def cfl_cap(scheme: str) -> float:
    """Largest admissible dt/dr * max|char_speed| for the scheme."""
    return 1.0 if scheme == Scheme.LF1 else 0.5


def minmod(a, b):
    """sign(a) * min(|a|, |b|) where a and b agree in sign, else 0."""
    picked = np.where(np.abs(a) < np.abs(b), a, b)
    return np.where(a * b > 0.0, picked, 0.0)


def llf_flux(spec: ModelSpec, r, ul, ur):
    """Local Lax-Friedrichs flux at radius r between states ul, ur."""
    alpha = np.maximum(np.abs(spec.char_speed(r, ul)), np.abs(spec.char_speed(r, ur)))
    return 0.5 * (spec.physical_flux(r, ul) + spec.physical_flux(r, ur)) - 0.5 * alpha * (
        spec.conserved_density(r, ur) - spec.conserved_density(r, ul)
    )


def godunov_flux(spec: ModelSpec, r, ul, ur):
    """Exact Riemann flux for the convex flux in u (minimum at u = 0)."""
    fl = spec.physical_flux(r, ul)
    fr = spec.physical_flux(r, ur)
    spans_zero = (np.minimum(ul, ur) <= 0.0) & (np.maximum(ul, ur) >= 0.0)
    rarefied = np.where(spans_zero, 0.0, np.minimum(fl, fr))
    return np.where(ul <= ur, rarefied, np.maximum(fl, fr))


# ---------------------------------------------------------------------------
# steady-profile interface reconstruction

@dataclass
class CellProfiles:
    """Steady-family continuation of each cell average.

    k holds the per-cell steady invariant, sign the branch copied onto
    reconstructed traces.  fallback marks cells whose continuation leaves
    the state space before reaching a face; those cells keep their plain
    averages for this step.
    """

    k: np.ndarray
    sign: np.ndarray
    fallback: np.ndarray


def cell_profiles(spec: ModelSpec, grid: Grid, u: np.ndarray) -> CellProfiles:
    k = np.asarray(spec.k_invariant(grid.centers, u), dtype=float)
    sign = np.sign(u)
    if spec.kind is ModelKind.GEOM_PRESSURELESS:
        c2 = spec.c * spec.c
        rad_in = c2 - k * spec.geometry.lapse(grid.faces[:-1])
        rad_out = c2 - k * spec.geometry.lapse(grid.faces[1:])
        fallback = (rad_in < 0.0) | (rad_out < 0.0)
    else:
        fallback = np.zeros(grid.n_cells, dtype=bool)
    return CellProfiles(k=k, sign=sign, fallback=fallback)


def wb_traces(spec: ModelSpec, grid: Grid, u: np.ndarray, prof: CellProfiles | None = None):
    """Face values of each cell's steady continuation.

    Returns (left, right): the values cell j takes at its inner faces
    r_{j-1/2} and r_{j+1/2}.  Fallback cells keep their averages at both
    faces.  For geometric models the horizon face value of cell 0 is never
    used by any flux (the boundary flux is supplied separately), so the
    plain average is stored there.
    """
    if prof is None:
        prof = cell_profiles(spec, grid, u)
    n = grid.n_cells
    if spec.kind is ModelKind.GEOM_RELATIVISTIC:
        left = np.empty(n)
        left[0] = u[0]  # horizon face: weight vanishes, value unused
        left[1:] = prof.sign[1:] * flux_inv(spec.eps, prof.k[1:] / spec.weight(grid.faces[1:-1]))
        right = prof.sign * flux_inv(spec.eps, prof.k / spec.weight(grid.faces[1:]))
        return left, right
    if spec.kind is ModelKind.GEOM_PRESSURELESS:
        c2 = spec.c * spec.c
        rad_l = np.maximum(c2 - prof.k * spec.geometry.lapse(grid.faces[:-1]), 0.0)
        rad_r = np.maximum(c2 - prof.k * spec.geometry.lapse(grid.faces[1:]), 0.0)
        left = np.where(prof.fallback, u, prof.sign * np.sqrt(rad_l))
        right = np.where(prof.fallback, u, prof.sign * np.sqrt(rad_r))
        return left, right
    # flat models: the continuation of a constant state is the state itself
    return np.asarray(u, dtype=float).copy(), np.asarray(u, dtype=float).copy()


def wb_reconstruct(spec: ModelSpec, grid: Grid, j: int, u: np.ndarray):
    """Four interface traces around interior cell j.

    Returns (left_minus, left_plus, right_minus, right_plus): the two
    one-sided values at face r_{j-1/2} and the two at r_{j+1/2}, obtained
    by sliding the steady continuations of cells j-1, j, j+1 to the shared
    faces.  Needs both neighbours, so 1 <= j <= n_cells - 2.
    """
    if not 1 <= j <= grid.n_cells - 2:
        raise IndexError("reconstruction needs both neighbour cells")
    left, right = wb_traces(spec, grid, u)
    return right[j - 1], left[j], right[j], left[j + 1]


_GL3_NODES = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_GL3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 9.0


def _source_cells(spec: ModelSpec, grid: Grid, u: np.ndarray, prof: CellProfiles):
    """Discrete source per cell: the cell average of the pointwise source
    along the cell's steady continuation, by 3-point Gauss-Legendre.

    Along a steady profile of the pressureless model the integrand
    r v^2 - m c^2 is linear in r, so the quadrature is exact and the
    source cancels the steady flux difference to roundoff.  Fallback
    cells integrate along their constant average instead.
    """
    if spec.kind is not ModelKind.GEOM_PRESSURELESS:
        return np.zeros(grid.n_cells)
    c2 = spec.c * spec.c
    nodes = grid.centers[:, None] + (0.5 * grid.dr) * _GL3_NODES[None, :]
    v2_profile = c2 - prof.k[:, None] * spec.geometry.lapse(nodes)
    v2 = np.where(prof.fallback[:, None], (u * u)[:, None], v2_profile)
    src = nodes * v2 - spec.geometry.mass * c2
    return 0.5 * src @ _GL3_WEIGHTS


def source_quadrature(spec: ModelSpec, grid: Grid, j: int, v_inner_left, v_inner_right):
    """Discrete source for cell j from its two inner-face traces.

    The traces determine the in-cell profile: distinct values lie on one
    steady continuation (its invariant is recovered from the outer face,
    which stays clear of the horizon), equal values mean a constant
    profile (fallback cells, or any massless steady state).
    """
    if spec.kind is not ModelKind.GEOM_PRESSURELESS:
        return 0.0
    c2 = spec.c * spec.c
    a = grid.faces[j]
    b = grid.faces[j + 1]
    nodes = 0.5 * (a + b) + (0.5 * grid.dr) * _GL3_NODES
    if v_inner_left == v_inner_right:
        v2 = np.full(3, v_inner_right * v_inner_right)
    else:
        k = (c2 - v_inner_right * v_inner_right) / spec.geometry.lapse(b)
        v2 = c2 - k * spec.geometry.lapse(nodes)
    src = nodes * v2 - spec.geometry.mass * c2
    return float(0.5 * np.dot(_GL3_WEIGHTS, src))


# ---------------------------------------------------------------------------
# single-step updates

def _check_state(spec: ModelSpec, u: np.ndarray, t: float):
    if not np.all(np.isfinite(u)):
        bad = int(np.argmax(~np.isfinite(u)))
        raise NumericalError("non-finite state", t, bad)
    if spec.kind is ModelKind.GEOM_PRESSURELESS:
        over = np.abs(u) >= spec.c
        if np.any(over):
            raise NumericalError("velocity reached the light speed", t, int(np.argmax(over)))


def _check_cfl(spec: ModelSpec, grid: Grid, u: np.ndarray, dt: float, cap: float, t: float):
    speeds = np.abs(spec.char_speed(grid.centers, u))
    lam = dt / grid.dr
    if lam * float(np.max(speeds)) > cap * (1.0 + 1e-9):
        raise NumericalError(
            f"CFL violated: dt/dr*max|speed|={lam * float(np.max(speeds)):.4g} > {cap}",
            t,
            int(np.argmax(speeds)),
        )


def step_lf1(spec: ModelSpec, grid: Grid, state: State, dt: float, boundary) -> StepResult:
    """First-order update: local Lax-Friedrichs fluxes, pointwise source."""
    u = state.u
    r = grid.centers
    lam = dt / grid.dr
    _check_cfl(spec, grid, u, dt, 1.0, state.t)
    q = np.empty(grid.n_cells + 1)
    q[1:-1] = llf_flux(spec, grid.faces[1:-1], u[:-1], u[1:])
    q[0], q[-1] = boundary(u[0], u[-1])
    d_new = spec.conserved_density(r, u) - lam * np.diff(q) + dt * spec.source(r, u)
    u_new = spec.invert_density(r, d_new)
    _check_state(spec, u_new, state.t + dt)
    return StepResult(State(u_new, state.t + dt), float(q[0]), float(q[-1]))


def step_nt2(spec: ModelSpec, grid: Grid, state: State, dt: float, boundary) -> StepResult:
    """Second-order central predictor-corrector with minmod limiting.

    The corrector is the standard nonstaggered central average written in
    conservative flux form (algebraically identical), so the update
    telescopes and the domain-edge fluxes are the Godunov boundary fluxes.
    """
    u = state.u
    r = grid.centers
    n = grid.n_cells
    lam = dt / grid.dr
    _check_cfl(spec, grid, u, dt, 0.5, state.t)

    d_n = spec.conserved_density(r, u)
    g = spec.physical_flux(r, u)
    dg = np.zeros(n)
    dg[1:-1] = minmod(g[2:] - g[1:-1], g[1:-1] - g[:-2])
    u_half = spec.invert_density(r, d_n - 0.5 * lam * dg)
    _check_state(spec, u_half, state.t + 0.5 * dt)
    g_half = spec.physical_flux(r, u_half)

    slope = np.zeros(n)
    slope[1:-1] = minmod(d_n[2:] - d_n[1:-1], d_n[1:-1] - d_n[:-2])
    q = np.empty(n + 1)
    q[1:-1] = (
        0.5 * (g_half[1:] + g_half[:-1])
        - (0.5 / lam) * (d_n[1:] - d_n[:-1])
        + (0.25 / lam) * (slope[1:] + slope[:-1])
    )
    # edge cells lack the full central stencil; their inner faces take the
    # first-order flux (the central dissipation dr/(2 dt) is unbounded by the
    # local wave speed and can leave the state space at a steep edge cell)
    q[1] = llf_flux(spec, grid.faces[1], u_half[0], u_half[1])
    q[-2] = llf_flux(spec, grid.faces[-2], u_half[-2], u_half[-1])
    q[0], q[-1] = boundary(u_half[0], u_half[-1])

    d_new = d_n - lam * np.diff(q) + dt * spec.source(r, u_half)
    u_new = spec.invert_density(r, d_new)
    _check_state(spec, u_new, state.t + dt)
    return StepResult(State(u_new, state.t + dt), float(q[0]), float(q[-1]))


def step_wb2(spec: ModelSpec, grid: Grid, state: State, dt: float, boundary) -> StepResult:
    """Well-balanced second-order update.

    Flat models have identity reconstruction and no source, where the
    scheme degenerates to the central one; they are dispatched straight to
    step_nt2.  For geometric models the predictor limits flux differences
    measured against each cell's steady continuation (so it vanishes on
    steady data), interface states are the steady-family traces of the
    half-step averages, and the source is their profile average.
    """
    if not spec.is_geometric:
        return step_nt2(spec, grid, state, dt, boundary)

    u = state.u
    r = grid.centers
    n = grid.n_cells
    lam = dt / grid.dr
    _check_cfl(spec, grid, u, dt, 0.5, state.t)

    d_n = spec.conserved_density(r, u)
    g = spec.physical_flux(r, u)
    prof = cell_profiles(spec, grid, u)

    # flux-derivative limiter on deviations from each cell's steady profile:
    # fwd[j] = G_{j+1} - Ghat_j(r_{j+1}), bwd[j] = Ghat_j(r_{j-1}) - G_{j-1}
    fwd = g[1:] - spec.profile_flux(prof.k[:-1], r[1:])
    bwd = spec.profile_flux(prof.k[1:], r[:-1]) - g[:-1]
    dg = np.zeros(n)
    dg[1:-1] = minmod(fwd[1:], bwd[:-1])
    s_pred = np.zeros(n)
    if np.any(prof.fallback):
        # off-family cells: plain limiter plus an explicit half source
        dg_plain = np.zeros(n)
        dg_plain[1:-1] = minmod(g[2:] - g[1:-1], g[1:-1] - g[:-2])
        dg = np.where(prof.fallback, dg_plain, dg)
        s_pred = np.where(prof.fallback, spec.source(r, u), 0.0)

    u_half = spec.invert_density(r, d_n - 0.5 * lam * dg + 0.5 * dt * s_pred)
    _check_state(spec, u_half, state.t + 0.5 * dt)

    prof_half = cell_profiles(spec, grid, u_half)
    left, right = wb_traces(spec, grid, u_half, prof_half)
    q = np.empty(n + 1)
    # Godunov interface fluxes: consistent, conservative, monotone, and with
    # zero dissipation across a stationary two-branch shock, which keeps the
    # steady-shock configuration stationary to roundoff
    q[1:-1] = godunov_flux(spec, grid.faces[1:-1], right[:-1], left[1:])
    q[0], q[-1] = boundary(u_half[0], right[-1])

    s_cell = _source_cells(spec, grid, u_half, prof_half)
    d_new = d_n - lam * np.diff(q) + dt * s_cell
    u_new = spec.invert_density(r, d_new)
    _check_state(spec, u_new, state.t + dt)
    return StepResult(State(u_new, state.t + dt), float(q[0]), float(q[-1]))


STEPPERS = {Scheme.LF1: step_lf1, Scheme.NT2: step_nt2, Scheme.WB2: step_wb2}
