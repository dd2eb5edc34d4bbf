"""Time-stepping driver: CFL control, no-influx boundaries, diagnostics.

Boundary treatment follows the no-influx prescription: at each domain
edge a Riemann problem is solved (Godunov flux) between the boundary
state determined by the initial data, frozen for the whole run, and the
current numerical value at that edge.  At the horizon face of a
geometric model every bounded state carries zero weighted flux, so the
Riemann problem degenerates: it is resolved in the steady-family limit,
where a state is parameterized by its flux invariant and branch sign.
For the pressureless model every such limit flux vanishes (the weight
kills the bounded flux there); for the flux-conserving model the limit
of the weighted flux along a steady profile is its invariant K, which
is what keeps exact steady data exactly steady at the first cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, ModelKind, ModelSpec
from .schemes import (
    Grid,
    NumericalError,
    Scheme,
    State,
    STEPPERS,
    cfl_cap,
    godunov_flux,
)

__all__ = [
    "BumpedInitial",
    "EdgeData",
    "ExplicitInitial",
    "RunConfig",
    "Snapshot",
    "SteadyInitial",
    "SteadyShockInitial",
    "apply_boundary",
    "compute_dt",
    "l1_error",
    "make_edge_data",
    "run",
    "shock_speed_estimate",
]

_SPEED_FLOOR = 1e-12  # below this, dt falls back to cfl*dr (steady data must still advance)


# ---------------------------------------------------------------------------
# initial data

@dataclass(frozen=True)
class SteadyInitial:
    """Steady-family member fixed by its evolved-variable value at r_max."""

    u_edge: float

    def profile(self, spec: ModelSpec):
        k = float(spec.k_invariant(spec.geometry.r_max, self.u_edge))
        return k, float(np.sign(self.u_edge))

    def sample(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        k, sign = self.profile(spec)
        return np.asarray(spec.steady_value(k, sign, grid.centers), dtype=float)

    def reference(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        return self.sample(spec, grid)

    def right_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return self.u_edge

    def left_edge(self, spec: ModelSpec, grid: Grid) -> float:
        if spec.is_geometric:
            raise DomainError("geometric steady data has no bounded horizon value")
        return self.u_edge


@dataclass(frozen=True)
class SteadyShockInitial:
    """Two steady-family members joined at r_jump.

    Each side is fixed by its evolved-variable value at r_max (the outer
    branch actually reaches r_max; the inner one is continued from there).
    Equal magnitudes with opposite signs give a stationary entropy shock.
    """

    u_left_edge: float
    u_right_edge: float
    r_jump: float

    def _profiles(self, spec: ModelSpec):
        r_ref = spec.geometry.r_max
        kl = float(spec.k_invariant(r_ref, self.u_left_edge))
        kr = float(spec.k_invariant(r_ref, self.u_right_edge))
        return (kl, float(np.sign(self.u_left_edge))), (kr, float(np.sign(self.u_right_edge)))

    def sample(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        (kl, sl), (kr, sr) = self._profiles(spec)
        inner = grid.centers < self.r_jump
        out = np.empty(grid.n_cells)
        out[inner] = spec.steady_value(kl, sl, grid.centers[inner])
        out[~inner] = spec.steady_value(kr, sr, grid.centers[~inner])
        return out

    def reference(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        return self.sample(spec, grid)

    def right_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return self.u_right_edge

    def left_edge(self, spec: ModelSpec, grid: Grid) -> float:
        if spec.is_geometric:
            raise DomainError("geometric steady data has no bounded horizon value")
        return self.u_left_edge


@dataclass(frozen=True)
class BumpedInitial:
    """Base initial data plus a compactly supported cosine-squared bump.

    amplitude is absolute, in the evolved variable; the support
    |r - center| < width/2 must lie inside the open domain.
    """

    base: "SteadyInitial | SteadyShockInitial"
    center: float
    width: float
    amplitude: float

    def bump(self, grid: Grid) -> np.ndarray:
        x = (grid.centers - self.center) / self.width
        return np.where(np.abs(x) < 0.5, self.amplitude * np.cos(np.pi * x) ** 2, 0.0)

    def sample(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        if not (grid.r_min < self.center - 0.5 * self.width
                and self.center + 0.5 * self.width < grid.r_max):
            raise DomainError("bump support must lie inside the domain")
        return self.base.sample(spec, grid) + self.bump(grid)

    def reference(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        return self.base.sample(spec, grid)

    def perturbation_l1(self, grid: Grid) -> float:
        return float(np.sum(np.abs(self.bump(grid))) * grid.dr)

    def right_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return self.base.right_edge(spec, grid)

    def left_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return self.base.left_edge(spec, grid)


@dataclass(frozen=True)
class ExplicitInitial:
    values: tuple

    def sample(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        u = np.asarray(self.values, dtype=float)
        if u.shape != (grid.n_cells,):
            raise DomainError("explicit initial data length must match the grid")
        return u.copy()

    def reference(self, spec: ModelSpec, grid: Grid) -> np.ndarray:
        return self.sample(spec, grid)

    def right_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return float(self.values[-1])

    def left_edge(self, spec: ModelSpec, grid: Grid) -> float:
        return float(self.values[0])


# ---------------------------------------------------------------------------
# boundary treatment

@dataclass(frozen=True)
class EdgeData:
    """Boundary states determined by the initial data, frozen for the run."""

    right_value: float
    left_value: float = 0.0      # flat models only
    left_k: float = 0.0          # geometric models: horizon-limit invariant
    left_sign: float = 0.0


def make_edge_data(spec: ModelSpec, grid: Grid, initial, u0: np.ndarray) -> EdgeData:
    right = float(initial.right_edge(spec, grid))
    if spec.is_geometric:
        k0 = float(spec.k_invariant(grid.centers[0], u0[0]))
        return EdgeData(right_value=right, left_k=k0, left_sign=float(np.sign(u0[0])))
    return EdgeData(right_value=right, left_value=float(initial.left_edge(spec, grid)))


def _horizon_limit_flux(k_out: float, s_out: float, k_in: float, s_in: float) -> float:
    """Godunov selection at the horizon face in the steady-family limit.

    States are parameterized by (flux invariant k >= 0, branch sign); the
    branch sign orders them, larger k meaning larger |state|.  Outward
    branches upwind from outside the domain, inward ones from inside, and
    an outward/inward pair spans the sonic state (zero flux).
    """
    if s_in < 0.0:
        return k_in if s_out <= 0.0 else max(k_out, k_in)
    return k_out if s_out > 0.0 else 0.0


def apply_boundary(spec: ModelSpec, grid: Grid, edge: EdgeData):
    """No-influx boundary closure: (u_left_cell, u_right_inner) -> (qL, qR).

    Both returned fluxes are weighted.  The right flux is the Godunov flux
    at r_max between the current inner value and the stored edge state; the
    left flux is its horizon-limit analogue for geometric models and a
    plain Godunov flux for flat ones.
    """
    r_left = grid.faces[0]
    r_right = grid.faces[-1]

    def fluxes(u_left_cell: float, u_right_inner: float):
        qr = float(godunov_flux(spec, r_right, u_right_inner, edge.right_value))
        if spec.is_geometric:
            if spec.kind is ModelKind.GEOM_PRESSURELESS:
                ql = 0.0  # every bounded-flux profile has zero weighted flux at 2m
            else:
                k_in = float(spec.k_invariant(grid.centers[0], u_left_cell))
                ql = _horizon_limit_flux(edge.left_k, edge.left_sign, k_in, float(np.sign(u_left_cell)))
        else:
            ql = float(godunov_flux(spec, r_left, edge.left_value, u_left_cell))
        return ql, qr

    return fluxes


# ---------------------------------------------------------------------------
# driver

@dataclass
class RunConfig:
    spec: ModelSpec
    scheme: str
    n_cells: int
    cfl: float
    t_end: float
    initial: object
    snapshot_dt: float | None = None
    snapshot_steps: int | None = None

    def __post_init__(self):
        if self.scheme not in Scheme.ALL:
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl < 1.0:
            raise DomainError("cfl must lie in (0, 1)")
        if self.cfl > cfl_cap(self.scheme) * (1.0 + 1e-12):
            raise DomainError(f"cfl must not exceed {cfl_cap(self.scheme)} for {self.scheme}")
        if self.t_end < 0.0:
            raise DomainError("t_end must be nonnegative")
        if self.snapshot_dt is not None and self.snapshot_dt <= 0.0:
            raise DomainError("snapshot_dt must be positive")
        if self.snapshot_steps is not None and self.snapshot_steps < 1:
            raise DomainError("snapshot_steps must be a positive integer")

    def grid(self) -> Grid:
        return Grid(self.spec.geometry.r_min, self.spec.geometry.r_max, self.n_cells)


@dataclass
class Snapshot:
    """Per-output diagnostics: state plus the scalar ledger quantities."""

    t: float
    u: np.ndarray
    k_field: np.ndarray
    total_mass: float
    total_variation: float
    l1_to_reference: float
    dt: float
    flux_left: float
    flux_right: float


def compute_dt(spec: ModelSpec, grid: Grid, state: State, cfl: float) -> float:
    """CFL time step cfl*dr/max|char_speed|, with a floor for motionless data."""
    smax = float(np.max(np.abs(spec.char_speed(grid.centers, state.u))))
    if smax < _SPEED_FLOOR:
        return cfl * grid.dr
    return cfl * grid.dr / smax


def l1_error(grid: Grid, u: np.ndarray, reference) -> float:
    """Discrete L1 distance sum |u_j - ref(r_j)| * dr."""
    ref = reference(grid.centers) if callable(reference) else np.asarray(reference, dtype=float)
    return float(np.sum(np.abs(u - ref)) * grid.dr)


def _snapshot(spec: ModelSpec, grid: Grid, state: State, ref: np.ndarray,
              dt: float, ql: float, qr: float) -> Snapshot:
    u = state.u
    return Snapshot(
        t=state.t,
        u=u.copy(),
        k_field=np.asarray(spec.k_invariant(grid.centers, u), dtype=float),
        total_mass=float(np.sum(spec.conserved_density(grid.centers, u)) * grid.dr),
        total_variation=float(np.sum(np.abs(np.diff(u)))),
        l1_to_reference=l1_error(grid, u, ref),
        dt=dt,
        flux_left=ql,
        flux_right=qr,
    )


def run(config: RunConfig) -> list[Snapshot]:
    """Advance the configured run from t=0 to t_end, emitting snapshots.

    Deterministic: no randomness anywhere, and the step schedule depends
    only on the configuration.  Steps are sized by the CFL condition and
    the remaining span to the next snapshot is split into equal pieces, so
    snapshots land exactly on their nominal times and no step degenerates
    to a tiny fraction of the stable one.
    """
    spec = config.spec
    grid = config.grid()
    u0 = np.asarray(config.initial.sample(spec, grid), dtype=float)
    ref = config.initial.reference(spec, grid)
    edge = make_edge_data(spec, grid, config.initial, u0)
    boundary = apply_boundary(spec, grid, edge)
    step = STEPPERS[config.scheme]

    state = State(u0.copy(), 0.0)
    snaps = [_snapshot(spec, grid, state, ref, 0.0, 0.0, 0.0)]
    if config.t_end == 0.0:
        return snaps

    if config.snapshot_steps is not None:
        every = config.snapshot_steps
        count = 0
        while state.t < config.t_end * (1.0 - 1e-14):
            dt = min(compute_dt(spec, grid, state, config.cfl), config.t_end - state.t)
            res = step(spec, grid, state, dt, boundary)
            state = res.state
            count += 1
            if count % every == 0 or state.t >= config.t_end * (1.0 - 1e-14):
                snaps.append(_snapshot(spec, grid, state, ref, dt, res.flux_left, res.flux_right))
        return snaps

    out_dt = config.snapshot_dt if config.snapshot_dt is not None else config.t_end / 10.0
    targets = []
    k = 1
    while k * out_dt < config.t_end * (1.0 - 1e-12):
        targets.append(k * out_dt)
        k += 1
    targets.append(config.t_end)

    try:
        for target in targets:
            dt_last, ql, qr = 0.0, 0.0, 0.0
            stepped = False
            while state.t < target * (1.0 - 1e-14):
                span = target - state.t
                dt_cfl = compute_dt(spec, grid, state, config.cfl)
                n_sub = max(1, math.ceil(span / dt_cfl - 1e-12))
                dt_last = span / n_sub
                res = step(spec, grid, state, dt_last, boundary)
                state = res.state
                ql, qr = res.flux_left, res.flux_right
                stepped = True
            state = State(state.u, target)  # pin the snapshot time exactly
            if stepped:
                snaps.append(_snapshot(spec, grid, state, ref, dt_last, ql, qr))
    except NumericalError as exc:
        # attach what completed so callers can keep the partial record
        exc.snapshots = snaps
        raise
    return snaps


def shock_speed_estimate(grid: Grid, snapshots: list[Snapshot],
                         jump_fraction: float = 0.25) -> float:
    """Least-squares speed of the steepest-gradient interface over time.

    Each snapshot must contain one dominant discontinuity: the largest
    cell-to-cell jump has to exceed jump_fraction times the snapshot's
    value range, else that snapshot is skipped; with fewer than two usable
    snapshots a ValueError is raised.  The location is refined to sub-cell
    accuracy with a jump-weighted centroid over the neighbouring faces.
    """
    times, locations = [], []
    inner_faces = grid.faces[1:-1]
    for snap in snapshots:
        jumps = np.abs(np.diff(snap.u))
        span = float(np.max(snap.u) - np.min(snap.u))
        if span <= 0.0 or float(np.max(jumps)) < jump_fraction * span:
            continue
        i = int(np.argmax(jumps))
        lo = max(0, i - 2)
        hi = min(len(jumps), i + 3)
        w = jumps[lo:hi]
        times.append(snap.t)
        locations.append(float(np.dot(w, inner_faces[lo:hi]) / np.sum(w)))
    if len(times) < 2:
        raise ValueError("no dominant discontinuity found in the snapshots")
    slope = np.polyfit(np.asarray(times), np.asarray(locations), 1)[0]
    return float(slope)
