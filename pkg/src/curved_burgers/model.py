"""Closed-form physics shared by the four flow models.

Every model evolves one scalar u(t, r) in balance-law form

    d/dt D(r, u) + d/dr F(r, u) = S(r, u),

with conserved density D, weighted flux F and pointwise source S.  The
flat models use a unit spatial weight on (0, r_max]; the black-hole
models carry the Schwarzschild weight r(r - 2m) on (2m, r_max], with the
horizon at r = 2m.

The relativistic flux primitives below are written in cancellation-free
form so that eps = 0 reproduces the classical expressions exactly, with
no division by eps anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "Geometry",
    "ModelKind",
    "ModelSpec",
    "SteadyProfile",
    "boost_velocity",
    "flux",
    "flux_deriv",
    "flux_inv",
    "lorentz_gamma",
    "lorentz_residuals",
    "v_to_w",
    "velocity_flux",
    "w_to_v",
]


class DomainError(ValueError):
    """Argument outside the model's state space or radial domain."""


# ---------------------------------------------------------------------------
# relativistic flux primitives; eps is the inverse light speed, eps in [0, 1]

def flux(eps: float, w):
    """Convex flux of the boosted velocity variable w; equals w**2/2 at eps=0.

    Evaluated as w^2 / (1 + sqrt(1 + eps^2 w^2)): algebraically identical to
    the -1 + sqrt(1 + eps^2 w^2) form scaled by eps^-2, but exact in the
    classical limit and free of cancellation for small eps*w.
    """
    return w * w / (1.0 + np.sqrt(1.0 + (eps * w) ** 2))


def flux_deriv(eps: float, w):
    """d(flux)/dw = w / sqrt(1 + eps^2 w^2); bounded by 1/eps for eps > 0."""
    return w / np.sqrt(1.0 + (eps * w) ** 2)


def flux_inv(eps: float, y):
    """Positive branch w >= 0 solving flux(eps, w) = y.  Requires y >= 0."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise DomainError("flux_inv requires a nonnegative flux value")
    return np.sqrt(y * (2.0 + eps * eps * y))


def v_to_w(eps: float, v):
    """Map physical velocity to the boosted variable w = v/sqrt(1 - eps^2 v^2).

    Strictly increasing bijection from (-1/eps, 1/eps) onto the reals;
    the identity when eps = 0.
    """
    v = np.asarray(v, dtype=float)
    arg = 1.0 - (eps * v) ** 2
    if eps > 0.0 and np.any(arg <= 0.0):
        raise DomainError("velocity must satisfy |v| < 1/eps")
    return v / np.sqrt(arg)


def w_to_v(eps: float, w):
    """Inverse of v_to_w; output lies in (-1/eps, 1/eps)."""
    return w / np.sqrt(1.0 + (eps * w) ** 2)


def velocity_flux(eps: float, v):
    """Flux written in the velocity variable: flux(eps, v_to_w(eps, v))."""
    return flux(eps, v_to_w(eps, v))


def lorentz_gamma(eps: float, V):
    """Boost factor 1/sqrt(1 - eps^2 V^2)."""
    V = np.asarray(V, dtype=float)
    arg = 1.0 - (eps * V) ** 2
    if eps > 0.0 and np.any(arg <= 0.0):
        raise DomainError("boost speed must satisfy |V| < 1/eps")
    return 1.0 / np.sqrt(arg)


def boost_velocity(eps: float, v, V):
    """Relativistic velocity composition (v - V)/(1 - eps^2 V v).

    Reduces to the Galilean v - V at eps = 0; maps the open light cone
    into itself for eps > 0.
    """
    v = np.asarray(v, dtype=float)
    V = np.asarray(V, dtype=float)
    if eps > 0.0 and (np.any(np.abs(v) >= 1.0 / eps) or np.any(np.abs(V) >= 1.0 / eps)):
        raise DomainError("velocities must satisfy |v| < 1/eps")
    return (v - V) / (1.0 - eps * eps * V * v)


def lorentz_residuals(eps: float, v, V):
    """Residuals of the two boost-invariance identities of the flux pair.

    Both vanish identically for the (v_to_w, velocity_flux) pair; a flux
    pair failing either identity is not form-invariant under boosts.
    """
    g = lorentz_gamma(eps, V)
    vb = boost_velocity(eps, v, V)
    e2 = eps * eps
    r1 = g * (v_to_w(eps, v) - e2 * V * velocity_flux(eps, v)) - (
        v_to_w(eps, vb) - v_to_w(eps, -V)
    )
    r2 = g * (-V * v_to_w(eps, v) + velocity_flux(eps, v)) - (
        velocity_flux(eps, vb) - velocity_flux(eps, -V)
    )
    return r1, r2


# ---------------------------------------------------------------------------
# geometry and model presets

@dataclass(frozen=True)
class Geometry:
    """Radial domain (2*mass, r_max]; the horizon face sits at r = 2*mass."""

    mass: float
    r_max: float

    def __post_init__(self):
        if self.mass < 0.0:
            raise DomainError("mass must be nonnegative")
        if self.r_max <= 2.0 * self.mass:
            raise DomainError("r_max must exceed the horizon radius 2*mass")

    @property
    def r_min(self) -> float:
        return 2.0 * self.mass

    def weight(self, r):
        """Schwarzschild weight r(r - 2m); positive on (2m, r_max]."""
        return r * (r - 2.0 * self.mass)

    def lapse(self, r):
        """1 - 2m/r; identically 1 when mass = 0 (finite at r = 0)."""
        if self.mass == 0.0:
            return np.ones_like(np.asarray(r, dtype=float))
        return 1.0 - 2.0 * self.mass / r


class ModelKind(enum.Enum):
    FLAT_CLASSICAL = "flat-classical"
    FLAT_RELATIVISTIC = "flat-relativistic"
    GEOM_RELATIVISTIC = "geom-relativistic"
    GEOM_PRESSURELESS = "geom-pressureless"


# models whose evolved variable is the boosted w rather than the velocity v
_W_MODELS = (ModelKind.FLAT_RELATIVISTIC, ModelKind.GEOM_RELATIVISTIC)
_GEOM_MODELS = (ModelKind.GEOM_RELATIVISTIC, ModelKind.GEOM_PRESSURELESS)


@dataclass(frozen=True)
class ModelSpec:
    """One of the four model presets, with its light-speed and geometry data."""

    kind: ModelKind
    eps: float
    geometry: Geometry

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise DomainError("eps must lie in [0, 1]")
        if self.kind is ModelKind.FLAT_CLASSICAL and self.eps != 0.0:
            raise DomainError("the classical model requires eps = 0")
        if self.kind is not ModelKind.FLAT_CLASSICAL and self.eps <= 0.0:
            raise DomainError(f"{self.kind.value} requires eps > 0")
        if not self.is_geometric and self.geometry.mass != 0.0:
            raise DomainError("flat models require mass = 0")

    # -- classification ----------------------------------------------------

    @property
    def is_geometric(self) -> bool:
        return self.kind in _GEOM_MODELS

    @property
    def is_w_variable(self) -> bool:
        return self.kind in _W_MODELS

    @property
    def c(self) -> float:
        """Light speed 1/eps (eps > 0 only)."""
        if self.eps <= 0.0:
            raise DomainError("light speed undefined for eps = 0")
        return 1.0 / self.eps

    def weight(self, r):
        """Spatial flux weight: r(r - 2m) for geometric models, 1 otherwise."""
        if self.is_geometric:
            return self.geometry.weight(r)
        return np.ones_like(np.asarray(r, dtype=float))

    # -- balance-law ingredients -------------------------------------------

    def conserved_density(self, r, u):
        """D(r, u): r^2 u for geometric models, u for flat ones."""
        if self.is_geometric:
            return r * r * u
        return np.asarray(u, dtype=float) * np.ones_like(np.asarray(r, dtype=float))

    def invert_density(self, r, d):
        if self.is_geometric:
            return d / (r * r)
        return d

    def physical_flux(self, r, u):
        """Weighted flux F(r, u); vanishes at the horizon for geometric models."""
        if self.kind is ModelKind.FLAT_CLASSICAL:
            return 0.5 * u * u * np.ones_like(np.asarray(r, dtype=float))
        if self.kind is ModelKind.FLAT_RELATIVISTIC:
            return flux(self.eps, u) * np.ones_like(np.asarray(r, dtype=float))
        if self.kind is ModelKind.GEOM_RELATIVISTIC:
            return self.geometry.weight(r) * flux(self.eps, u)
        return self.geometry.weight(r) * 0.5 * u * u

    def source(self, r, u):
        """Pointwise source: r u^2 - m c^2 for the pressureless model, else 0."""
        if self.kind is ModelKind.GEOM_PRESSURELESS:
            return r * u * u - self.geometry.mass * self.c * self.c
        return np.zeros_like(np.asarray(u, dtype=float) * np.asarray(r, dtype=float))

    def char_speed(self, r, u):
        """dF/dD at fixed r; sets the CFL limit and the numerical viscosity."""
        if self.kind is ModelKind.FLAT_CLASSICAL:
            return u * np.ones_like(np.asarray(r, dtype=float))
        if self.kind is ModelKind.FLAT_RELATIVISTIC:
            return flux_deriv(self.eps, u) * np.ones_like(np.asarray(r, dtype=float))
        if self.kind is ModelKind.GEOM_RELATIVISTIC:
            return self.geometry.lapse(r) * flux_deriv(self.eps, u)
        return self.geometry.lapse(r) * u

    # -- steady families ----------------------------------------------------

    def k_invariant(self, r, u):
        """First integral of the steady equation, constant along steady profiles.

        Flat and w-variable models: the weighted flux itself.  Pressureless
        model: K^2 = (c^2 - v^2)/(1 - 2m/r), which requires |v| <= c and
        r > 2m.
        """
        if self.kind is ModelKind.GEOM_PRESSURELESS:
            gap = self.c * self.c - u * u
            if np.any(np.asarray(gap) < 0.0):
                raise DomainError("pressureless state must satisfy |v| <= c")
            return gap / self.geometry.lapse(r)
        return self.physical_flux(r, u)

    def steady_value(self, k, sign, r):
        """Steady-family member with invariant k and branch sign, at radius r.

        k carries the same units as k_invariant (so K^2 for the pressureless
        model).  Raises DomainError where the profile leaves the state space.
        """
        if self.kind is ModelKind.GEOM_PRESSURELESS:
            rad = self.c * self.c - k * self.geometry.lapse(r)
            if np.any(np.asarray(rad) < 0.0):
                raise DomainError("steady profile undefined: negative radicand")
            return sign * np.sqrt(rad)
        if self.is_geometric:
            w_r = np.asarray(r, dtype=float)
            if np.any(w_r <= self.geometry.r_min):
                raise DomainError("steady profile undefined at or inside the horizon")
        return sign * flux_inv(self.eps, k / self.weight(r))

    def profile_flux(self, k, r):
        """Weighted flux along the steady profile with invariant k.

        Closed form, finite at the horizon: constant k for flux-conserving
        models, weight(r)*(c^2 - k*(1 - 2m/r))/2 for the pressureless model
        (no square root, so it extends smoothly past a vanishing radicand).
        """
        if self.kind is ModelKind.GEOM_PRESSURELESS:
            return self.geometry.weight(r) * 0.5 * (self.c * self.c - k * self.geometry.lapse(r))
        return k * np.ones_like(np.asarray(r, dtype=float))

    def to_velocity(self, u):
        """Physical velocity of the evolved variable (identity for v-models)."""
        if self.is_w_variable:
            return w_to_v(self.eps, u)
        return u

    def from_velocity(self, v):
        """Evolved variable for a given physical velocity."""
        if self.is_w_variable:
            return v_to_w(self.eps, v)
        return v


@dataclass(frozen=True)
class SteadyProfile:
    """One member of a model's steady family: invariant value and branch sign.

    k is expressed in k_invariant units (K for flux-conserving models, K^2
    for the pressureless one); sign picks the +/- branch.
    """

    k: float
    sign: float

    def __post_init__(self):
        if self.k < 0.0:
            raise DomainError("steady invariant must be nonnegative")
        if self.sign not in (-1.0, 0.0, 1.0):
            raise DomainError("sign must be -1, 0 or +1")

    def value(self, spec: ModelSpec, r):
        return spec.steady_value(self.k, self.sign, r)
