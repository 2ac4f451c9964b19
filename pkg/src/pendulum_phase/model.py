"""Closed-form pieces of the driven, damped pendulum field.

The autonomous system is::

    dphi/dt = z
    dz/dt   = beta - sin(phi) - gamma * z

considered on the cylinder (phi is 2*pi periodic).  Angles are kept on the
universal cover; :func:`wrap_to_main_interval` performs the cylinder
reduction explicitly when it is wanted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "PhaseState",
    "FieldVector",
    "FixedPointKind",
    "FixedPoint",
    "Region",
    "rhs",
    "slope_field",
    "equilibria",
    "separatrix_slopes",
    "curve_g",
    "classify_region",
    "rotation_rate_gamma",
    "rotation_rate_beta",
    "divergence",
    "energy",
    "main_interval",
    "wrap_to_main_interval",
    "phi0",
]

TWO_PI = 2.0 * math.pi

# z-tolerance band used by classify_region
DEFAULT_REGION_TOL = 1e-9
# |beta - sin(phi)| below this counts as zero (rounding of sin at phi_n)
_ROUNDING = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class ModelParams:
    """Drive ``beta`` and damping ``gamma`` of one vector-field instance."""

    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise DomainError(f"{name} must be >= 0, got {value!r}")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True)
class PhaseState:
    """A point ``(phi, z)`` on the universal cover of the cylinder."""

    phi: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.z)):
            raise DomainError(f"non-finite phase state ({self.phi!r}, {self.z!r})")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.z], dtype=float)

    def cylinder_equivalent(self, other: "PhaseState", tol: float = 1e-12) -> bool:
        """True when both states project to the same point on the cylinder."""
        turns = (self.phi - other.phi) / TWO_PI
        return abs(turns - round(turns)) * TWO_PI <= tol and abs(self.z - other.z) <= tol


@dataclass(frozen=True)
class FieldVector:
    dphi: float
    dz: float


class FixedPointKind(enum.Enum):
    SADDLE = "saddle"
    SINK = "sink"
    CENTER = "center"
    SADDLE_NODE = "saddle-node"


@dataclass(frozen=True)
class FixedPoint:
    """Equilibrium on the phi-axis.

    ``index`` is the integer ``n`` of ``phi_n = n*pi + (-1)**n * arcsin(beta)``.
    ``slopes`` holds ``(lambda1, lambda2)`` for saddles only; these are both the
    eigenvalues of the linearisation and the slopes of the eigen-directions
    ``(1, lambda)``.  ``discriminant`` is ``gamma**2/4 - cos(phi)``: a sink
    with positive discriminant is a node, otherwise a focus.
    """

    phi: float
    kind: FixedPointKind
    index: int
    slopes: Optional[tuple[float, float]] = None
    discriminant: float = 0.0

    @property
    def state(self) -> PhaseState:
        return PhaseState(self.phi, 0.0)

    @property
    def is_node(self) -> bool:
        return self.kind is FixedPointKind.SINK and self.discriminant > 0


class Region(enum.Enum):
    """Position relative to the nullcline G and the phi-axis.

    LAMBDA1: 0 < z < G;  LAMBDA2: G < z < 0;  LAMBDA3: z > max(G, 0);
    LAMBDA4: z < min(G, 0).
    """

    LAMBDA1 = "Lambda1"
    LAMBDA2 = "Lambda2"
    LAMBDA3 = "Lambda3"
    LAMBDA4 = "Lambda4"
    ON_G = "OnG"
    ON_AXIS = "OnAxis"
    AT_FIXED_POINT = "AtFixedPoint"


def phi0(params: ModelParams) -> float:
    """``arcsin(beta)``; only defined while equilibria exist (beta <= 1)."""
    if params.beta > 1:
        raise DomainError(f"no equilibria for beta={params.beta} > 1")
    return math.asin(params.beta)


def rhs(state: PhaseState, params: ModelParams) -> FieldVector:
    z = state.z
    return FieldVector(z, params.beta - math.sin(state.phi) - params.gamma * z)


def slope_field(state: PhaseState, params: ModelParams) -> float:
    """dz/dphi along trajectories.

    Returns ``math.inf`` on the axis away from equilibria (vertical tangent)
    and ``math.nan`` at an equilibrium, where the slope is undefined.
    """
    q = params.beta - math.sin(state.phi)
    if state.z == 0.0:
        return math.nan if abs(q) <= _ROUNDING else math.inf
    return q / state.z - params.gamma


def _eigen_pair(cos_phi: float, gamma: float) -> tuple[float, float]:
    root = math.sqrt(0.25 * gamma * gamma - cos_phi)
    return (-0.5 * gamma + root, -0.5 * gamma - root)


def equilibria(params: ModelParams, n_range: tuple[int, int] = (-1, 1)) -> list[FixedPoint]:
    """Equilibria ``phi_n`` for ``n_range[0] <= n <= n_range[1]``, sorted by phi.

    At ``beta == 1`` pairs ``phi_{2k}``/``phi_{2k+1}`` coincide and are
    returned once as a saddle-node (with the smaller index).  Returns an empty
    list for ``beta > 1``.
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo > hi:
        raise DomainError(f"empty index range {n_range!r}")
    beta, gamma = params.beta, params.gamma
    if beta > 1:
        return []
    p0 = math.asin(beta)
    points: list[FixedPoint] = []
    if beta == 1.0:
        seen: set[int] = set()
        for n in range(lo, hi + 1):
            k = n // 2
            if k in seen:
                continue
            seen.add(k)
            phi = 2 * k * math.pi + 0.5 * math.pi
            points.append(FixedPoint(phi, FixedPointKind.SADDLE_NODE, n, (0.0, -gamma),
                                     0.25 * gamma * gamma))
        return sorted(points, key=lambda fp: fp.phi)
    cos0 = math.cos(p0)
    for n in range(lo, hi + 1):
        phi = n * math.pi + (-1) ** (n % 2) * p0
        if n % 2:
            disc = 0.25 * gamma * gamma + cos0
            points.append(FixedPoint(phi, FixedPointKind.SADDLE, n,
                                     _eigen_pair(-cos0, gamma), disc))
        else:
            kind = FixedPointKind.SINK if gamma > 0 else FixedPointKind.CENTER
            points.append(FixedPoint(phi, kind, n, None, 0.25 * gamma * gamma - cos0))
    return sorted(points, key=lambda fp: fp.phi)


def separatrix_slopes(params: ModelParams) -> tuple[float, float]:
    """Eigen-slopes ``(lambda1, lambda2)`` at the saddles.

    ``lambda1 > 0`` is the unstable direction, ``lambda2 < 0`` the stable one.
    At ``beta == 1`` the degenerate pair ``(0, -gamma)`` of the saddle-node is
    returned.
    """
    if params.beta > 1:
        raise DomainError(f"no saddle for beta={params.beta} > 1")
    if params.beta == 1.0:
        return (0.0, -params.gamma)
    return _eigen_pair(-math.cos(math.asin(params.beta)), params.gamma)


def curve_g(phi, params: ModelParams):
    """The z-nullcline ``z = (beta - sin(phi)) / gamma``; accepts arrays."""
    if params.gamma == 0:
        raise DomainError("curve G is undefined for gamma = 0")
    return (params.beta - np.sin(phi)) / params.gamma


def classify_region(state: PhaseState, params: ModelParams,
                    tol: float = DEFAULT_REGION_TOL) -> Region:
    if params.gamma == 0:
        raise DomainError("region decomposition needs gamma > 0")
    z = state.z
    g = float(curve_g(state.phi, params))
    if abs(z) <= tol:
        if abs(params.beta - math.sin(state.phi)) <= tol:
            return Region.AT_FIXED_POINT
        return Region.ON_AXIS
    if abs(z - g) <= tol:
        return Region.ON_G
    if z > 0:
        return Region.LAMBDA1 if z < g else Region.LAMBDA3
    return Region.LAMBDA2 if z > g else Region.LAMBDA4


def _rotation_denominator(state: PhaseState, params: ModelParams) -> float:
    q = params.beta - math.sin(state.phi) - params.gamma * state.z
    denom = state.z * state.z + q * q
    if denom <= _ROUNDING * _ROUNDING:
        raise DomainError(f"field vanishes at ({state.phi}, {state.z}); angle undefined")
    return denom


def rotation_rate_gamma(state: PhaseState, params: ModelParams) -> float:
    """d(theta)/d(gamma) of the field direction angle; never positive."""
    return -state.z * state.z / _rotation_denominator(state, params)


def rotation_rate_beta(state: PhaseState, params: ModelParams) -> float:
    """d(theta)/d(beta); has the sign of z."""
    return state.z / _rotation_denominator(state, params)


def divergence(params: ModelParams) -> float:
    """Divergence of the field, constant over the whole plane."""
    return -params.gamma


def energy(phi, z, params: ModelParams):
    """Tilted-washboard energy ``z**2/2 - cos(phi) - beta*phi``.

    Along any trajectory ``dE/dt = -gamma * z**2``.
    """
    return 0.5 * np.square(z) - np.cos(phi) - params.beta * np.asarray(phi)


def main_interval(params: ModelParams) -> tuple[float, float]:
    """``[-pi - phi0, pi - phi0]``; ``[-pi, pi]`` once equilibria are gone."""
    p0 = math.asin(params.beta) if params.beta <= 1 else 0.0
    return (-math.pi - p0, math.pi - p0)


def wrap_to_main_interval(phi, params: ModelParams):
    lo, _ = main_interval(params)
    return lo + np.mod(np.asarray(phi, dtype=float) - lo, TWO_PI)
