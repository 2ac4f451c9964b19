"""Separatrix shooting and the saddle-connection drive ``beta0(gamma)``.

The unstable branch ``R`` of the saddle ``A0 = (-pi - phi0, 0)`` that enters
the upper half plane either falls back onto the axis before the vertical
line through the next saddle ``A1 = (pi - phi0, 0)`` (the drive is too weak),
crosses that line above the axis (the drive is strong enough to run), or
runs into ``A1`` itself (a saddle connection).  Because the field rotates
monotonically with ``beta``, the outcome switches exactly once along
``0 <= beta <= 1`` and plain bisection locates the switch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ClassificationAmbiguous, DomainError
from .integrate import (AxisEvent, CaptureEvent, EnergyEvent, EventKind,
                        IntegrationControls, LineEvent, TrajectorySegment, integrate_time)
from .model import FixedPoint, ModelParams, PhaseState, equilibria, separatrix_slopes

__all__ = [
    "ShootKind",
    "ShootOutcome",
    "CriticalResult",
    "saddle_frame",
    "shoot_unstable_manifold",
    "plateau_reached",
    "critical_beta",
    "gamma_min",
]

DEFAULT_OFFSET = 1e-7


class ShootKind(enum.Enum):
    HIT_AXIS = "HitAxis"
    HIT_LINE_K1 = "HitLineK1"
    HIT_SADDLE = "HitSaddle"


@dataclass
class ShootOutcome:
    kind: ShootKind
    trajectory: TrajectorySegment
    phi_c: Optional[float] = None
    z_c: Optional[float] = None

    @property
    def supercritical(self) -> bool:
        return self.kind is ShootKind.HIT_LINE_K1


@dataclass(frozen=True)
class CriticalResult:
    gamma: float
    beta0: float
    bracket_width: float
    evaluations: int
    plateau: bool = False


def saddle_frame(params: ModelParams) -> tuple[FixedPoint, FixedPoint, FixedPoint]:
    """``(A0, B0, A1)``: the saddles bounding the main interval and the sink between."""
    if params.beta >= 1:
        raise DomainError(f"saddles need beta < 1, got {params.beta}")
    a0, b0, a1 = equilibria(params, (-1, 1))
    return a0, b0, a1


def _washboard(phi: float, beta: float) -> float:
    return -math.cos(phi) - beta * phi


def shoot_unstable_manifold(params: ModelParams, offset: float = DEFAULT_OFFSET,
                            controls: IntegrationControls = IntegrationControls(),
                            early_exit: bool = False) -> ShootOutcome:
    """Follow ``R`` from ``A0`` until it meets the axis, the line K1 or ``A1``.

    The start point is ``A0 + offset * (1, lambda1) / |(1, lambda1)|``.  An
    orbit that sinks into ``B0`` without crossing the axis (node case) is
    reported as ``HIT_AXIS`` with ``phi_c = phi0``.

    With ``early_exit=True`` the shot also stops as soon as the washboard
    energy drops below its value at ``A1``; from then on the orbit cannot
    reach K1, so the outcome is ``HIT_AXIS`` with ``phi_c = None``.  This is
    all the bisection needs and saves the slow crawl into a near-degenerate
    node.  The same energy test classifies a shot that runs out of span.
    """
    if params.beta >= 1:
        raise DomainError(f"shooting needs a saddle, beta={params.beta} >= 1")
    if not offset > 0:
        raise DomainError(f"offset must be positive, got {offset!r}")
    a0, b0, a1 = saddle_frame(params)
    lam1, _ = separatrix_slopes(params)
    norm = math.hypot(1.0, lam1)
    start = PhaseState(a0.phi + offset / norm, offset * lam1 / norm)
    trap_level = _washboard(a1.phi, params.beta)
    events = [AxisEvent(-1, arm_phi=start.phi + controls.event_tol),
              LineEvent(a1.phi),
              CaptureEvent(points=(a1, b0))]
    if early_exit and params.gamma > 0:
        events.append(EnergyEvent(trap_level))
    seg = integrate_time(start, params, controls, events)
    term = seg.terminal
    if term.kind is EventKind.ENERGY_LEVEL:
        return ShootOutcome(ShootKind.HIT_AXIS, seg)
    if term.kind is EventKind.AXIS_CROSSING:
        return ShootOutcome(ShootKind.HIT_AXIS, seg, phi_c=term.phi)
    if term.kind is EventKind.VERTICAL_LINE_CROSSING:
        return ShootOutcome(ShootKind.HIT_LINE_K1, seg, z_c=term.z)
    if term.kind is EventKind.EQUILIBRIUM_CAPTURE:
        if term.fixed_point == a1:
            return ShootOutcome(ShootKind.HIT_SADDLE, seg, phi_c=a1.phi, z_c=0.0)
        return ShootOutcome(ShootKind.HIT_AXIS, seg, phi_c=b0.phi)
    if (term.kind is EventKind.SPAN_EXHAUSTED and params.gamma > 0
            and 0.5 * term.z ** 2 + _washboard(term.phi, params.beta) < trap_level
            and term.phi < a1.phi):
        return ShootOutcome(ShootKind.HIT_AXIS, seg)
    raise ClassificationAmbiguous(
        f"shot at beta={params.beta}, gamma={params.gamma} ended with {term.kind.value} "
        f"at t={term.t:.6g}; loosen max_span or tolerances")


def plateau_reached(gamma: float, beta_tol: float = 1e-6,
                    controls: IntegrationControls = IntegrationControls(),
                    offset: float = DEFAULT_OFFSET) -> bool:
    """True when ``R`` still fails to run at ``beta = 1 - beta_tol``.

    Then ``beta0(gamma) = 1`` to within ``beta_tol``.
    """
    shot = shoot_unstable_manifold(ModelParams(1.0 - beta_tol, gamma), offset, controls,
                                   early_exit=True)
    return not shot.supercritical


def critical_beta(gamma: float, tol: float = 1e-6,
                  controls: IntegrationControls = IntegrationControls(),
                  offset: float = DEFAULT_OFFSET) -> CriticalResult:
    """Bisect ``beta`` on ``[0, 1]`` for the saddle-connection value.

    ``HIT_AXIS`` moves the lower end up, ``HIT_LINE_K1`` moves the upper end
    down.  A shot landing in ``A1`` ends the search on the spot.  If the shot
    at ``1 - tol`` still does not run, the over-damped plateau
    ``beta0 = 1`` is returned without shooting at ``beta = 1``.
    """
    if not gamma > 0:
        raise DomainError(f"critical drive needs gamma > 0, got {gamma!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    evaluations = 1
    if plateau_reached(gamma, tol, controls, offset):
        return CriticalResult(gamma, 1.0, tol, evaluations, plateau=True)

    lo, hi = 0.0, 1.0 - tol
    first = shoot_unstable_manifold(ModelParams(lo, gamma), offset, controls, early_exit=True)
    evaluations += 1
    if first.supercritical:
        raise ClassificationAmbiguous(f"R runs already at beta=0 for gamma={gamma}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        shot = shoot_unstable_manifold(ModelParams(mid, gamma), offset, controls,
                                       early_exit=True)
        evaluations += 1
        if shot.kind is ShootKind.HIT_LINE_K1:
            hi = mid
        elif shot.kind is ShootKind.HIT_AXIS:
            lo = mid
        else:
            lo = hi = mid
    return CriticalResult(gamma, 0.5 * (lo + hi), hi - lo, evaluations)


def gamma_min(tol: float = 0.01, controls: IntegrationControls = IntegrationControls(),
              beta_tol: float = 1e-6, bracket: tuple[float, float] = (0.5, 2.0),
              offset: float = DEFAULT_OFFSET) -> float:
    """Smallest damping whose critical drive sits on the plateau ``beta0 = 1``.

    The plateau predicate is monotone in ``gamma`` (once on the plateau, larger
    damping stays there), so the threshold is bisected inside ``bracket``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    lo, hi = map(float, bracket)
    if plateau_reached(lo, beta_tol, controls, offset):
        raise DomainError(f"plateau already reached at lower bracket gamma={lo}")
    if not plateau_reached(hi, beta_tol, controls, offset):
        raise DomainError(f"plateau not reached at upper bracket gamma={hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if plateau_reached(mid, beta_tol, controls, offset):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
