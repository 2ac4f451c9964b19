"""Return map on the cylinder and the rotational limit cycle.

The section is the vertical line through the saddle ``A0`` (``phi_s = -pi -
phi0``) while equilibria exist and ``phi_s = 0`` otherwise.  A point
``(phi_s, z0)`` with ``z0 > 0`` is carried once around the cylinder in the
graph form; the return value ``P(z0)`` is the height at ``phi_s + 2*pi``.

``P`` is increasing (orbits cannot cross) and maps the level
``(beta + 1)/gamma`` below itself, because the field points down along that
line.  Its fixed point is the running solution; the derivative there is
``exp(-gamma * T)`` with ``T`` the period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .connection import critical_beta
from .errors import Degenerate, DomainError, NoCycle, NumericalError
from .integrate import (CaptureEvent, EventKind, IntegrationControls, TrajectorySegment,
                        _graph_core, integrate_time)
from .model import (FixedPointKind, ModelParams, PhaseState, TWO_PI, divergence, energy,
                    equilibria, main_interval)

__all__ = [
    "PeriodicOrbit",
    "FirstKindReport",
    "section_phi",
    "poincare_map",
    "find_limit_cycle",
    "verify_no_first_kind_cycle",
]

# lower end of the fixed-point bracket: just above the section's saddle
Z_LOW = 1e-10


@dataclass
class PeriodicOrbit:
    """Rotational cycle through ``(section, z_start)``.

    ``contraction`` is the central-difference slope of the return map at the
    fixed point.  ``log_contraction`` is the log of the same slope obtained by
    integrating the variational equation along the orbit; it stays accurate
    when the slope itself underflows the map's rounding noise.
    """

    params: ModelParams
    section: float
    phi: np.ndarray
    samples: np.ndarray
    z_start: float
    period_T: float
    mean_velocity: float
    phase_integral: float
    contraction: float
    z_return: float
    log_contraction: float = math.nan
    map_evaluations: int = 0
    solver: str = "iterate"

    @property
    def expected_contraction(self) -> float:
        return math.exp(-self.params.gamma * self.period_T)

    @property
    def integral_residual(self) -> float:
        """Relative gap between the z-integral and ``2*pi*beta/gamma``."""
        target = TWO_PI * self.params.beta / self.params.gamma
        return abs(self.phase_integral - target) / target


@dataclass
class FirstKindReport:
    params: ModelParams
    divergence: float
    vacuous: bool
    passed: bool
    orbits: list[dict] = field(default_factory=list)


def section_phi(params: ModelParams) -> float:
    if params.beta > 1:
        return 0.0
    return main_interval(params)[0]


def _lap(z0: float, params: ModelParams, controls: IntegrationControls,
         quadratures: bool = False):
    phi_s = section_phi(params)
    return _graph_core(float(z0), phi_s, phi_s + TWO_PI, params, controls, quadratures)


def poincare_map(z0: float, params: ModelParams,
                 controls: IntegrationControls = IntegrationControls()) -> Optional[float]:
    """Height after one lap around the cylinder, or ``None`` if the orbit falls.

    Falling means reaching the axis (or sinking into an equilibrium) before
    completing the lap.
    """
    if not z0 > 0:
        raise DomainError(f"return map needs z0 > 0, got {z0!r}")
    _, _, term, _ = _lap(z0, params, controls)
    if term.kind is EventKind.SPAN_EXHAUSTED:
        return term.z
    return None


class _CountingMap:
    def __init__(self, params, controls):
        self.params = params
        self.controls = controls
        self.calls = 0

    def __call__(self, z):
        self.calls += 1
        return poincare_map(z, self.params, self.controls)

    def residual(self, z):
        p = self(z)
        return -z if p is None else p - z


def _steffensen(P: _CountingMap, lo: float, hi: float, tol: float,
                max_iter: int = 200) -> float:
    """Fixed point of a contracting increasing map inside ``[lo, hi]``.

    Aitken-accelerated iteration started from the upper end; every map value
    also tightens the bracket, and bisection takes over whenever an
    accelerated step would leave it.
    """
    z = hi
    for _ in range(max_iter):
        p1 = P(z)
        r1 = -z if p1 is None else p1 - z
        if r1 > 0:
            lo = z
        else:
            hi = z
        if p1 is None:
            z = 0.5 * (lo + hi)
            continue
        if abs(r1) <= tol:
            return z
        p2 = P(p1)
        if p2 is not None:
            if p2 > p1:
                lo = max(lo, p1)
            else:
                hi = min(hi, p1)
            denom = p2 - 2.0 * p1 + z
            step = z - r1 * r1 / denom if denom != 0.0 else p2
        else:
            step = math.nan
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if abs(step - z) <= tol or hi - lo <= tol:
            return step
        z = step
    raise NumericalError(f"fixed-point iteration stalled in [{lo}, {hi}]")


def _sample_orbit(phi: np.ndarray, z: np.ndarray, params: ModelParams, n: int):
    keep = np.concatenate(([True], np.diff(phi) > 0))
    phi, z = phi[keep], z[keep]
    dz = (params.beta - np.sin(phi)) / z - params.gamma
    spline = CubicHermiteSpline(phi, z, dz)
    grid = np.linspace(phi[0], phi[0] + TWO_PI, n, endpoint=False)
    return grid, spline(grid)


def find_limit_cycle(params: ModelParams, tol: float = 1e-9,
                     controls: IntegrationControls = IntegrationControls(),
                     beta_tol: float = 1e-6, gate: bool = True,
                     bracket: Optional[tuple[float, float]] = None,
                     solver: str = "iterate", n_samples: int = 256) -> PeriodicOrbit:
    """Locate the rotational periodic orbit ``z_T(phi) > 0``.

    With ``gate=True`` and ``beta <= 1`` the critical drive is computed first:
    ``beta`` within ``beta_tol`` of it raises :class:`Degenerate`, below it
    :class:`NoCycle`.  With ``gate=False`` existence is decided by the return
    map alone (does the orbit just above the section saddle come back higher
    than it started?).

    ``solver`` is ``"iterate"`` (accelerated iteration of the map from the
    upper bracket end) or ``"brent"`` (Brent's method on ``P(z) - z``).
    """
    if not params.gamma > 0:
        raise DomainError("limit cycle search needs gamma > 0")
    if solver not in ("iterate", "brent"):
        raise DomainError(f"unknown solver {solver!r}")
    beta, gamma = params.beta, params.gamma
    if gate and beta <= 1:
        crit = critical_beta(gamma, beta_tol, controls)
        if abs(beta - crit.beta0) < beta_tol:
            raise Degenerate(f"beta={beta} within {beta_tol} of beta0={crit.beta0}")
        if beta < crit.beta0:
            phi, z, term, _ = _lap(Z_LOW, params, controls)
            evidence = TrajectorySegment(phi, phi, z, term, "phi")
            raise NoCycle(f"beta={beta} below beta0={crit.beta0} for gamma={gamma}",
                          evidence)

    P = _CountingMap(params, controls)
    lo, hi = bracket if bracket is not None else (Z_LOW, (beta + 1.0) / gamma)
    r_lo = P.residual(lo)
    if r_lo <= 0:
        phi, z, term, _ = _lap(lo, params, controls)
        raise NoCycle(f"orbit from z={lo:g} does not return higher "
                      f"(beta={beta}, gamma={gamma})",
                      TrajectorySegment(phi, phi, z, term, "phi"))
    if P.residual(hi) > 0:
        raise NumericalError(f"return map exceeds the identity at upper bracket z={hi}")

    if solver == "brent":
        z_star = brentq(P.residual, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
    else:
        z_star = _steffensen(P, lo, hi, tol)

    phi, z, term, (period, integral, log_slope) = _lap(z_star, params, controls,
                                                       quadratures=True)
    if term.kind is not EventKind.SPAN_EXHAUSTED:
        raise NumericalError(f"cycle candidate z={z_star} fell during the diagnostic lap")
    grid, samples = _sample_orbit(phi, z, params, n_samples)

    fine = replace(controls, rel_tol=min(controls.rel_tol, 1e-12),
                   abs_tol=min(controls.abs_tol, 1e-14))
    h = 1e-4 * z_star
    up = poincare_map(z_star + h, params, fine)
    down = poincare_map(z_star - h, params, fine)
    if up is None:
        raise NumericalError("return map undefined next to the fixed point")
    if down is None:
        centre = poincare_map(z_star, params, fine)
        slope = (up - centre) / h
    else:
        slope = (up - down) / (2.0 * h)

    period = float(period)
    return PeriodicOrbit(params=params, section=section_phi(params), phi=grid,
                         samples=samples, z_start=float(z_star), period_T=period,
                         mean_velocity=TWO_PI / period, phase_integral=float(integral),
                         contraction=float(slope), z_return=float(term.z),
                         log_contraction=float(log_slope),
                         map_evaluations=P.calls, solver=solver)


def verify_no_first_kind_cycle(params: ModelParams,
                               controls: IntegrationControls = IntegrationControls(),
                               radius: float = 0.2, span: float = 2000.0
                               ) -> FirstKindReport:
    """Numerical stand-in for the Bendixson argument on the cylinder.

    The divergence is ``-gamma`` everywhere, and the washboard energy
    ``z**2/2 - cos(phi) - beta*phi`` decays as ``-gamma*z**2`` along every
    orbit, so no contractible closed orbit can exist.  Orbits launched on a
    small ring around each sink must show non-increasing energy, shrinking
    turning amplitudes, and end up captured by the sink.
    """
    if not params.gamma > 0:
        raise DomainError("first-kind cycle check needs gamma > 0")
    div = divergence(params)
    sinks = [fp for fp in equilibria(params, (0, 0)) if fp.kind is FixedPointKind.SINK]
    if not sinks:
        return FirstKindReport(params, div, vacuous=True, passed=div < 0)
    orbits = []
    ok = div < 0
    for sink in sinks:
        # stay well inside the basin: ring radius below the saddle distance
        r = min(radius, 0.25 * (math.pi - 2.0 * math.asin(params.beta)))
        for dphi, dz in ((r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)):
            start = PhaseState(sink.phi + dphi, dz)
            seg = integrate_time(start, params, controls,
                                 (CaptureEvent(points=(sink,), radius=1e-3),), span=span)
            e = energy(seg.phi, seg.z, params)
            steps = np.diff(e)
            monotone = bool(np.all(steps <= 1e-9 * (1.0 + np.abs(e[:-1]))))
            flips = np.nonzero(np.sign(seg.z[1:]) != np.sign(seg.z[:-1]))[0]
            amps = np.abs(seg.phi[flips] - sink.phi)
            shrinking = bool(np.all(np.diff(amps) <= 1e-9))
            captured = seg.terminal.kind is EventKind.EQUILIBRIUM_CAPTURE
            orbits.append({"start": (start.phi, start.z), "energy_monotone": monotone,
                           "amplitudes": amps.tolist(), "amplitudes_shrinking": shrinking,
                           "captured": captured})
            ok = ok and monotone and shrinking and captured
    return FirstKindReport(params, div, vacuous=False, passed=ok, orbits=orbits)
