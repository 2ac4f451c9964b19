"""Adaptive Dormand-Prince 5(4) integration with terminal events.

Two forms of the pendulum field are integrated here:

* time form ``(phi, z)(t)``, used for separatrix shots and long runs;
* graph form ``z(phi)`` with ``dz/dphi = (beta - sin phi)/z - gamma``, used for
  the return map between sections ``phi = const``.  The graph form is singular
  on the axis, so once ``z`` drops below ``controls.z_floor`` the integration
  is handed to the time form and finished there.

Events are bracketed on accepted steps and localized with Brent's method on
the *re-stepped* solution: the accepted step is recomputed with a shorter
step size from the same starting point, so the localized state carries the
same accuracy as an ordinary accepted step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError, StiffnessFailure
from .model import FixedPoint, FixedPointKind, ModelParams, PhaseState, TWO_PI

__all__ = [
    "IntegrationControls",
    "EventKind",
    "TerminalEvent",
    "TrajectorySegment",
    "AxisEvent",
    "LineEvent",
    "CaptureEvent",
    "EnergyEvent",
    "integrate_time",
    "integrate_graph",
]


@dataclass(frozen=True)
class IntegrationControls:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 1.0
    max_span: float = 1e5
    event_tol: float = 1e-10
    capture_radius: float = 1e-6
    z_floor: float = 1e-4
    blowup: float = 1e8

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "max_span", "event_tol",
                     "capture_radius", "z_floor", "blowup"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be strictly positive, got {value!r}")


class EventKind(enum.Enum):
    SPAN_EXHAUSTED = "SpanExhausted"
    AXIS_CROSSING = "AxisCrossing"
    VERTICAL_LINE_CROSSING = "VerticalLineCrossing"
    EQUILIBRIUM_CAPTURE = "EquilibriumCapture"
    ENERGY_LEVEL = "EnergyLevel"
    BLOW_UP = "BlowUp"


@dataclass(frozen=True)
class TerminalEvent:
    kind: EventKind
    t: float
    state: PhaseState
    fixed_point: Optional[FixedPoint] = None

    @property
    def phi(self) -> float:
        return self.state.phi

    @property
    def z(self) -> float:
        return self.state.z


@dataclass
class TrajectorySegment:
    """Sampled trajectory plus the event that ended it.

    ``t`` is the independent variable: time for the time form, phi for the
    graph form (``independent`` says which).  ``phi`` and ``z`` are always
    populated.
    """

    t: np.ndarray
    phi: np.ndarray
    z: np.ndarray
    terminal: TerminalEvent
    independent: str = "time"
    extras: dict = field(default_factory=dict)

    @property
    def samples(self) -> list[tuple[float, PhaseState]]:
        return [(float(t), PhaseState(float(p), float(z)))
                for t, p, z in zip(self.t, self.phi, self.z)]

    @property
    def final_state(self) -> PhaseState:
        return PhaseState(float(self.phi[-1]), float(self.z[-1]))


@dataclass(frozen=True)
class AxisEvent:
    """Crossing of ``z = 0``; ``direction=-1`` means downward."""

    direction: int = -1
    arm_phi: float = -math.inf


@dataclass(frozen=True)
class LineEvent:
    """Crossing of the vertical line ``phi = phi_line``."""

    phi_line: float
    direction: int = 1


@dataclass(frozen=True)
class CaptureEvent:
    """Entry into a small disc around an equilibrium.

    With ``points=None`` every equilibrium of the field (all periodic copies)
    is a target.  Starting inside a disc does not trigger it.
    """

    points: Optional[tuple[FixedPoint, ...]] = None
    radius: Optional[float] = None


@dataclass(frozen=True)
class EnergyEvent:
    """Washboard energy ``z**2/2 - cos(phi) - beta*phi`` falling through ``level``.

    The energy never increases while ``gamma >= 0``, so once below the level
    of a saddle the orbit can no longer climb past that saddle.
    """

    level: float
    direction: int = -1


Event = Union[AxisEvent, LineEvent, CaptureEvent, EnergyEvent]


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                22 / 525, -1 / 40)

# PI controller exponents (Hairer & Wanner, order 5 pair)
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_SAFETY = 0.9


_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [_A21, 0, 0, 0, 0, 0],
    [_A31, _A32, 0, 0, 0, 0],
    [_A41, _A42, _A43, 0, 0, 0],
    [_A51, _A52, _A53, _A54, 0, 0],
    [_A61, _A62, _A63, _A64, _A65, 0],
])
_B = np.array([_B1, 0.0, _B3, _B4, _B5, _B6])
_E = np.array([_E1, 0.0, _E3, _E4, _E5, _E6, _E7])
_C = (0.0, _C2, _C3, _C4, _C5, 1.0)


def _dp_step(f, t, y, h, k1):
    k = np.empty((7, y.shape[0]))
    k[0] = k1
    for i in range(1, 6):
        k[i] = f(t + _C[i] * h, y + h * (_A[i, :i] @ k[:i]))
    y1 = y + h * (_B @ k[:6])
    k[6] = f(t + h, y1)
    return y1, k[6], h * (_E @ k)


class _EventFn:
    __slots__ = ("kind", "fn", "direction", "resolve")

    def __init__(self, kind: EventKind, fn: Callable, direction: int,
                 resolve: Optional[Callable] = None):
        self.kind = kind
        self.fn = fn
        self.direction = direction
        self.resolve = resolve

    def crossed(self, g0: float, g1: float) -> bool:
        if not (math.isfinite(g0) and math.isfinite(g1)):
            return False
        if self.direction < 0:
            return g0 > 0 >= g1
        if self.direction > 0:
            return g0 < 0 <= g1
        return (g0 > 0 >= g1) or (g0 < 0 <= g1)


@dataclass
class _Outcome:
    t: np.ndarray
    y: np.ndarray
    kind: EventKind
    event: Optional[_EventFn] = None


def _initial_step(f, t, y, k1, controls: IntegrationControls) -> float:
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(k1))):
        raise NumericalError(f"non-finite state {y!r} at t={t:.6g}")
    sc = controls.abs_tol + controls.rel_tol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / sc) ** 2)))
    d1 = float(np.sqrt(np.mean((k1 / sc) ** 2)))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    return min(h, controls.max_step)


def _solve(f, t0: float, y0, t_end: float, controls: IntegrationControls,
           events: Sequence[_EventFn], blowup_index: int) -> _Outcome:
    """Integrate ``y' = f(t, y)`` from ``t0`` towards ``t_end``.

    Returns every accepted step; the final row is the terminal state.
    """
    t = float(t0)
    y = np.array(y0, dtype=float)
    k1 = f(t, y)
    ts = [t]
    ys = [y]
    gvals = [ev.fn(t, y) for ev in events]
    h = _initial_step(f, t, y, k1, controls)
    h_floor = controls.max_step * 1e-12
    err_prev = 1e-4
    rel, atol = controls.rel_tol, controls.abs_tol

    while True:
        remaining = t_end - t
        if remaining <= 1e-14 * max(1.0, abs(t_end)):
            return _Outcome(np.array(ts), np.array(ys), EventKind.SPAN_EXHAUSTED)
        h = min(h, controls.max_step, remaining)
        y1, k7, errv = _dp_step(f, t, y, h, k1)
        sc = atol + rel * np.maximum(np.abs(y), np.abs(y1))
        r = errv / sc
        err = math.sqrt(float(r @ r) / r.shape[0])
        if not math.isfinite(err):
            err = 1e10
        if err > 1.0:
            h *= max(0.2, _SAFETY * err ** -0.2)
            if not h >= h_floor:
                raise StiffnessFailure(
                    f"step size {h:.3e} below floor {h_floor:.3e} at t={t:.6g}")
            continue

        t1 = t + h if h < remaining else t_end
        if abs(y1[blowup_index]) > controls.blowup:
            ts.append(t1)
            ys.append(y1)
            return _Outcome(np.array(ts), np.array(ys), EventKind.BLOW_UP)

        g1s = [ev.fn(t1, y1) for ev in events]
        best = None
        for ev, g0, g1 in zip(events, gvals, g1s):
            if not ev.crossed(g0, g1):
                continue
            s, ys_ = _locate(f, t, y, k1, h, ev, g0, g1, controls)
            if best is None or s < best[0]:
                best = (s, ys_, ev)
        if best is not None:
            s, y_ev, ev = best
            ts.append(t + s)
            ys.append(y_ev)
            return _Outcome(np.array(ts), np.array(ys), ev.kind, ev)

        t, y, k1, gvals = t1, y1, k7, g1s
        ts.append(t)
        ys.append(y)
        fac = _SAFETY * max(err, 1e-10) ** -_ALPHA * err_prev ** _BETA
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-4)


def _locate(f, t, y, k1, h, ev: _EventFn, g0: float, g1: float,
            controls: IntegrationControls):
    if g1 == 0.0:
        return h, _dp_step(f, t, y, h, k1)[0]

    def g(s):
        if s == 0.0:
            return g0
        val = ev.fn(t + s, _dp_step(f, t, y, s, k1)[0])
        return val if math.isfinite(val) else g0

    s = brentq(g, 0.0, h, xtol=1e-16 + 1e-15 * h, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    if abs(g(s)) > controls.event_tol:
        # plain bisection on the same bracket until the event equation is met
        lo, hi = 0.0, h
        for _ in range(200):
            s = 0.5 * (lo + hi)
            gm = g(s)
            if abs(gm) <= controls.event_tol or s in (lo, hi):
                break
            if (gm > 0) == (g0 > 0):
                lo = s
            else:
                hi = s
        if not abs(g(s)) <= max(controls.event_tol, 1e-8 * (abs(g0) + abs(g1))):
            # sign change through a pole, not a root: the step was not resolved
            raise NumericalError(
                f"{ev.kind.value} could not be located in step [{t:.6g}, {t + h:.6g}]")
    y_ev = _dp_step(f, t, y, s, k1)[0]
    if not np.all(np.isfinite(y_ev)):
        raise NumericalError(f"non-finite state while locating {ev.kind.value}")
    return s, y_ev


# ---------------------------------------------------------------- event specs

def _nearest_equilibrium(phi: float, z: float, params: ModelParams):
    """Distance to, and identity of, the closest equilibrium on the cover."""
    beta = params.beta
    if beta > 1:
        return math.inf, None
    p0 = math.asin(beta)
    if beta == 1.0:
        k = round((phi - 0.5 * math.pi) / TWO_PI)
        centre = 0.5 * math.pi + k * TWO_PI
        return math.hypot(phi - centre, z), (2 * k, centre, FixedPointKind.SADDLE_NODE)
    ks = round((phi - p0) / TWO_PI)
    sink = p0 + ks * TWO_PI
    ka = round((phi - (math.pi - p0)) / TWO_PI)
    saddle = math.pi - p0 + ka * TWO_PI
    d_sink = math.hypot(phi - sink, z)
    d_saddle = math.hypot(phi - saddle, z)
    if d_sink <= d_saddle:
        kind = FixedPointKind.SINK if params.gamma > 0 else FixedPointKind.CENTER
        return d_sink, (2 * ks, sink, kind)
    return d_saddle, (2 * ka + 1, saddle, FixedPointKind.SADDLE)


def _fixed_point_from(ident, params: ModelParams) -> FixedPoint:
    from .model import equilibria

    n, phi, kind = ident
    for fp in equilibria(params, (n, n)):
        return fp
    return FixedPoint(phi, kind, n)


def _compile_events(events: Sequence[Event], params: ModelParams,
                    controls: IntegrationControls, phi_index: int = 0,
                    z_index: int = 1) -> list[_EventFn]:
    compiled = []
    for ev in events:
        if isinstance(ev, AxisEvent):
            arm = ev.arm_phi

            def axis_fn(t, y, arm=arm):
                return y[z_index] if y[phi_index] > arm else math.nan

            compiled.append(_EventFn(EventKind.AXIS_CROSSING, axis_fn, ev.direction))
        elif isinstance(ev, LineEvent):
            line = ev.phi_line
            compiled.append(_EventFn(EventKind.VERTICAL_LINE_CROSSING,
                                     lambda t, y, line=line: y[phi_index] - line,
                                     ev.direction))
        elif isinstance(ev, CaptureEvent):
            radius = ev.radius if ev.radius is not None else controls.capture_radius
            if ev.points is None:
                def cap_fn(t, y, r=radius):
                    return _nearest_equilibrium(y[phi_index], y[z_index], params)[0] - r

                def resolve(y, r=radius):
                    ident = _nearest_equilibrium(y[phi_index], y[z_index], params)[1]
                    return _fixed_point_from(ident, params)
            else:
                pts = tuple(ev.points)
                if not pts:
                    continue

                def cap_fn(t, y, r=radius, pts=pts):
                    return min(math.hypot(y[phi_index] - p.phi, y[z_index])
                               for p in pts) - r

                def resolve(y, pts=pts):
                    return min(pts, key=lambda p: math.hypot(y[phi_index] - p.phi,
                                                             y[z_index]))
            compiled.append(_EventFn(EventKind.EQUILIBRIUM_CAPTURE, cap_fn, -1, resolve))
        elif isinstance(ev, EnergyEvent):
            beta, level = params.beta, ev.level

            def energy_fn(t, y, beta=beta, level=level):
                phi, z = y[phi_index], y[z_index]
                return 0.5 * z * z - math.cos(phi) - beta * phi - level

            compiled.append(_EventFn(EventKind.ENERGY_LEVEL, energy_fn, ev.direction))
        else:
            raise TypeError(f"unknown event specification {ev!r}")
    return compiled


# ---------------------------------------------------------------- right-hand sides

def _time_rhs(params: ModelParams, quadratures: bool = False):
    beta, gamma = params.beta, params.gamma
    sin = math.sin
    if quadratures:
        # y = (phi, z, elapsed time, integral of z dphi, log return-map slope)
        def f(t, y):
            z = y[1]
            q = beta - sin(y[0])
            return np.array((z, q - gamma * z, 1.0, z * z, -q / z))
    else:
        def f(t, y):
            z = y[1]
            return np.array((z, beta - sin(y[0]) - gamma * z))
    return f


def _graph_rhs(params: ModelParams, quadratures: bool = False):
    beta, gamma = params.beta, params.gamma
    sin = math.sin
    if quadratures:
        # y = (z, elapsed time, integral of z dphi, log return-map slope);
        # the last one integrates the variational equation d(dz)/dphi = -q/z**2 dz
        def f(phi, y):
            z = y[0]
            q = beta - sin(phi)
            return np.array((q / z - gamma, 1.0 / z, z, -q / (z * z)))
    else:
        def f(phi, y):
            z = y[0]
            return np.array(((beta - sin(phi)) / z - gamma,))
    return f


def _terminal_from(out: _Outcome, phi: float, z: float, t: float,
                   params: ModelParams) -> TerminalEvent:
    fp = None
    if out.kind is EventKind.EQUILIBRIUM_CAPTURE and out.event is not None:
        fp = out.event.resolve(np.array((phi, z)))
    return TerminalEvent(out.kind, float(t), PhaseState(float(phi), float(z)), fp)


# ---------------------------------------------------------------- public API

def integrate_time(start: PhaseState, params: ModelParams,
                   controls: IntegrationControls = IntegrationControls(),
                   events: Sequence[Event] = (),
                   span: Optional[float] = None) -> TrajectorySegment:
    """Integrate the time form from ``start`` for at most ``span`` time units.

    ``span`` defaults to ``controls.max_span``.  The segment ends at the first
    enabled event, at a blow-up, or when the span is used up.
    """
    span = controls.max_span if span is None else span
    f = _time_rhs(params)
    compiled = _compile_events(events, params, controls)
    out = _solve(f, 0.0, (start.phi, start.z), span, controls, compiled, blowup_index=1)
    term = _terminal_from(out, out.y[-1, 0], out.y[-1, 1], out.t[-1], params)
    return TrajectorySegment(out.t, out.y[:, 0].copy(), out.y[:, 1].copy(), term, "time")


def _graph_core(z0: float, phi_start: float, phi_end: float, params: ModelParams,
                controls: IntegrationControls, quadratures: bool):
    """Graph-form integration with time-form hand-off below ``z_floor``.

    Returns ``(phi, z, terminal, quads)`` where ``quads`` is ``(elapsed time,
    integral of z dphi, log of d z_end / d z0)``, all ``nan`` unless requested.
    """
    phis: list[np.ndarray] = []
    zs: list[np.ndarray] = []
    quads = np.zeros(3) if quadratures else np.full(3, np.nan)
    phi_h, z_h = phi_start, z0

    if z0 >= controls.z_floor:
        f = _graph_rhs(params, quadratures)
        y0 = (z0, 0.0, 0.0, 0.0) if quadratures else (z0,)
        floor = controls.z_floor
        ev = _EventFn(EventKind.AXIS_CROSSING, lambda t, y: y[0] - floor, -1)
        out = _solve(f, phi_start, y0, phi_end, controls, [ev], blowup_index=0)
        phis.append(out.t)
        zs.append(out.y[:, 0])
        if quadratures:
            quads = out.y[-1, 1:].copy()
        if out.kind is not EventKind.AXIS_CROSSING:
            term = TerminalEvent(out.kind, float(out.t[-1]),
                                 PhaseState(float(out.t[-1]), float(out.y[-1, 0])))
            return np.concatenate(phis), np.concatenate(zs), term, quads
        phi_h, z_h = float(out.t[-1]), float(out.y[-1, 0])

    # hand-off: finish in the time form
    f = _time_rhs(params, quadratures)
    y0 = (phi_h, z_h, *quads) if quadratures else (phi_h, z_h)
    compiled = _compile_events((AxisEvent(-1), LineEvent(phi_end), CaptureEvent()),
                               params, controls)
    out = _solve(f, 0.0, y0, controls.max_span, controls, compiled, blowup_index=1)
    phis.append(out.y[1:, 0])
    zs.append(out.y[1:, 1])
    if quadratures:
        quads = out.y[-1, 2:].copy()
    kind = out.kind
    if kind is EventKind.VERTICAL_LINE_CROSSING:
        # reaching the end of the phi-span is not an event of the graph form
        kind = EventKind.SPAN_EXHAUSTED
        out.y[-1, 0] = phi_end
        phis[-1][-1] = phi_end
    out.kind = kind
    term = _terminal_from(out, out.y[-1, 0], out.y[-1, 1], out.y[-1, 0], params)
    return np.concatenate(phis), np.concatenate(zs), term, quads


def integrate_graph(z0: float, phi_span: tuple[float, float], params: ModelParams,
                    controls: IntegrationControls = IntegrationControls()
                    ) -> TrajectorySegment:
    """Integrate ``z(phi)`` across ``phi_span``.

    The terminal event is ``SPAN_EXHAUSTED`` when the far end is reached
    (final ``z`` in ``terminal.state``), ``AXIS_CROSSING`` when the orbit
    falls through ``z = 0`` and ``EQUILIBRIUM_CAPTURE`` when it sinks into an
    equilibrium without crossing the axis.
    """
    if not z0 > 0:
        raise DomainError(f"graph form needs z0 > 0, got {z0!r}")
    lo, hi = map(float, phi_span)
    if not hi > lo:
        raise DomainError(f"phi span must be increasing, got {phi_span!r}")
    phi, z, term, _ = _graph_core(float(z0), lo, hi, params, controls, False)
    return TrajectorySegment(phi, phi, z, term, "phi")
