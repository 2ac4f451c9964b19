"""Grid drivers: critical curve, mean-velocity (depinning) curve, portraits.

Rows are computed independently and reduced in input order, so the result
does not depend on the number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Optional, Sequence, Union

import numpy as np

from .connection import (CriticalResult, ShootOutcome, critical_beta,
                         shoot_unstable_manifold)
from .cycle import find_limit_cycle
from .errors import Degenerate, NoCycle, PendulumError
from .integrate import (AxisEvent, CaptureEvent, EventKind, IntegrationControls,
                        LineEvent, TrajectorySegment, integrate_time)
from .model import (FixedPoint, ModelParams, PhaseState, TWO_PI, curve_g, equilibria,
                    main_interval, slope_field)

__all__ = [
    "SweepRow",
    "Portrait",
    "critical_curve",
    "velocity_curve",
    "hysteresis_scan",
    "phase_portrait",
]


@dataclass
class SweepRow:
    gamma: float
    beta: Optional[float] = None
    beta0: Optional[float] = None
    mean_velocity: float = 0.0
    cycle_found: bool = False
    status: str = "ok"
    bracket_width: Optional[float] = None
    evaluations: int = 0
    error: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "beta": self.beta,
            "beta0": self.beta0,
            "mean_velocity": self.mean_velocity,
            "cycle_found": self.cycle_found,
            "status": self.status,
            "bracket_width": self.bracket_width,
            "evaluations": self.evaluations,
            "error": self.error,
        }


def _run_rows(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _critical_row(gamma: float, tol: float, controls: IntegrationControls) -> SweepRow:
    try:
        res = critical_beta(gamma, tol, controls)
    except PendulumError as exc:
        return SweepRow(gamma, status="error", error=f"{type(exc).__name__}: {exc}")
    return SweepRow(gamma, beta0=res.beta0, status="plateau" if res.plateau else "ok",
                    bracket_width=res.bracket_width, evaluations=res.evaluations)


def critical_curve(gamma_grid: Sequence[float], tol: float = 1e-6,
                   controls: IntegrationControls = IntegrationControls(),
                   workers: int = 1) -> list[SweepRow]:
    """``beta0(gamma)`` for every grid value, in grid order."""
    grid = [float(g) for g in gamma_grid]
    return _run_rows(partial(_critical_row, tol=tol, controls=controls), grid, workers)


def _velocity_row(beta: float, gamma: float, crit: Optional[CriticalResult], tol: float,
                  cycle_tol: float, controls: IntegrationControls) -> SweepRow:
    beta0 = crit.beta0 if crit is not None else None
    row = SweepRow(gamma, beta, beta0)
    if crit is not None and beta <= 1:
        row.bracket_width = crit.bracket_width
        row.evaluations = crit.evaluations
        if abs(beta - beta0) < tol:
            row.status = "degenerate"
            return row
        if beta < beta0:
            row.status = "pinned"
            return row
    try:
        orbit = find_limit_cycle(ModelParams(beta, gamma), cycle_tol, controls, gate=False)
    except NoCycle:
        row.status = "pinned"
        return row
    except PendulumError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    row.mean_velocity = orbit.mean_velocity
    row.cycle_found = True
    row.evaluations += orbit.map_evaluations
    return row


def velocity_curve(gamma: float, beta_grid: Sequence[float], tol: float = 1e-6,
                   controls: IntegrationControls = IntegrationControls(),
                   workers: int = 1, cycle_tol: float = 1e-9) -> list[SweepRow]:
    """Mean velocity ``2*pi/T`` of the running state along a drive grid.

    Pinned drives (below the critical value) report velocity 0.  Drives within
    ``tol`` of the critical value are marked ``degenerate`` and also report 0.
    """
    grid = [float(b) for b in beta_grid]
    crit = None
    if gamma > 0 and any(b <= 1 for b in grid):
        crit = critical_beta(gamma, tol, controls)
    fn = partial(_velocity_row, gamma=float(gamma), crit=crit, tol=tol,
                 cycle_tol=cycle_tol, controls=controls)
    return _run_rows(fn, grid, workers)


def hysteresis_scan(gamma: float, beta_grid: Sequence[float], direction: str = "up",
                    controls: IntegrationControls = IntegrationControls(rel_tol=1e-8,
                                                                         abs_tol=1e-10),
                    settle: float = 400.0, window: float = 200.0) -> list[SweepRow]:
    """Adiabatic drive scan carrying the state from one drive to the next.

    Exploratory: where a sink and the running cycle coexist (small damping,
    ``beta0 < beta < 1``) the up- and down-scans can disagree.  The mean
    velocity is the phi advance over ``window`` after ``settle`` time units.
    """
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    grid = sorted(float(b) for b in beta_grid)
    if direction == "down":
        grid.reverse()
    first = ModelParams(grid[0], gamma)
    if direction == "up" and grid[0] <= 1:
        state = PhaseState(math.asin(grid[0]), 0.0)
    else:
        state = PhaseState(0.0, (first.beta + 1.0) / gamma)
    rows = []
    for beta in grid:
        params = ModelParams(beta, gamma)
        seg = integrate_time(state, params, controls, span=settle)
        start = seg.final_state
        seg = integrate_time(start, params, controls, span=window)
        velocity = (seg.phi[-1] - start.phi) / window
        if abs(velocity) < 1e-6:
            velocity = 0.0
        rows.append(SweepRow(gamma, beta, mean_velocity=velocity,
                             cycle_found=velocity > 0, status=f"scan-{direction}"))
        lo, _ = main_interval(params)
        state = PhaseState(lo + (seg.phi[-1] - lo) % TWO_PI, float(seg.z[-1]))
    if direction == "down":
        rows.reverse()
    return rows


@dataclass
class Portrait:
    params: ModelParams
    interval: tuple[float, float]
    trajectories: list[Union[TrajectorySegment, str]]
    equilibria: list[FixedPoint] = field(default_factory=list)
    g_curve: Optional[tuple[np.ndarray, np.ndarray]] = None
    shot: Optional[Union[ShootOutcome, TrajectorySegment]] = None
    shot_slope: Optional[float] = None


def _saddle_node_shot(params: ModelParams, controls: IntegrationControls,
                      offset: float = 1e-2) -> tuple[TrajectorySegment, float]:
    """At ``beta == 1`` follow the centre branch from one saddle-node to the next."""
    lo, hi = main_interval(params)
    start = PhaseState(lo + offset, offset * offset / (2.0 * params.gamma))
    target = FixedPoint(hi, equilibria(params, (1, 1))[0].kind, 1)
    seg = integrate_time(start, params, controls,
                         (CaptureEvent(points=(target,), radius=offset), LineEvent(hi)))
    return seg, slope_field(seg.final_state, params)


def phase_portrait(params: ModelParams, seeds: Sequence[PhaseState],
                   controls: IntegrationControls = IntegrationControls(rel_tol=1e-9,
                                                                        abs_tol=1e-11),
                   span: float = 60.0, with_shot: bool = True) -> Portrait:
    """Trajectory bundle in the main interval with the standard overlays.

    Each seed is run forward until it leaves the main interval, settles into
    an equilibrium, or ``span`` is used up.  Seeds that fail are kept as error
    strings so the remaining bundle survives.
    """
    lo, hi = main_interval(params)
    trajectories: list[Union[TrajectorySegment, str]] = []
    events = (LineEvent(hi, +1), LineEvent(lo, -1), CaptureEvent(radius=1e-4))
    for seed in seeds:
        try:
            trajectories.append(integrate_time(seed, params, controls, events, span=span))
        except PendulumError as exc:
            trajectories.append(f"{type(exc).__name__}: {exc}")

    fps = [fp for fp in equilibria(params, (-2, 2)) if lo - 1e-12 <= fp.phi <= hi + 1e-12]
    g_curve = None
    if params.gamma > 0:
        phi = np.linspace(lo, hi, 241)
        g_curve = (phi, curve_g(phi, params))

    shot = None
    shot_slope = None
    if with_shot and params.beta < 1:
        try:
            shot = shoot_unstable_manifold(params, controls=controls)
        except PendulumError:
            shot = None
    elif with_shot and params.beta == 1 and params.gamma > 0:
        shot, shot_slope = _saddle_node_shot(params, controls)
    return Portrait(params, (lo, hi), trajectories, fps, g_curve, shot, shot_slope)
