"""Named invariant checks run by ``pendulum-phase verify``.

Every check takes the integration controls to use and returns a
:class:`CheckResult`.  Inflating the tolerances in the controls is the
intended way to see the battery fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

import numpy as np

from .connection import ShootKind, critical_beta, shoot_unstable_manifold
from .cycle import find_limit_cycle, poincare_map, verify_no_first_kind_cycle
from .errors import PendulumError
from .integrate import IntegrationControls, integrate_time
from .model import (FixedPointKind, ModelParams, PhaseState, Region, classify_region,
                    equilibria, rhs, rotation_rate_beta, rotation_rate_gamma,
                    separatrix_slopes, slope_field)

__all__ = ["CheckResult", "CHECKS", "run_checks"]

_SEED = 20240917


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _model(controls: IntegrationControls) -> CheckResult:
    rng = np.random.default_rng(_SEED)
    worst_vieta = worst_sin = 0.0
    alternating = periodic = True
    for beta, gamma in zip(rng.uniform(0, 0.999, 200), rng.uniform(0, 5, 200)):
        params = ModelParams(beta, gamma)
        lam1, lam2 = separatrix_slopes(params)
        c0 = math.cos(math.asin(beta))
        worst_vieta = max(worst_vieta, abs(lam1 * lam2 + c0), abs(lam1 + lam2 + gamma))
        fps = equilibria(params, (-3, 3))
        worst_sin = max(worst_sin, max(abs(math.sin(fp.phi) - beta) for fp in fps))
        kinds = [fp.kind is FixedPointKind.SADDLE for fp in fps]
        alternating &= all(a != b for a, b in zip(kinds, kinds[1:]))
        phi, z = rng.uniform(-10, 10), rng.uniform(-5, 5)
        a = rhs(PhaseState(phi, z), params)
        b = rhs(PhaseState(phi + 2 * math.pi, z), params)
        periodic &= math.isclose(a.dphi, b.dphi) and abs(a.dz - b.dz) <= 1e-12
    ok = worst_vieta <= 1e-12 and worst_sin <= 1e-12 and alternating and periodic
    return CheckResult("model", ok, f"vieta={worst_vieta:.2e} sin={worst_sin:.2e} "
                                    f"alternating={alternating} periodic={periodic}")


def _regions(controls: IntegrationControls) -> CheckResult:
    rng = np.random.default_rng(_SEED + 1)
    bad = 0
    for _ in range(10_000):
        params = ModelParams(rng.uniform(0, 2), rng.uniform(0.05, 5))
        state = PhaseState(rng.uniform(-2 * math.pi, 2 * math.pi), rng.uniform(-3, 3))
        label = classify_region(state, params)
        slope = slope_field(state, params)
        if label in (Region.LAMBDA1, Region.LAMBDA2) and not slope > 0:
            bad += 1
        elif label in (Region.LAMBDA3, Region.LAMBDA4) and not slope < 0:
            bad += 1
    return CheckResult("regions", bad == 0, f"{bad} sign mismatches in 10000 points")


def _rotation(controls: IntegrationControls) -> CheckResult:
    rng = np.random.default_rng(_SEED + 2)
    bad = 0
    for _ in range(10_000):
        params = ModelParams(rng.uniform(0, 2), rng.uniform(0, 5))
        state = PhaseState(rng.uniform(-2 * math.pi, 2 * math.pi), rng.uniform(-3, 3))
        try:
            rg = rotation_rate_gamma(state, params)
            rb = rotation_rate_beta(state, params)
        except PendulumError:
            continue
        bad += (rg > 0) + (rb * state.z < 0)
    return CheckResult("rotation", bad == 0, f"{bad} sign violations in 10000 points")


def _conservative(controls: IntegrationControls) -> CheckResult:
    seg = integrate_time(PhaseState(0.0, 2.0), ModelParams(0.0, 0.0), controls, span=100.0)
    e = 0.5 * seg.z ** 2 - np.cos(seg.phi)
    drift = float(np.max(np.abs(e - e[0])))
    worst = 0.0
    for beta, z0 in ((0.0, 2.0), (0.5, 1.0), (0.3, 0.7)):
        params = ModelParams(beta, 0.0)
        z1 = poincare_map(z0, params, controls)
        target = math.sqrt(z0 * z0 + 4 * math.pi * beta)
        worst = max(worst, math.inf if z1 is None else abs(z1 - target) / target)
    ok = drift < 1e-8 and worst <= 1e-9
    return CheckResult("conservative", ok, f"energy drift={drift:.2e} return rel err={worst:.2e}")


def _shot_bounds(controls: IntegrationControls) -> CheckResult:
    bad = []
    for beta in np.linspace(0.0, 0.95, 5):
        for gamma in np.linspace(0.1, 2.0, 5):
            params = ModelParams(beta, gamma)
            try:
                shot = shoot_unstable_manifold(params, controls=controls)
            except PendulumError as exc:
                bad.append(f"({beta:.2f},{gamma:.2f}) {type(exc).__name__}")
                continue
            p0 = math.asin(beta)
            slack = 10 * controls.event_tol
            if shot.kind is ShootKind.HIT_AXIS and shot.phi_c is not None and not (
                    p0 - slack <= shot.phi_c <= math.pi - p0 + slack):
                bad.append(f"({beta:.2f},{gamma:.2f}) phi_c={shot.phi_c:.4f}")
            if shot.kind is ShootKind.HIT_LINE_K1 and not (
                    0 < shot.z_c < (beta + 1) / gamma):
                bad.append(f"({beta:.2f},{gamma:.2f}) z_c={shot.z_c:.4f}")
    return CheckResult("lemma1", not bad, "; ".join(bad) or "25 shots inside their bounds")


_CYCLE_CASES = ((0.3, 0.1), (0.8, 0.5), (1.05, 1.5), (2.0, 1.0), (3.0, 0.3))


def _integral_identity(controls: IntegrationControls) -> CheckResult:
    worst = 0.0
    for beta, gamma in _CYCLE_CASES:
        try:
            orbit = find_limit_cycle(ModelParams(beta, gamma), controls=controls, gate=False)
        except PendulumError:
            worst = math.inf
            continue
        worst = max(worst, orbit.integral_residual)
    return CheckResult("lemma2", worst <= 1e-6, f"max relative residual={worst:.2e}")


def _zero_drive(controls: IntegrationControls) -> CheckResult:
    out = []
    ok = True
    for gamma in (0.1, 0.5, 1.0, 2.0):
        try:
            shot = shoot_unstable_manifold(ModelParams(0.0, gamma), controls=controls)
        except PendulumError as exc:
            ok = False
            out.append(f"gamma={gamma}: {type(exc).__name__}")
            continue
        good = shot.kind is ShootKind.HIT_AXIS and 0 <= shot.phi_c < math.pi
        ok &= good
        out.append(f"gamma={gamma}: {shot.kind.value} phi_c={shot.phi_c}")
    return CheckResult("lemma3", ok, "; ".join(out))


def _contraction(controls: IntegrationControls) -> CheckResult:
    worst = 0.0
    for beta, gamma in ((0.3, 0.1), (0.8, 0.5), (3.0, 0.3)):
        try:
            orbit = find_limit_cycle(ModelParams(beta, gamma), controls=controls, gate=False)
        except PendulumError:
            worst = math.inf
            continue
        worst = max(worst, abs(orbit.contraction / orbit.expected_contraction - 1))
    return CheckResult("contraction", worst <= 1e-4, f"max relative gap={worst:.2e}")


def _plateau(controls: IntegrationControls) -> CheckResult:
    vals = {}
    for gamma in (1.25, 2.0):
        try:
            vals[gamma] = critical_beta(gamma, 1e-4, controls).beta0
        except PendulumError:
            vals[gamma] = math.nan
    ok = all(abs(v - 1) <= 1e-3 for v in vals.values())
    return CheckResult("plateau", ok, " ".join(f"beta0({g})={v:.6f}" for g, v in vals.items()))


def _melnikov(controls: IntegrationControls) -> CheckResult:
    gamma = 0.01
    try:
        ratio = critical_beta(gamma, 1e-6, controls).beta0 / gamma
    except PendulumError:
        ratio = math.nan
    ok = abs(ratio / (4 / math.pi) - 1) <= 0.02
    return CheckResult("melnikov", ok, f"beta0/gamma={ratio:.6f} vs 4/pi={4 / math.pi:.6f}")


def _first_kind(controls: IntegrationControls) -> CheckResult:
    res = [verify_no_first_kind_cycle(ModelParams(b, g), controls)
           for b, g in ((0.5, 1.0), (0.0, 0.1), (1.2, 1.0))]
    ok = all(r.passed for r in res)
    return CheckResult("first_kind", ok, " ".join(
        f"({r.params.beta},{r.params.gamma}):{'vacuous' if r.vacuous else r.passed}"
        for r in res))


CHECKS: dict[str, Callable[[IntegrationControls], CheckResult]] = {
    "model": _model,
    "regions": _regions,
    "rotation": _rotation,
    "conservative": _conservative,
    "lemma1": _shot_bounds,
    "lemma2": _integral_identity,
    "lemma3": _zero_drive,
    "contraction": _contraction,
    "plateau": _plateau,
    "melnikov": _melnikov,
    "first_kind": _first_kind,
}


def run_checks(controls: IntegrationControls = IntegrationControls(),
               only: Optional[Iterable[str]] = None) -> list[CheckResult]:
    names = list(CHECKS) if only is None else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    results = []
    for name in names:
        try:
            results.append(CHECKS[name](controls))
        except PendulumError as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
