import math

import numpy as np
import pytest

import oracles
from pendulum_phase import (FixedPointKind, ModelParams, PhaseState, critical_curve,
                            hysteresis_scan, phase_portrait, slope_field, velocity_curve)
from pendulum_phase.model import classify_region, Region


def test_critical_curve_plateau_rows():
    rows = critical_curve([1.5, 2.0, 5.0], tol=1e-4)
    assert [r.beta0 for r in rows] == [1.0, 1.0, 1.0]
    assert all(r.status == "plateau" for r in rows)


def test_critical_curve_urabe_value():
    (row,) = critical_curve([1.193], tol=1e-4)
    assert row.beta0 == pytest.approx(1.0, abs=5e-3)


def test_critical_curve_small_gamma():
    rows = critical_curve([0.01, 0.02, 0.04])
    for r in rows:
        assert r.beta0 / r.gamma == pytest.approx(4 / math.pi, rel=0.02)


def test_critical_curve_keeps_grid_order_and_workers():
    grid = [0.9, 0.3, 0.6]
    serial = critical_curve(grid, tol=1e-4)
    parallel = critical_curve(grid, tol=1e-4, workers=3)
    assert [r.gamma for r in serial] == grid
    assert [r.as_dict() for r in serial] == [r.as_dict() for r in parallel]


def test_critical_curve_records_errors():
    (row,) = critical_curve([0.0])
    assert row.status == "error" and "DomainError" in row.error


def test_velocity_pinned_below_plateau():
    (row,) = velocity_curve(2.0, [0.5])
    assert row.status == "pinned" and row.mean_velocity == 0.0 and not row.cycle_found


def test_velocity_increasing_towards_ohmic_line():
    rows = velocity_curve(2.0, [1.1, 2.0, 4.0, 8.0])
    v = [r.mean_velocity for r in rows]
    assert all(a < b for a, b in zip(v, v[1:]))
    # large drive: the pendulum runs at nearly the Ohmic velocity beta/gamma
    assert v[-1] == pytest.approx(8.0 / 2.0, rel=0.01)
    # each velocity agrees with a direct time-domain period measurement
    for r in rows[:2]:
        period = oracles.lap(0.5, r.beta, 2.0, 0.0)  # transient lap first
        z = period[1]
        for _ in range(30):
            period, z = oracles.lap(z, r.beta, 2.0, 0.0)
        assert r.mean_velocity == pytest.approx(2 * math.pi / period, rel=1e-7)


def test_velocity_around_critical_drive():
    beta0 = oracles.critical_beta(0.5, 1e-7)
    below, above = velocity_curve(0.5, [beta0 - 5e-4, beta0 + 5e-4])
    assert below.mean_velocity == 0.0
    assert above.cycle_found and 0 < above.mean_velocity < 1.0


def test_velocity_degenerate_row():
    (row,) = velocity_curve(2.0, [1.0])
    assert row.status == "degenerate"


def test_hysteresis_window():
    grid = [0.5, 0.9, 1.1]
    up = hysteresis_scan(0.2, grid, "up")
    down = hysteresis_scan(0.2, grid, "down")
    assert [r.beta for r in up] == [r.beta for r in down] == grid
    assert up[0].mean_velocity == 0.0 and up[1].mean_velocity == 0.0
    assert down[0].mean_velocity > 0 and down[1].mean_velocity > 0
    with pytest.raises(ValueError):
        hysteresis_scan(0.2, grid, "sideways")


class TestPortrait:
    def test_conservative_arc(self):
        p = phase_portrait(ModelParams(0.0, 0.0), [PhaseState(0.0, 2.0)])
        seg = p.trajectories[0]
        np.testing.assert_allclose(seg.z, np.sqrt(2 * (1 + np.cos(seg.phi))), atol=1e-6)
        assert p.g_curve is None

    def test_overlays_and_slopes(self):
        params = ModelParams(0.5, 1.0)
        seeds = [PhaseState(-2.0, 0.05), PhaseState(-2.0, 2.5)]
        p = phase_portrait(params, seeds)
        assert p.g_curve is not None and len(p.equilibria) == 3 and p.shot is not None
        lo, hi = p.interval
        for seg in p.trajectories:
            assert np.all(seg.phi >= lo - 1e-9) and np.all(seg.phi <= hi + 1e-9)
            for phi, z in zip(seg.phi[1:-1], seg.z[1:-1]):
                s = PhaseState(phi, z)
                region = classify_region(s, params)
                if region in (Region.LAMBDA1, Region.LAMBDA2):
                    assert slope_field(s, params) > 0
                elif region in (Region.LAMBDA3, Region.LAMBDA4):
                    assert slope_field(s, params) < 0

    def test_saddle_node_shot_arrives_flat(self):
        p = phase_portrait(ModelParams(1.0, 2.0), [])
        assert p.equilibria[0].kind is FixedPointKind.SADDLE_NODE
        assert p.shot is not None
        assert p.shot.final_state.phi == pytest.approx(p.interval[1], abs=2e-2)
        assert abs(p.shot_slope) < 0.05

    def test_no_equilibria_above_one(self):
        p = phase_portrait(ModelParams(1.2, 1.0), [PhaseState(0.0, 1.0)])
        assert p.equilibria == [] and p.shot is None
