import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

import oracles
from pendulum_phase import (Degenerate, DomainError, EventKind, IntegrationControls,
                            ModelParams, NoCycle, find_limit_cycle, poincare_map, section_phi,
                            verify_no_first_kind_cycle)


class TestPoincareMap:
    def test_conservative_identity(self):
        assert poincare_map(2.0, ModelParams(0.0, 0.0)) == pytest.approx(2.0, rel=1e-10)

    def test_conservative_drive(self):
        z1 = poincare_map(1.0, ModelParams(0.5, 0.0))
        assert z1 == pytest.approx(math.sqrt(1 + 4 * math.pi * 0.5), rel=1e-9)

    def test_heavy_damping_hugs_g(self):
        assert poincare_map(0.2, ModelParams(2.0, 10.0)) == pytest.approx(0.2, abs=1e-2)

    @pytest.mark.parametrize("beta,gamma,z0", [(1.5, 1.0, 0.7), (0.8, 0.3, 2.0),
                                               (3.0, 0.5, 4.0)])
    def test_against_time_oracle(self, beta, gamma, z0):
        params = ModelParams(beta, gamma)
        ref = oracles.lap(z0, beta, gamma, section_phi(params))
        assert poincare_map(z0, params) == pytest.approx(ref[1], rel=1e-8)

    def test_falling_orbit(self):
        assert poincare_map(0.01, ModelParams(0.1, 1.0)) is None

    def test_monotone(self):
        params = ModelParams(1.2, 0.8)
        zs = np.linspace(0.1, 2.5, 12)
        ps = [poincare_map(z, params) for z in zs]
        assert all(a < b for a, b in zip(ps, ps[1:]))

    def test_line_l_maps_below_itself(self):
        for beta, gamma in ((1.2, 0.8), (0.5, 0.2), (3.0, 2.0)):
            top = (beta + 1) / gamma
            assert poincare_map(top, ModelParams(beta, gamma)) < top

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            poincare_map(0.0, ModelParams(1.2, 1.0))


class TestLimitCycle:
    def test_integral_identity_heavy_damping(self):
        orbit = find_limit_cycle(ModelParams(2.0, 10.0))
        assert orbit.phase_integral == pytest.approx(0.4 * math.pi, abs=1e-6)
        # samples reproduce the same mean height independently of the quadrature
        mean = trapezoid(np.append(orbit.samples, orbit.samples[0]),
                         np.append(orbit.phi, orbit.phi[0] + 2 * math.pi)) / (2 * math.pi)
        assert mean == pytest.approx(0.2, rel=1e-4)

    def test_above_plateau(self):
        # gamma*T ~ 40 here: the slope (~1e-18) is below finite-difference noise, so
        # compare its logarithm from the variational equation
        orbit = find_limit_cycle(ModelParams(1.05, 1.5))
        assert orbit.log_contraction == pytest.approx(-1.5 * orbit.period_T, rel=1e-7)
        assert abs(orbit.contraction) < 1e-10
        assert orbit.integral_residual < 1e-8

    @pytest.mark.parametrize("beta,gamma", [(0.3, 0.1), (0.8, 0.5), (3.0, 0.3)])
    def test_contraction_moderate(self, beta, gamma):
        orbit = find_limit_cycle(ModelParams(beta, gamma), gate=False)
        assert orbit.contraction == pytest.approx(orbit.expected_contraction, rel=1e-4)
        assert orbit.log_contraction == pytest.approx(-gamma * orbit.period_T, rel=1e-7)

    def test_period_against_time_oracle(self):
        params = ModelParams(0.8, 0.5)
        orbit = find_limit_cycle(params, gate=False)
        period, z_end = oracles.lap(orbit.z_start, 0.8, 0.5, orbit.section)
        assert orbit.period_T == pytest.approx(period, rel=1e-8)
        assert z_end == pytest.approx(orbit.z_start, abs=1e-8)
        assert orbit.mean_velocity == pytest.approx(2 * math.pi / period, rel=1e-8)

    def test_below_critical_raises_with_evidence(self):
        with pytest.raises(NoCycle) as info:
            find_limit_cycle(ModelParams(0.1, 0.2))
        seg = info.value.evidence
        assert seg.terminal.kind is not EventKind.SPAN_EXHAUSTED

    def test_below_critical_without_gate(self):
        with pytest.raises(NoCycle):
            find_limit_cycle(ModelParams(0.1, 0.2), gate=False)

    def test_degenerate(self):
        with pytest.raises(Degenerate):
            find_limit_cycle(ModelParams(1.0, 2.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            find_limit_cycle(ModelParams(1.5, 0.0))
        with pytest.raises(DomainError):
            find_limit_cycle(ModelParams(1.5, 1.0), solver="newton")

    @pytest.mark.parametrize("beta,gamma", [(1.5, 1.0), (0.7, 0.3), (4.0, 2.0)])
    def test_solvers_agree(self, beta, gamma):
        params = ModelParams(beta, gamma)
        a = find_limit_cycle(params, gate=False, solver="iterate")
        b = find_limit_cycle(params, gate=False, solver="brent")
        assert a.z_start == pytest.approx(b.z_start, abs=1e-8)

    def test_samples_are_periodic(self):
        orbit = find_limit_cycle(ModelParams(1.5, 1.0), n_samples=64)
        assert len(orbit.phi) == 64 and np.all(orbit.samples > 0)
        assert orbit.samples[0] == pytest.approx(orbit.z_start, rel=1e-12)


class TestFirstKind:
    def test_sink_basin(self):
        rep = verify_no_first_kind_cycle(ModelParams(0.5, 1.0))
        assert rep.passed and not rep.vacuous and rep.divergence == -1.0

    def test_light_damping(self):
        rep = verify_no_first_kind_cycle(ModelParams(0.0, 0.1))
        assert rep.passed and rep.divergence == pytest.approx(-0.1)
        assert all(o["captured"] for o in rep.orbits)

    def test_vacuous_without_sinks(self):
        rep = verify_no_first_kind_cycle(ModelParams(1.2, 1.0))
        assert rep.vacuous and rep.passed

    def test_domain(self):
        with pytest.raises(DomainError):
            verify_no_first_kind_cycle(ModelParams(0.5, 0.0))
