import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from oracles import jacobian_eigs
from pendulum_phase import (DomainError, FixedPointKind, ModelParams, PhaseState, Region,
                            classify_region, curve_g, divergence, energy, equilibria,
                            main_interval, rhs, rotation_rate_beta, rotation_rate_gamma,
                            separatrix_slopes, slope_field, wrap_to_main_interval)

betas = st.floats(0.0, 0.999, allow_nan=False)
gammas = st.floats(0.0, 5.0, allow_nan=False)
pos_gammas = st.floats(0.05, 5.0, allow_nan=False)
angles = st.floats(-10.0, 10.0, allow_nan=False)
heights = st.floats(-5.0, 5.0, allow_nan=False)


class TestParams:
    @pytest.mark.parametrize("beta,gamma", [(-0.1, 1), (0.5, -1), (math.nan, 1),
                                            (0.5, math.inf)])
    def test_rejects_bad_values(self, beta, gamma):
        with pytest.raises(DomainError):
            ModelParams(beta, gamma)

    def test_state_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            PhaseState(math.nan, 0.0)

    def test_cylinder_equivalence(self):
        assert PhaseState(0.3, 1.0).cylinder_equivalent(PhaseState(0.3 + 4 * math.pi, 1.0))
        assert not PhaseState(0.3, 1.0).cylinder_equivalent(PhaseState(0.3 + math.pi, 1.0))


class TestRhs:
    @pytest.mark.parametrize("phi,z,beta,gamma,expected", [
        (math.pi / 2, 0.0, 1.0, 1.0, (0.0, 0.0)),
        (0.0, 0.0, 0.5, 2.0, (0.0, 0.5)),
        (math.pi / 6, 1.0, 0.5, 1.0, (1.0, -1.0)),
    ])
    def test_values(self, phi, z, beta, gamma, expected):
        v = rhs(PhaseState(phi, z), ModelParams(beta, gamma))
        assert v.dphi == pytest.approx(expected[0], abs=1e-15)
        assert v.dz == pytest.approx(expected[1], abs=1e-15)

    @given(betas, gammas, angles, heights)
    def test_periodic_in_phi(self, beta, gamma, phi, z):
        p = ModelParams(beta, gamma)
        a = rhs(PhaseState(phi, z), p)
        b = rhs(PhaseState(phi + 2 * math.pi, z), p)
        assert a.dphi == b.dphi
        assert b.dz == pytest.approx(a.dz, abs=1e-12)


class TestSlopeField:
    def test_zero_on_g(self):
        p = ModelParams(0.5, 1.0)
        for phi in np.linspace(-3, 3, 13):
            z = float(curve_g(phi, p))
            if abs(z) > 1e-6:
                assert slope_field(PhaseState(phi, z), p) == pytest.approx(0.0, abs=1e-12)

    def test_vertical_on_axis(self):
        assert slope_field(PhaseState(0.0, 0.0), ModelParams(0.5, 1.0)) == math.inf

    def test_undefined_at_equilibrium(self):
        assert math.isnan(slope_field(PhaseState(math.pi / 6, 0.0), ModelParams(0.5, 1.0)))

    def test_conservative_top(self):
        assert slope_field(PhaseState(0.0, 1.0), ModelParams(0.0, 0.0)) == 0.0

    @given(betas, pos_gammas, angles, heights)
    def test_sign_matches_region(self, beta, gamma, phi, z):
        p = ModelParams(beta, gamma)
        s = PhaseState(phi, z)
        region = classify_region(s, p)
        slope = slope_field(s, p)
        if region in (Region.LAMBDA1, Region.LAMBDA2):
            assert slope > 0
        elif region in (Region.LAMBDA3, Region.LAMBDA4):
            assert slope < 0


class TestEquilibria:
    def test_none_above_one(self):
        assert equilibria(ModelParams(1.2, 1.0), (-2, 2)) == []

    def test_zero_drive(self):
        fps = equilibria(ModelParams(0.0, 1.0), (-1, 1))
        assert [fp.kind for fp in fps] == [FixedPointKind.SADDLE, FixedPointKind.SINK,
                                           FixedPointKind.SADDLE]
        assert [fp.phi for fp in fps] == pytest.approx([-math.pi, 0.0, math.pi])

    def test_saddle_node_at_one(self):
        fps = equilibria(ModelParams(1.0, 1.0), (0, 1))
        assert len(fps) == 1
        assert fps[0].kind is FixedPointKind.SADDLE_NODE
        assert fps[0].phi == pytest.approx(math.pi / 2, abs=1e-15)

    def test_sink_at_pi_over_six(self):
        (fp,) = equilibria(ModelParams(0.5, 1.0), (0, 0))
        assert fp.kind is FixedPointKind.SINK
        assert fp.phi == pytest.approx(math.pi / 6, rel=1e-15)

    def test_center_without_damping(self):
        (fp,) = equilibria(ModelParams(0.3, 0.0), (0, 0))
        assert fp.kind is FixedPointKind.CENTER

    def test_node_versus_focus(self):
        (focus,) = equilibria(ModelParams(0.0, 1.0), (0, 0))
        (node,) = equilibria(ModelParams(0.0, 3.0), (0, 0))
        assert not focus.is_node and node.is_node

    def test_empty_range_rejected(self):
        with pytest.raises(DomainError):
            equilibria(ModelParams(0.5, 1.0), (2, 1))

    @given(betas, gammas)
    def test_roots_against_brentq(self, beta, gamma):
        fps = equilibria(ModelParams(beta, gamma), (-2, 2))
        assert [fp.phi for fp in fps] == sorted(fp.phi for fp in fps)
        for fp in fps:
            lo, hi = (fp.phi - 0.2, fp.phi + 0.2)
            g = lambda x: math.sin(x) - beta
            if g(lo) * g(hi) < 0:
                assert fp.phi == pytest.approx(brentq(g, lo, hi, xtol=1e-15), abs=1e-12)
        kinds = [fp.kind is FixedPointKind.SADDLE for fp in fps]
        assert all(a != b for a, b in zip(kinds, kinds[1:]))


class TestSlopes:
    def test_conservative(self):
        assert separatrix_slopes(ModelParams(0.0, 0.0)) == (1.0, -1.0)

    def test_saddle_node(self):
        assert separatrix_slopes(ModelParams(1.0, 2.5)) == (0.0, -2.5)

    def test_high_damping(self):
        lam1, lam2 = separatrix_slopes(ModelParams(0.0, 3.0))
        assert lam1 == pytest.approx(-1.5 + math.sqrt(3.25), rel=1e-14)
        assert lam2 == pytest.approx(-1.5 - math.sqrt(3.25), rel=1e-14)
        assert lam1 == pytest.approx(0.302776, abs=1e-6)

    def test_rejects_beta_above_one(self):
        with pytest.raises(DomainError):
            separatrix_slopes(ModelParams(1.1, 1.0))

    @given(betas, gammas)
    def test_vieta_and_eigen_oracle(self, beta, gamma):
        lam1, lam2 = separatrix_slopes(ModelParams(beta, gamma))
        c0 = math.cos(math.asin(beta))
        assert lam1 * lam2 == pytest.approx(-c0, abs=1e-12)
        assert lam1 + lam2 == pytest.approx(-gamma, abs=1e-12)
        saddle_phi = -math.pi - math.asin(beta)
        assert [lam2, lam1] == pytest.approx(list(jacobian_eigs(saddle_phi, gamma)), abs=1e-9)


class TestCurveG:
    @pytest.mark.parametrize("phi,beta,gamma,expected", [
        (math.pi / 6, 0.5, 1.0, 0.0), (-math.pi / 2, 0.0, 2.0, 0.5),
        (-math.pi / 2, 1.0, 1.0, 2.0)])
    def test_values(self, phi, beta, gamma, expected):
        assert curve_g(phi, ModelParams(beta, gamma)) == pytest.approx(expected, abs=1e-15)

    def test_vectorised(self):
        phi = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(curve_g(phi, ModelParams(0.2, 0.5)),
                                   (0.2 - np.sin(phi)) / 0.5)

    def test_needs_damping(self):
        with pytest.raises(DomainError):
            curve_g(0.0, ModelParams(0.5, 0.0))


class TestRegions:
    p = ModelParams(0.5, 1.0)

    @pytest.mark.parametrize("z,expected", [(0.01, Region.LAMBDA1), (5.0, Region.LAMBDA3),
                                            (0.5, Region.ON_G), (0.0, Region.ON_AXIS)])
    def test_at_origin(self, z, expected):
        assert classify_region(PhaseState(0.0, z), self.p) is expected

    def test_lower_half(self):
        # G(pi/2) = -0.5
        assert classify_region(PhaseState(math.pi / 2, -0.2), self.p) is Region.LAMBDA2
        assert classify_region(PhaseState(math.pi / 2, -2.0), self.p) is Region.LAMBDA4

    def test_fixed_point(self):
        assert classify_region(PhaseState(math.pi / 6, 0.0), self.p) is Region.AT_FIXED_POINT

    def test_needs_damping(self):
        with pytest.raises(DomainError):
            classify_region(PhaseState(0.0, 1.0), ModelParams(0.5, 0.0))


class TestRotationRates:
    def test_zero_on_axis(self):
        p = ModelParams(0.5, 1.0)
        assert rotation_rate_gamma(PhaseState(0.3, 0.0), p) == 0.0
        assert rotation_rate_beta(PhaseState(0.3, 0.0), p) == 0.0

    def test_on_g(self):
        p = ModelParams(0.5, 1.0)
        phi = math.asin(0.5 - 1.0)  # G(phi) = 1
        s = PhaseState(phi, 1.0)
        assert rotation_rate_gamma(s, p) == pytest.approx(-1.0, abs=1e-15)
        assert rotation_rate_beta(s, p) == pytest.approx(1.0, abs=1e-15)

    def test_conservative(self):
        # Q = beta - sin(phi) - gamma*z vanishes at phi = 0, so both rates are -z**2/z**2, z/z**2
        p = ModelParams(0.0, 0.0)
        assert rotation_rate_gamma(PhaseState(0.0, 1.0), p) == -1.0
        assert rotation_rate_beta(PhaseState(0.0, -1.0), p) == -1.0
        assert rotation_rate_gamma(PhaseState(-math.pi / 2, 1.0), p) == -0.5

    def test_undefined_at_equilibrium(self):
        with pytest.raises(DomainError):
            rotation_rate_beta(PhaseState(math.pi / 6, 0.0), ModelParams(0.5, 1.0))

    @settings(max_examples=200)
    @given(st.floats(0, 2), gammas, angles, heights)
    def test_against_finite_difference(self, beta, gamma, phi, z):
        s = PhaseState(phi, z)
        q = beta - math.sin(phi) - gamma * z
        if z * z + q * q < 1e-3:
            return
        angle = lambda b, g: math.atan2(b - math.sin(phi) - g * z, z)
        wrap = lambda d: (d + math.pi) % (2 * math.pi) - math.pi
        h = 1e-6
        dg = wrap(angle(beta, gamma + h) - angle(beta, gamma - h)) / (2 * h)
        db = wrap(angle(beta + h, gamma) - angle(beta - h, gamma)) / (2 * h)
        rg = rotation_rate_gamma(s, ModelParams(beta, gamma))
        rb = rotation_rate_beta(s, ModelParams(beta, gamma))
        assert rg <= 0 and rb * z >= 0
        assert rg == pytest.approx(dg, abs=1e-6)
        assert rb == pytest.approx(db, abs=1e-6)


def test_divergence_is_minus_gamma():
    assert divergence(ModelParams(0.3, 0.7)) == -0.7


@given(betas, pos_gammas, angles, heights)
def test_energy_rate(beta, gamma, phi, z):
    # dE/dt = z * dE/dphi + z' * dE/dz = -gamma z**2
    p = ModelParams(beta, gamma)
    h = 1e-6
    v = rhs(PhaseState(phi, z), p)
    de = ((energy(phi + h * v.dphi, z + h * v.dz, p) - energy(phi - h * v.dphi, z - h * v.dz, p))
          / (2 * h))
    assert de == pytest.approx(-gamma * z * z, abs=1e-5 * (1 + z * z))


def test_main_interval():
    lo, hi = main_interval(ModelParams(0.5, 1.0))
    assert (lo, hi) == pytest.approx((-math.pi - math.pi / 6, math.pi - math.pi / 6))
    assert main_interval(ModelParams(1.5, 1.0)) == (-math.pi, math.pi)


@given(betas, angles)
def test_wrap(beta, phi):
    p = ModelParams(beta, 1.0)
    lo, hi = main_interval(p)
    w = float(wrap_to_main_interval(phi, p))
    assert lo <= w < hi + 1e-12
    assert PhaseState(w, 0.0).cylinder_equivalent(PhaseState(phi, 0.0), tol=1e-9)
