"""Potential structure, jump constants, and renormalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fput_fronts import (
    PotentialError,
    hertz_potential,
    linear_force_potential,
    polynomial_potential,
    quadratic_force_potential,
)


def chord_area_oracle(pot):
    """Area between the chord of the force law and the force law, by quadrature."""
    a, b = pot.r_plus, pot.r_minus
    dp_a, dp_b = pot.dphi(a), pot.dphi(b)

    def chord_minus_force(r):
        return dp_a + (dp_b - dp_a) * (r - a) / (b - a) - pot.dphi(r)

    val, _ = quad(chord_minus_force, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


class TestNormalization:
    def test_quadratic_endpoints(self):
        pot = quadratic_force_potential()
        assert abs(pot.dphi(0.0)) <= 1e-12
        assert abs(pot.dphi(1.0) - 1.0) <= 1e-12
        assert pot.is_normalized

    def test_hertz_endpoints(self):
        pot = hertz_potential()
        assert abs(pot.dphi(0.0)) <= 1e-12
        assert abs(pot.dphi(1.0) - 1.0) <= 1e-12

    def test_phi_vanishes_at_zero(self):
        for pot in (quadratic_force_potential(), hertz_potential(), linear_force_potential()):
            assert pot.phi(0.0) == 0.0


class TestFrontConstants:
    def test_normalized_unit_speed(self):
        for pot in (quadratic_force_potential(), hertz_potential()):
            fc = pot.front_constants()
            assert abs(fc.speed - 1.0) <= 1e-12
            assert abs(fc.offset) <= 1e-12

    def test_hertz_unnormalized_speed(self):
        fc = hertz_potential(r_minus=4.0).front_constants()
        assert abs(fc.speed - np.sqrt(2.0)) <= 1e-12

    def test_offset_agrees_at_both_ends(self):
        pot = polynomial_potential([0.1, 0.7, 1.3, 0.4], r_plus=0.2, r_minus=1.7)
        fc = pot.front_constants()
        c2 = fc.speed**2
        d_left = pot.dphi(pot.r_minus) - c2 * pot.r_minus
        d_right = pot.dphi(pot.r_plus) - c2 * pot.r_plus
        assert abs(d_left - d_right) <= 1e-12
        assert abs(fc.offset - d_right) <= 1e-12


class TestChordArea:
    def test_frozen_values(self):
        assert quadratic_force_potential().coefficient_A() == pytest.approx(1 / 6, abs=1e-12)
        assert hertz_potential().coefficient_A() == pytest.approx(1 / 10, abs=1e-12)
        assert linear_force_potential().coefficient_A() == pytest.approx(0.0, abs=1e-12)

    def test_matches_quadrature_oracle(self):
        for pot in (
            quadratic_force_potential(),
            hertz_potential(),
            hertz_potential(alpha=1.8, r_minus=2.5),
            polynomial_potential([0.0, 0.5, 0.2, 0.3]),
        ):
            assert pot.coefficient_A() == pytest.approx(chord_area_oracle(pot), abs=1e-12)

    def test_positive_for_strictly_convex(self):
        assert quadratic_force_potential().coefficient_A() > 0
        assert hertz_potential().coefficient_A() > 0


class TestExtension:
    def test_force_is_c1_across_core_ends(self):
        pot = hertz_potential()
        for edge in (0.0, 1.0):
            eps = 1e-7
            jump = pot.dphi(edge + eps) - pot.dphi(edge - eps)
            slope = pot.d2phi(edge)
            assert abs(jump - 2 * eps * slope) <= 1e-9

    def test_constant_curvature_outside(self):
        pot = quadratic_force_potential()
        assert pot.d2phi(-3.0) == pytest.approx(pot.d2phi(0.0), abs=1e-14)
        assert pot.d2phi(5.0) == pytest.approx(pot.d2phi(1.0), abs=1e-14)

    def test_hertz_force_vanishes_below_zero(self):
        pot = hertz_potential()
        assert pot.dphi(-0.5) == 0.0
        assert pot.phi(-0.5) == 0.0


class TestValidate:
    def test_curvature_strictly_increasing(self):
        for pot in (quadratic_force_potential(), hertz_potential()):
            rep = pot.validate()
            assert rep.strictly_convex
            assert rep.ok

    def test_linear_force_degenerate(self):
        rep = linear_force_potential().validate()
        assert rep.ok
        assert not rep.strictly_convex

    def test_holder_exponent_hertz(self):
        rep = hertz_potential(alpha=1.5).validate()
        assert 0.4 <= rep.holder_exponent <= 0.6

    def test_holder_exponent_smooth(self):
        rep = quadratic_force_potential().validate()
        assert 0.9 <= rep.holder_exponent <= 1.1

    def test_curvature_limits(self):
        pot = hertz_potential()
        assert pot.p_plus == pytest.approx(0.0, abs=1e-14)
        assert pot.p_minus == pytest.approx(1.5, abs=1e-14)


class TestRenormalize:
    def test_hertz_is_scale_invariant(self):
        raw = hertz_potential(r_minus=4.0)
        norm, fmap = raw.renormalize()
        ref = hertz_potential()
        R = np.linspace(0.0, 1.0, 101)
        assert np.max(np.abs(norm.dphi(R) - ref.dphi(R))) <= 1e-12
        assert abs(fmap.speed - np.sqrt(2.0)) <= 1e-12
        assert norm.is_normalized

    def test_round_trip_of_strains(self):
        raw = polynomial_potential([0.0, 0.3, 1.1], r_plus=0.1, r_minus=2.0)
        _, fmap = raw.renormalize()
        r = np.linspace(0.1, 2.0, 17)
        back = fmap.strain_from_normalized(fmap.normalized_from_strain(r))
        assert np.max(np.abs(back - r)) <= 1e-12

    def test_rejects_decreasing_force(self):
        with pytest.raises(PotentialError):
            polynomial_potential([1.0, -1.0]).renormalize()

    @settings(max_examples=40, deadline=None)
    @given(
        c1=st.floats(0.05, 3.0),
        c2=st.floats(0.0, 2.0),
        c3=st.floats(0.0, 2.0),
        c0=st.floats(-1.0, 1.0),
        r_lo=st.floats(0.0, 0.5),
        width=st.floats(0.3, 3.0),
    )
    def test_random_convex_cubics(self, c1, c2, c3, c0, r_lo, width):
        """Renormalizing preserves the sign of the chord area."""
        if c2 + c3 < 1e-3:
            c2 = 0.5  # keep the force law strictly convex
        raw = polynomial_potential([c0, c1, c2, c3], r_plus=r_lo, r_minus=r_lo + width)
        A_raw = raw.coefficient_A()
        norm, _ = raw.renormalize()
        assert abs(norm.dphi(0.0)) <= 1e-12
        assert abs(norm.dphi(1.0) - 1.0) <= 1e-12
        A_norm = norm.coefficient_A()
        assert A_raw > 0
        assert A_norm > 0
        assert A_norm == pytest.approx(chord_area_oracle(norm), abs=1e-12)
