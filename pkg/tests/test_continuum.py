"""Continuum front profile against closed-form and quadrature oracles."""

import numpy as np
import pytest

from fput_fronts import (
    ConfigError,
    DomainTooSmallError,
    hertz_potential,
    linear_force_potential,
    position_of_level,
    quadratic_force_potential,
    solve_R0,
    suggest_half_length,
)


@pytest.fixture(scope="module")
def logistic_solution():
    return solve_R0(quadratic_force_potential())


@pytest.fixture(scope="module")
def hertz_solution():
    return solve_R0(hertz_potential())


class TestLogisticOracle:
    """For force law R^2 the continuum front is exactly 1/(1 + exp(x))."""

    def test_profile_on_grid(self, logistic_solution):
        sol = logistic_solution
        exact = 1.0 / (1.0 + np.exp(sol.grid.x))
        assert np.max(np.abs(sol.values - exact)) <= 1e-10

    def test_dense_profile_off_grid(self, logistic_solution):
        x = np.linspace(-30.0, 30.0, 1234)
        exact = 1.0 / (1.0 + np.exp(x))
        assert np.max(np.abs(logistic_solution(x) - exact)) <= 1e-10

    def test_midpoint(self, logistic_solution):
        assert abs(logistic_solution(0.0) - 0.5) <= 1e-10


class TestContract:
    @pytest.mark.parametrize("name", ["quadratic", "hertz"])
    def test_residual(self, name, logistic_solution, hertz_solution):
        sol = logistic_solution if name == "quadratic" else hertz_solution
        assert sol.residual() <= 1e-10

    @pytest.mark.parametrize("name", ["quadratic", "hertz"])
    def test_strictly_decreasing_and_bounded(self, name, logistic_solution, hertz_solution):
        """Strict monotonicity and bounds, tested in representable variables.

        Near the left end 1 - R0 drops below machine epsilon, so R0 itself
        saturates at 1.0 in doubles; there the exact statement lives in the
        gap variable, which the solution tracks directly.
        """
        sol = logistic_solution if name == "quadratic" else hertz_solution
        xs = np.linspace(-sol.L, sol.L, 20001)
        right = sol(xs[xs >= 0])
        assert np.all(np.diff(right) < 0)
        assert np.all(right > 0)
        gap = sol.gap(xs[xs <= 0])
        assert np.all(np.diff(gap) > 0)
        assert np.all(gap > 0)
        mids = sol(xs[np.abs(xs) <= 25])
        assert np.all(np.diff(mids) < 0)

    @pytest.mark.parametrize("name", ["quadratic", "hertz"])
    def test_boundary_settled(self, name, logistic_solution, hertz_solution):
        sol = logistic_solution if name == "quadratic" else hertz_solution
        end_r = sol(sol.L)
        end_l = 1.0 - sol(-sol.L)
        assert end_r <= 1e-8
        assert end_l <= 1e-8
        # tails track the linearized rates up to a modest constant
        assert end_r <= max(100.0 * np.exp(-sol.m_plus * sol.L), 1e-14)
        assert end_l <= max(100.0 * np.exp(-sol.m_minus * sol.L), 1e-14)

    def test_domain_too_small_reports_suggestion(self):
        with pytest.raises(DomainTooSmallError) as exc:
            solve_R0(quadratic_force_potential(), L=10.0)
        assert exc.value.suggested_L > 15.0

    def test_rejects_unnormalized(self):
        with pytest.raises(ConfigError):
            solve_R0(hertz_potential(r_minus=4.0))

    def test_rejects_degenerate_rates(self):
        with pytest.raises(ConfigError):
            solve_R0(linear_force_potential())


class TestQuadratureInversion:
    """x(R) by quadrature of 1/(dphi - id) must land back on the profile."""

    @pytest.mark.parametrize("name", ["quadratic", "hertz"])
    def test_twenty_interior_levels(self, name, logistic_solution, hertz_solution):
        sol = logistic_solution if name == "quadratic" else hertz_solution
        for level in np.linspace(0.05, 0.95, 20):
            x = position_of_level(sol.potential, level)
            assert abs(sol(x) - level) <= 1e-8

    def test_logistic_closed_form(self):
        pot = quadratic_force_potential()
        for level in (0.1, 0.3, 0.7, 0.9):
            assert position_of_level(pot, level) == pytest.approx(
                np.log((1 - level) / level), abs=1e-12
            )


class TestLinearization:
    @pytest.mark.parametrize("name", ["quadratic", "hertz"])
    def test_limits_at_ends(self, name, logistic_solution, hertz_solution):
        sol = logistic_solution if name == "quadratic" else hertz_solution
        pot = sol.potential
        P = sol.linearization_profile()
        assert abs(P[0] - pot.p_minus) <= 1e-6
        assert abs(P[-1] - pot.p_plus) <= 1e-6

    def test_slope_profile_positive(self, hertz_solution):
        S0 = hertz_solution.slope_profile()
        assert np.all(S0 >= 0)
        assert np.trapezoid(S0, dx=hertz_solution.grid.h) == pytest.approx(1.0, abs=1e-6)


class TestHalfLength:
    def test_defaults(self):
        assert suggest_half_length(quadratic_force_potential()) == 40.0
        assert suggest_half_length(hertz_potential()) == 40.0
        assert suggest_half_length(hertz_potential(alpha=1.2)) == pytest.approx(100.0)
