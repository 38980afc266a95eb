import mpmath
import pytest

from anharmonic.instanton import (
    InstantonProfile,
    RegimeError,
    action_closed_form,
    action_numeric,
    action_pair,
    profile_eval,
    scaled_potential,
    width_leading,
)


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_profile_solves_equation_of_motion(m):
    # x'' = x - m x^(m-1) for the Lagrangian x'^2/2 + x^2/2 - x^m
    prof = InstantonProfile(m, t0=0.3)
    with mpmath.workdps(30):
        for t in (-1.2, 0.1, 0.3, 2.5):
            x = prof.scaled(t)
            assert abs(prof.acceleration(t) - (x - m * x ** (m - 1))) < 1e-25
            assert abs(prof.velocity(t) - mpmath.diff(prof.scaled, t)) < 1e-20


def test_zero_energy_orbit():
    prof = InstantonProfile(5)
    for t in (-0.7, 0.0, 1.3):
        x = prof.scaled(t)
        assert abs(prof.velocity(t) ** 2 / 2 + scaled_potential(x, 5)) < 1e-13


def test_turning_point():
    assert abs(InstantonProfile(6).scaled(0) - mpmath.mpf(2) ** (-mpmath.mpf(1) / 4)) < 1e-15


def test_exact_actions():
    with mpmath.workdps(40):
        assert abs(action_closed_form(3) - mpmath.mpf(2) / 15) < mpmath.mpf(10) ** -38
        assert abs(action_closed_form(4) - mpmath.mpf(1) / 3) < mpmath.mpf(10) ** -38
        assert abs(action_closed_form(6) - mpmath.pi / mpmath.mpf(2) ** 2.5) < mpmath.mpf(10) ** -38


@pytest.mark.parametrize("m", [3, 4, 8])
def test_quadrature_matches_closed_form(m):
    assert action_pair(m, 30).relative_difference < 1e-25


def test_action_independent_of_collective_coordinate_and_branch():
    with mpmath.workdps(30):
        a = action_numeric(4, 30)
        assert abs(action_numeric(4, 30, t0=3.7) - a) < 1e-25
        assert abs(action_numeric(4, 30, branch=-1) - a) < 1e-25


def test_odd_degree_has_one_branch():
    with pytest.raises(ValueError):
        InstantonProfile(3, branch=-1)


def test_physical_profile_reaches_barrier_exit():
    # q at t0 solves q^2/2 + g q^4 = 0, i.e. q^2 = -1/(2g)
    g = mpmath.mpf(-0.05)
    q = profile_eval(InstantonProfile(4), 0, g)
    assert abs(q**2 / 2 + g * q**4) < 1e-12
    q = profile_eval(InstantonProfile(3), 0, mpmath.mpf(0.01))
    assert q < 0
    assert abs(q**2 / 2 + mpmath.sqrt(mpmath.mpf(0.01)) * q**3) < 1e-12


def test_regime_errors():
    with pytest.raises(RegimeError):
        width_leading(4, 0, 0.01)
    with pytest.raises(RegimeError):
        width_leading(3, 0, -0.01)
    with pytest.raises(RegimeError):
        profile_eval(InstantonProfile(4), 0, 0.1)


def test_leading_width_values():
    g = mpmath.mpf(1) / 100
    expected = -8 * mpmath.exp(-2 / (15 * g)) / (mpmath.sqrt(mpmath.pi) * g**1.5)
    assert abs(width_leading(3, 1, g) / expected - 1) < 1e-14
    g = mpmath.mpf(-1) / 20
    expected = -mpmath.sqrt(2 / (mpmath.pi * -g)) * mpmath.exp(1 / (3 * g))
    assert abs(width_leading(4, 0, g) / expected - 1) < 1e-14
