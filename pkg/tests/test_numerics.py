import mpmath
import numpy as np
import pytest

from anharmonic.banded import inverse_iteration
from anharmonic.instanton import width_leading
from anharmonic.numerics import (
    DEFLECTION,
    PlateauError,
    borel_pade,
    build_hamiltonian,
    default_thetas,
    resonance,
)
from anharmonic.rspt import rspt_coeffs

FAST_GRID = dict(thetas=(0.2, 0.25, 0.3), dims=(80, 120))


@pytest.mark.parametrize("theta", [0, 0.2, 0.5])
def test_harmonic_limit(theta):
    h = build_hamiltonian(4, 0, theta, 100, dps=30)
    with mpmath.workdps(30):
        for n in range(4):
            lam, _ = inverse_iteration(h.rows, h.bandwidth, n + 0.4 + 0.05j)
            assert abs(lam - (n + 0.5)) < 1e-15


@pytest.mark.parametrize("m, bw", [(3, 3), (4, 4), (7, 7)])
def test_bandwidth(m, bw):
    h = build_hamiltonian(m, 0.01, 0.1, 20)
    assert h.bandwidth == bw
    assert all(abs(i - j) <= bw for i, r in enumerate(h.rows) for j in r)


def test_symmetry():
    h = build_hamiltonian(4, 0.1, 0, 24).dense()
    assert all(mpmath.im(h[i, j]) == 0 and h[i, j] == h[j, i] for i in range(24) for j in range(24))
    h = build_hamiltonian(3, 0.01, 0.3, 24).dense()
    assert h == h.T
    assert h != h.H


def test_guards():
    with pytest.raises(ValueError):
        build_hamiltonian(4, 0.1, 0.1, 10)
    with pytest.raises(ValueError):
        build_hamiltonian(4, 0.1, 0.6, 40)


def test_default_thetas_range():
    t = default_thetas(3)
    assert len(t) == 8 and abs(t[0] - 0.1) < 1e-15 and abs(t[-1] - (0.1 + np.pi / 10)) < 1e-12


def test_zero_coupling():
    r = resonance(3, 2, 0)
    assert r.energy == 2.5 and r.error == 0


def test_stable_quartic_is_real():
    r = resonance(4, 0, mpmath.mpf("0.1"), **FAST_GRID)
    assert abs(r.im) < 1e-20
    assert abs(r.re - mpmath.mpf("0.559146327183519")) < 1e-14


def test_quartic_resonance_near_leading_width():
    g = mpmath.mpf("-0.05")
    r = resonance(4, 0, g, **FAST_GRID)
    lead = width_leading(4, 0, g)
    assert r.im < 0
    assert abs(r.im / lead - 1) < 0.25


def test_theta_and_dim_stability():
    g = mpmath.mpf("0.02")
    r = resonance(3, 0, g, thetas=(0.15, 0.2, 0.25, 0.3), dims=(100, 140))
    assert r.error < 1e-18
    # the smallest angle needs a larger basis; the remaining cells form the plateau
    cells = [e for row in r.table for e in row[1:]]
    assert max(abs(a - r.energy) for a in cells) < 1e-18
    h = build_hamiltonian(3, g, r.theta, 2 * r.dim, r.dps)
    with mpmath.workdps(r.dps):
        doubled, _ = inverse_iteration(h.rows, h.bandwidth, r.energy)
    assert abs(doubled - r.energy) <= max(r.error, mpmath.mpf(10) ** -30)


def test_plateau_error_carries_table():
    with pytest.raises(PlateauError) as info:
        resonance(3, 0, mpmath.mpf("0.02"), thetas=(0.2, 0.25), dims=(100,), max_error=mpmath.mpf(10) ** -200)
    assert len(info.value.table) == 1


def test_precision_raised_for_tiny_widths():
    r = resonance(3, 0, mpmath.mpf("0.0025"), thetas=(0.2, 0.3), dims=(120,))
    assert r.dps == 80
    assert -1e-22 < r.im < 0


def test_geometric_borel_sum():
    coeffs = [(-1) ** k for k in range(30)]
    with mpmath.workdps(30):
        b = borel_pade(coeffs, 1, 0, mpmath.mpf("0.5"), dps=30)
        assert abs(b.value - mpmath.mpf(2) / 3) < 1e-20


def test_borel_needs_twelve_coefficients():
    with pytest.raises(ValueError):
        borel_pade([1] * 11, 1, 0, 0.1)


def test_pole_on_ray_is_deflected():
    # sum K! g^K has a Borel pole on the positive real axis
    coeffs = [mpmath.factorial(k) for k in range(16)]
    b = borel_pade([int(c) for c in coeffs], 1, 0, mpmath.mpf("0.1"), dps=20, order=(5, 1))
    assert abs(b.deflected) == DEFLECTION
    assert b.value.imag != 0


def test_borel_matches_complex_scaling_for_stable_quartic():
    g = mpmath.mpf("0.02")
    b = borel_pade(rspt_coeffs(4, 0, 40).coeffs, 1, 0, g)
    r = resonance(4, 0, g, **FAST_GRID)
    assert abs(b.value.real - r.re) < 1e-6
    assert abs(b.value.imag) < b.error + 1e-30


def test_directional_sum_carries_the_width():
    g = mpmath.mpf("0.004")
    b = borel_pade(rspt_coeffs(3, 0, 40).coeffs, 1, mpmath.pi / 4, g)
    lead = width_leading(3, 0, g)
    # lateral sums pick up the full imaginary part of the resonance
    assert abs(b.value.imag / lead - 1) < 0.10


@pytest.mark.slow
def test_exponential_width_law():
    gs = np.array([0.01, 0.0175, 0.025, 0.0325, 0.04])
    ys = []
    for g in gs:
        g = mpmath.mpf(float(g))
        r = resonance(3, 0, g, thetas=(0.2, 0.25, 0.3), dims=(120, 160))
        ys.append(float(mpmath.log(-r.im) + mpmath.mpf(2) / 15 / g))
    slope = np.polyfit(np.log(gs), ys, 1)[0]
    assert abs(slope / -0.5 - 1) < 0.05, f"slope {slope:.4f}"
