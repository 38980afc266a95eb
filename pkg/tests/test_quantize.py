from fractions import Fraction as F

import mpmath
import pytest

from anharmonic.algebra import ConstExpr, Poly
from anharmonic.instanton import action_closed_form, width_leading
from anharmonic.quantize import (
    NoFixture,
    TransSeriesTerm,
    a_fixture,
    b_function,
    one_instanton_width_series,
    quantization_residual,
    trans_series_term,
    two_instanton_terms,
)
from anharmonic.rspt import rspt_coeffs

E = Poly.var("E")


@pytest.mark.parametrize(
    "m, first",
    [
        (3, F(7, 16) + F(15, 4) * E**2),
        (4, -(F(3, 8) + F(3, 2) * E**2)),
        (6, -(F(25, 8) * E + F(5, 2) * E**3)),
        (7, F(180675, 2048) + F(444381, 512) * E**2 + F(82005, 128) * E**4 + F(3003, 32) * E**6),
    ],
)
def test_b_function_first_order(m, first):
    b = b_function(m, 1)
    assert b.terms() == [E, first]


def test_b_function_on_shell():
    b = b_function(4, 4)
    for n in range(3):
        shifted = b.series.substitute(rspt_coeffs(4, n, 4).series())
        assert shifted.coefficients() == [F(2 * n + 1, 2), 0, 0, 0, 0]


def test_b_function_numeric_value():
    b = b_function(3, 1)
    assert abs(b.at(1, mpmath.mpf("0.01")) - (1 + mpmath.mpf("0.01") * (F(7, 16) + F(15, 4)).__float__())) < 1e-15


def test_fixtures():
    a3 = a_fixture(3)
    assert a3.terms[0].poly == F(77, 32) + F(141, 8) * E**2
    assert a3.leading == action_closed_form(3)
    a6 = a_fixture(6)
    assert [t.index for t in a6.terms] == [2, 4]
    assert a6.terms[1].poly.coeffs[1] == F(2504899, 7680)
    assert all(t.source for t in a6.terms)
    a7 = a_fixture(7)
    assert a7.notes and isinstance(a7.terms[0].factor, ConstExpr)
    with pytest.raises(NoFixture, match="supported degrees"):
        a_fixture(5)


def test_fixture_is_immutable():
    with pytest.raises(Exception):
        a_fixture(3).depth = 5


def test_a_value_includes_corrections():
    a = a_fixture(3)
    y = mpmath.mpf("0.01")
    expected = mpmath.mpf(2) / 15 / y + y * (F(77, 32) + F(141, 8) * F(9, 4)).__float__()
    assert abs(a.value(mpmath.mpf(1.5), y) - expected) < 1e-12


@pytest.mark.parametrize(
    "m, n, order, expected",
    [
        (3, 1, 1, [1, F(-853, 16)]),
        (3, 0, 1, [1, F(-169, 16)]),
        (4, 0, 1, [1, F(-95, 24)]),
        (6, 0, 2, [1, 0, F(-165, 16)]),
    ],
)
def test_width_series(m, n, order, expected):
    assert list(one_instanton_width_series(m, n, order).coeffs) == expected


def test_degree_seven_width_carries_the_fixture_constant():
    c1 = one_instanton_width_series(7, 0, 1).coeffs[1]
    assert c1 == ConstExpr.named("F7", F(-17, 20))


def test_width_series_order_limit():
    with pytest.raises(ValueError, match="maximum derivable order is 1"):
        one_instanton_width_series(3, 1, 2)


@pytest.mark.parametrize("m, n, g", [(3, 1, "0.01"), (4, 0, "-0.02"), (5, 2, "0.03"), (6, 1, "-0.01"), (7, 0, "0.02")])
def test_order_zero_reproduces_leading_width(m, n, g):
    g = mpmath.mpf(g)
    w = one_instanton_width_series(m, n, 0)
    assert abs(w.value(g) / width_leading(m, n, g) - 1) < 1e-30


def test_prefactor_forms():
    assert one_instanton_width_series(3, 1, 0).formula() == "-8/sqrt(pi) * g^(-3/2) * exp(-2/(15 g))"
    assert one_instanton_width_series(4, 0, 0).formula() == "-2^(1/2)/sqrt(pi) * (-g)^(-1/2) * exp(-1/(3 (-g)))"


def test_transseries_bounds():
    with pytest.raises(ValueError):
        TransSeriesTerm(2, 2, 0, 1)
    with pytest.raises(ValueError):
        TransSeriesTerm(1, 1, 0, 1)
    with pytest.raises(ValueError):
        trans_series_term(3, 0, 2, 2, 0)


def test_j0_sector_is_perturbation_theory():
    c = rspt_coeffs(6, 0, 4)
    for K in range(5):
        assert trans_series_term(6, 0, 0, 0, 2 * K).coefficient == (-1) ** K * c[K]
    assert trans_series_term(6, 0, 0, 0, 3).coefficient == 0


def test_j1_sector_matches_width():
    assert trans_series_term(3, 1, 1, 0, 1).coefficient == F(853, 16)


def test_two_instanton_terms():
    terms = {t.L: t for t in two_instanton_terms(3, 2)}
    assert terms[1].coefficient == 1
    assert terms[0].coefficient == ConstExpr.named("euler_gamma") - F(3, 2)
    assert abs(terms[0].value() - (mpmath.euler - 1.5)) < 1e-15


def test_residual_pole_is_reported():
    r = quantization_residual(3, mpmath.mpf(0.5), mpmath.mpf(10) ** -50)
    assert r.perturbative_root and r.value is None


def test_residual_blows_up_near_pole():
    g = mpmath.mpf("0.05")
    b = b_function(3, 1)
    vals = []
    for eps in (mpmath.mpf(10) ** -4, mpmath.mpf(10) ** -8):
        E = mpmath.findroot(lambda e: b.at(e, g) - mpmath.mpf(1) / 2 - eps, 0.45)
        vals.append(abs(quantization_residual(3, E, g, bfun=b).value))
    assert vals[1] > 1e3 * vals[0] > 1e3


def test_residual_regime():
    with pytest.raises(ValueError):
        quantization_residual(4, 0.5, 0.01)
