from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharmonic.algebra import (
    ConstExpr,
    ESeries,
    LatticeMismatch,
    Poly,
    eval_numeric,
    exp_series,
    series_arith,
    series_compose,
    series_reverse,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def series(draw_coeffs, step=1):
    return ESeries.from_list(draw_coeffs, step)


class TestPoly:
    def test_arithmetic_and_evaluation(self):
        E = Poly.var("E")
        p = F(7, 16) + F(15, 4) * E**2
        assert p(F(1, 2)) == F(7, 16) + F(15, 16)
        assert p.degree == 2
        assert (p - p).degree is None
        assert p.derivative() == Poly([0, F(15, 2)])

    def test_symbols_do_not_mix(self):
        with pytest.raises(ValueError):
            Poly.var("E") + Poly.var("nu")
        # constants are symbol-free
        assert Poly.var("E") + Poly.const(3, "nu") == Poly([3, 1], "E")

    def test_rename(self):
        assert Poly([1, 2], "nu").rename("E") == Poly([1, 2], "E")

    @given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=5), rationals)
    def test_product_evaluates_pointwise(self, a, b, x):
        pa, pb = Poly(a), Poly(b)
        assert (pa * pb)(x) == pa(x) * pb(x)


class TestESeries:
    def test_truncated_product(self):
        a = ESeries.from_list([1, 1], truncation=2)
        b = ESeries.from_list([1, -1, 1, -1])
        prod = a * b
        assert prod.truncation == 2
        assert prod.coefficients() == [1, 0]

    def test_laurent_product_truncation(self):
        a = ESeries({-1: 1, 0: 2}, 1, 2)
        b = ESeries({1: 3, 2: 1}, 1, 4)
        # (g^-1 + 2 + O(g^2)) * (3g + g^2 + O(g^4)) = 3 + 7g + 2g^2 + O(g^3)
        assert (a * b).coefficients() == [3, 7, 2]

    def test_lattice_mismatch(self):
        with pytest.raises(LatticeMismatch):
            ESeries.from_list([1, 2], F(1, 2)) + ESeries.from_list([1, 2], 1)

    def test_shift_is_exact(self):
        s = ESeries.from_list([1, 2, 3]).shift(2)
        assert s.valuation == 2 and s.truncation == 5

    def test_series_arith_rejects_unknown_op(self):
        a = ESeries.from_list([1])
        assert series_arith(a, a, "add").coefficients() == [2]
        with pytest.raises(ValueError):
            series_arith(a, a, "pow")

    def test_reciprocal(self):
        s = ESeries.from_list([2, 1, 0, 0])
        r = s.reciprocal()
        assert (s * r).coefficients() == [1, 0, 0, 0]
        assert r[1] == F(-1, 4)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(rationals, min_size=2, max_size=6), st.lists(rationals, min_size=2, max_size=6))
    def test_product_commutes(self, a, b):
        sa, sb = ESeries.from_list(a), ESeries.from_list(b)
        assert sa * sb == sb * sa

    @settings(max_examples=40, deadline=None)
    @given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=5))
    def test_exp_of_sum_is_product_of_exps(self, a, b):
        sa = ESeries.from_list([0] + a)
        sb = ESeries.from_list([0] + b)
        t = min(sa.truncation, sb.truncation)
        sa, sb = sa.truncate(t), sb.truncate(t)
        assert exp_series(sa + sb) == exp_series(sa) * exp_series(sb)

    def test_exp_known_values(self):
        e = exp_series(ESeries.from_list([0, 1, 0, 0, 0]))
        assert e.coefficients() == [1, 1, F(1, 2), F(1, 6), F(1, 24)]
        with pytest.raises(ValueError):
            exp_series(ESeries.from_list([1, 1]))

    def test_json_round_trip_with_polys(self):
        s = ESeries({0: Poly.var("E"), 2: Poly([F(7, 16), 0, F(15, 4)])}, F(1, 5), 4)
        back = ESeries.from_json(s.to_json())
        assert back == s
        assert '"lattice_step": "1/5"' in s.to_json()

    def test_const_expr_rides_in_series(self):
        c = ConstExpr.named("euler_gamma", F(2))
        s = ESeries({0: 1, 1: c}, 1, 3)
        sq = s * s
        assert sq[2] == ConstExpr({("euler_gamma", "euler_gamma"): F(4)})
        with pytest.raises(TypeError):
            s.to_json()
        with mpmath.workdps(40):
            v = eval_numeric(s, mpmath.mpf(1) / 10).value
            assert abs(v - (1 + 2 * mpmath.euler / 10)) < mpmath.mpf(10) ** -35


class TestComposition:
    @settings(max_examples=40, deadline=None)
    @given(
        st.fractions(min_value=-5, max_value=5, max_denominator=9).filter(lambda x: x != 0),
        st.lists(rationals, min_size=1, max_size=5),
    )
    def test_reverse_is_inverse(self, a1, rest):
        s = ESeries.from_list([0, a1] + rest)
        r = series_reverse(s)
        assert series_compose(s, r) == ESeries.from_list([0, 1] + [0] * len(rest))

    def test_reverse_needs_linear_term(self):
        with pytest.raises(ValueError):
            series_reverse(ESeries.from_list([0, 0, 1]))

    def test_level_map_inversion(self):
        nu = Poly.var("nu")
        level = ESeries.from_list([nu, F(3, 2) * nu**2 + F(1, 8)])
        inv = series_reverse(level)
        E = Poly.var("E")
        assert inv[0] == E
        assert inv[1] == -(F(3, 2) * E**2 + F(1, 8))

    def test_polynomial_outer_allows_constant_inner(self):
        inner = ESeries.from_list([2, 1, 0])
        out = series_compose(Poly([0, 0, 1], "x"), inner)
        assert out.coefficients() == [4, 4, 1]
        with pytest.raises(ValueError):
            series_compose(ESeries.from_list([0, 1, 1]), inner)


class TestEvaluation:
    def test_fractional_lattice_branch(self):
        s = ESeries({0: 1, 1: 1}, F(1, 2), 2)
        assert eval_numeric(s, 4).value == 3
        with pytest.raises(ValueError):
            eval_numeric(s, -4)
        v = eval_numeric(s, -4, branch="principal").value
        assert v == mpmath.mpc(1, 2)

    def test_laurent_head_at_zero(self):
        with pytest.raises(ZeroDivisionError):
            eval_numeric(ESeries({-1: 1}, F(1, 3), 2), 0)

    def test_polynomial_coefficients_need_point(self):
        s = ESeries({0: Poly.var("E")}, 1, 1)
        with pytest.raises(ValueError):
            eval_numeric(s, 1)
        assert eval_numeric(s, 1, at=F(3, 2)).value == mpmath.mpf(1.5)
