"""
Perturbative and instanton functions, generalized quantization conditions,
and the trans-series data they generate.

Conventions
-----------
``y`` is the positive coupling of the tunneling regime: ``y = -g`` for even
degree (g < 0) and ``y = g`` for odd degree (g > 0). Fractional series live
on the lattice ``y^(k/rho)`` with ``rho = (N-2)/2`` or ``M-2``.

The quantization condition is evaluated as

    Gamma(1/2 - B) * exp(i pi B) * (2C / y^(1/rho))^B * exp(-A) / sqrt(norm) = 1

with ``norm = 2 pi`` (even) or ``8 pi`` (odd). The phase ``exp(i pi B)`` is the
principal branch of ``(-2C/y^(1/rho))^B`` and puts the resonance at
``Im E < 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import mpmath

from .algebra import (
    DEFAULT_DPS,
    ConstExpr,
    ESeries,
    Poly,
    exp_series,
    register_constant,
    scalar_value,
    series_reverse,
)
from .instanton import action_closed_form, prefactor_constant
from .rspt import OscillatorSpec, rspt_coeffs, rspt_nu_polys

__all__ = [
    "AFixture",
    "BFunction",
    "FixtureTerm",
    "NoFixture",
    "Residual",
    "TransSeriesTerm",
    "WidthSeries",
    "a_fixture",
    "b_function",
    "one_instanton_width_series",
    "quantization_residual",
    "trans_series_term",
    "two_instanton_terms",
]


def _spec(m) -> OscillatorSpec:
    return m if isinstance(m, OscillatorSpec) else OscillatorSpec(m)


def _mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _rho_int(spec: OscillatorSpec) -> int:
    assert spec.rho.denominator == 1
    return int(spec.rho)


# ---------------------------------------------------------------------------
# B: functional inverse of the level-to-energy map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BFunction:
    m: int
    series: ESeries  # in g, Poly-in-E coefficients

    @property
    def order(self) -> int:
        return self.series.truncation - 1

    def terms(self) -> list[Poly]:
        return self.series.coefficients()

    def derivative(self) -> ESeries:
        return self.series.derivative_in_symbol()

    def at(self, E, g, dps: int = DEFAULT_DPS):
        """Numeric value at (complex) energy ``E`` and real coupling ``g``."""
        with mpmath.workdps(dps):
            E = mpmath.mpmathify(E)
            g = mpmath.mpmathify(g)
            total = 0
            for k, p in self.series.items():
                total += _poly_at(p, E) * g**k
            return total


def _poly_at(p, x):
    if not isinstance(p, Poly):
        return scalar_value(p)
    acc = mpmath.mpf(0)
    for a in reversed(p.coeffs):
        acc = acc * x + mpmath.mpf(a.numerator) / a.denominator
    return acc


def b_function(spec, order: int, cache=None) -> BFunction:
    """``B_m(E, g)`` through ``g^order`` by inverting ``E(nu, g)`` for ``nu``."""
    spec = _spec(spec)
    table = rspt_nu_polys(spec, order, cache)
    inv = series_reverse(table.level_map())
    return BFunction(spec.m, inv)


# ---------------------------------------------------------------------------
# A: instanton-function fixtures
# ---------------------------------------------------------------------------


class NoFixture(KeyError):
    pass


def _f7():
    phi = (mpmath.sqrt(5) + 1) / 2
    return (
        mpmath.mpf(5) ** (mpmath.mpf(1) / 4)
        * mpmath.gamma(mpmath.mpf(3) / 5) ** 2
        * mpmath.gamma(mpmath.mpf(4) / 5)
        / (mpmath.mpf(2) ** (mpmath.mpf(7) / 5) * mpmath.pi * mpmath.sqrt(phi))
    )


def _a7_printed_leading():
    phi = (mpmath.sqrt(5) + 1) / 2
    return (
        mpmath.mpf(5) ** (mpmath.mpf(1) / 4)
        * mpmath.gamma(mpmath.mpf(1) / 5)
        * mpmath.gamma(mpmath.mpf(2) / 5)
        / (mpmath.mpf(2) ** (mpmath.mpf(3) / 5) * 9 * mpmath.pi * mpmath.sqrt(phi))
    )


register_constant("F7", _f7)


@dataclass(frozen=True)
class FixtureTerm:
    """``factor * poly(E) * y^(index/rho)``; ``factor`` is exact (Fraction or ConstExpr)."""

    index: int
    poly: Poly
    factor: object = Fraction(1)
    source: str = ""


@dataclass(frozen=True)
class AFixture:
    """Truncated ``A_m(E, g)``.

    ``leading`` is the instanton action, multiplying ``y^(-1/rho)``.
    ``depth`` is the first lattice index whose coefficient is not known;
    terms at or beyond it are kept for reference only.
    """

    m: int
    leading: object  # mpf, the closed-form action
    terms: tuple
    depth: int
    printed_leading: object = None
    notes: tuple = ()

    @property
    def spec(self) -> OscillatorSpec:
        return OscillatorSpec(self.m)

    def corrections(self, truncation: int | None = None) -> ESeries:
        """Correction terms as a lattice series with Poly-in-E coefficients (rational factors only)."""
        t = self.depth if truncation is None else min(truncation, self.depth)
        out = {}
        for term in self.terms:
            if term.index < t:
                if not isinstance(term.factor, Fraction):
                    raise TypeError("transcendental factor: use on_shell()")
                out[term.index] = out.get(term.index, Poly(())) + term.poly * term.factor
        return ESeries(out, self.spec.lattice_step, t)

    def on_shell(self, energy: ESeries, truncation: int) -> ESeries:
        """Corrections evaluated on an energy series (scalar coefficients, same lattice)."""
        t = min(truncation, self.depth)
        acc = ESeries({}, self.spec.lattice_step, t)
        for term in self.terms:
            if term.index >= t:
                continue
            acc = acc + (term.poly(energy.truncate(t)) * term.factor).shift(term.index)
        return acc.truncate(t)

    def value(self, E, y, dps: int = DEFAULT_DPS, truncation: int | None = None):
        """``A(E, g)`` at energy ``E`` and regime coupling ``y > 0``."""
        t = self.depth if truncation is None else min(truncation, self.depth)
        with mpmath.workdps(dps):
            E = mpmath.mpmathify(E)
            s = mpmath.mpf(y) ** (1 / _mp(self.spec.rho))
            total = self.leading / s
            for term in self.terms:
                if term.index < t:
                    total += scalar_value(term.factor, dps) * _poly_at(term.poly, E) * s**term.index
            return total


def _fixture_table():
    E = Poly.var("E")
    F = Fraction
    return {
        3: dict(
            terms=(FixtureTerm(1, F(77, 32) + F(141, 8) * E**2, source="A_3, g^1 coefficient"),),
            depth=2,
            printed_leading=lambda: mpmath.mpf(2) / 15,
        ),
        # y = -g: -g(...) = +y(...)
        4: dict(
            terms=(FixtureTerm(1, F(67, 48) + F(17, 4) * E**2, source="A_4, g^1 coefficient"),),
            depth=2,
            printed_leading=lambda: mpmath.mpf(1) / 3,
        ),
        # lattice (-g)^(1/2): g -> index 2 with sign -1, g^2 -> index 4
        6: dict(
            terms=(
                FixtureTerm(2, F(221, 24) * E + F(17, 3) * E**3, source="A_6, g^1 coefficient"),
                FixtureTerm(
                    4,
                    F(2504899, 7680) * E + F(45769, 96) * E**3 + F(17527, 160) * E**5,
                    source="A_6, g^2 coefficient",
                ),
            ),
            depth=3,
            printed_leading=lambda: mpmath.pi / mpmath.mpf(2) ** (mpmath.mpf(5) / 2),
        ),
        7: dict(
            terms=(
                FixtureTerm(
                    1,
                    F(5, 8) + F(9, 10) * E**2,
                    ConstExpr.named("F7"),
                    source="A_7, g^(1/5) coefficient",
                ),
            ),
            depth=2,
            printed_leading=_a7_printed_leading,
            notes=(
                "printed leading coefficient differs from the closed-form action by a factor Gamma(2/5); "
                "the closed form is used",
            ),
        ),
    }


def a_fixture(m: int, dps: int = DEFAULT_DPS) -> AFixture:
    """Tabulated instanton function for m in {3, 4, 6, 7}.

    The leading term is always the closed-form action; the printed leading
    coefficient is kept in ``printed_leading`` for comparison.
    """
    table = _fixture_table()
    if m not in table:
        raise NoFixture(f"no A-function fixture for degree {m}; supported degrees: {sorted(table)}")
    row = table[m]
    with mpmath.workdps(dps):
        printed = row["printed_leading"]()
    return AFixture(
        m,
        action_closed_form(m, dps),
        row["terms"],
        row["depth"],
        printed,
        row.get("notes", ()),
    )


# ---------------------------------------------------------------------------
# One-instanton width series
# ---------------------------------------------------------------------------


def perturbative_energy_on_lattice(spec: OscillatorSpec, n: int, truncation: int, cache=None) -> ESeries:
    """``E_n`` as a series in ``y^(1/rho)`` (``g^K -> (+-y)^K``, index ``K*rho``)."""
    rho = _rho_int(spec)
    kmax = max(0, -(-truncation // rho) - 1)
    table = rspt_coeffs(spec, n, kmax, cache)
    sign = -1 if spec.even else 1
    return ESeries({k * rho: c * sign**k for k, c in enumerate(table.coeffs)}, spec.lattice_step, truncation)


def g_series_to_lattice(series: ESeries, spec: OscillatorSpec, truncation: int) -> ESeries:
    rho = _rho_int(spec)
    sign = -1 if spec.even else 1
    return ESeries(
        {k * rho: c * sign**k for k, c in series.items()},
        spec.lattice_step,
        min(truncation, series.truncation * rho),
    )


@dataclass(frozen=True)
class WidthSeries:
    """``Im E = -P * y^(-(n+1/2)/rho) * exp(-A/y^(1/rho)) * sum_k c_k y^(k/rho)``.

    ``P = 2^power_of_two / (n! sqrt(pi))``.
    """

    spec: OscillatorSpec
    n: int
    action: object
    coeffs: tuple  # c_0 = 1, exact

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def prefactor_power(self) -> Fraction:
        return Fraction(2 * self.n + 1, 2)

    @property
    def power_of_two(self) -> Fraction:
        # (2C)^(n+1/2) / sqrt(2 pi) [/ 2 for odd], C = 2^(2/(m-2))
        m = self.spec.m
        e = self.prefactor_power * Fraction(m, m - 2) - Fraction(1, 2)
        return e if self.spec.even else e - 1

    @property
    def coupling_power(self) -> Fraction:
        return -self.prefactor_power / self.spec.rho

    @property
    def action_exact(self) -> Fraction | None:
        m = self.spec.m
        return {3: Fraction(2, 15), 4: Fraction(1, 3)}.get(m)

    def prefactor(self, dps: int = DEFAULT_DPS):
        with mpmath.workdps(dps):
            return mpmath.mpf(2) ** _mp(self.power_of_two) / (
                mpmath.factorial(self.n) * mpmath.sqrt(mpmath.pi)
            )

    def formula(self) -> str:
        """Closed-form leading factor as text, e.g. ``-8/sqrt(pi) * g^(-3/2) * exp(-2/(15 g))``."""
        e = self.power_of_two
        pref = Fraction(2) ** int(e) / math.factorial(self.n) if e.denominator == 1 else None
        if pref is not None:
            num = str(pref)
        else:
            num = f"2^({e})" + (f"/{math.factorial(self.n)}" if self.n > 1 else "")
        y = "(-g)" if self.spec.even else "g"
        a = self.action_exact
        act = f"{a.numerator}/({a.denominator} {y})" if a is not None else f"A({self.spec.m})/{y}^({self.spec.lattice_step})"
        return f"-{num}/sqrt(pi) * {y}^({self.coupling_power}) * exp(-{act})"

    def value(self, g, dps: int = DEFAULT_DPS, order: int | None = None):
        """Imaginary part at coupling ``g`` (regime sign), truncated at ``order``."""
        k_top = self.order if order is None else order
        with mpmath.workdps(dps):
            y = abs(mpmath.mpf(g))
            s = y ** (1 / _mp(self.spec.rho))
            series = mpmath.fsum(scalar_value(c, dps) * s**k for k, c in enumerate(self.coeffs[: k_top + 1]))
            lead = -self.prefactor(dps) * y ** _mp(self.coupling_power) * mpmath.exp(-self.action / s)
            return lead * series


def one_instanton_width_series(spec, n: int, order: int, cache=None) -> WidthSeries:
    """Correction coefficients ``c_k`` of the one-instanton width.

    The quantization condition is expanded about the pole of ``Gamma(1/2 - B)``
    at ``B = n + 1/2``: the energy shift is ``delta B / B_E`` and, on the
    perturbative branch where ``B = n + 1/2`` identically,

        sum_k c_k y^(k/rho) = exp(-(A - A_leading)) / (dB/dE)

    evaluated at ``E = E_n(g)``.
    """
    spec = _spec(spec)
    if order < 0:
        raise ValueError("order must be non-negative")
    if order == 0:
        return WidthSeries(spec, n, action_closed_form(spec.m), (Fraction(1),))
    fix = a_fixture(spec.m)
    if order >= fix.depth:
        raise ValueError(
            f"order {order} exceeds the A-function data for degree {spec.m}; "
            f"maximum derivable order is {fix.depth - 1}"
        )
    t = order + 1
    rho = _rho_int(spec)
    k_g = max(1, -(-t // rho))
    energy = perturbative_energy_on_lattice(spec, n, t, cache)
    bfun = b_function(spec, k_g, cache)
    b_e = g_series_to_lattice(bfun.derivative(), spec, t).substitute(energy)
    d_a = fix.on_shell(energy, t)
    w = exp_series(-d_a) * b_e.reciprocal() if not d_a.is_zero() else b_e.reciprocal()
    coeffs = tuple(w[k] for k in range(t))
    return WidthSeries(spec, n, fix.leading, coeffs)


# ---------------------------------------------------------------------------
# Trans-series bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransSeriesTerm:
    """Coefficient of ``[i P y^(-(n+1/2)/rho) e^(-A/y^(1/rho))]^J ln^L(...) y^(K/rho)``."""

    J: int
    L: int
    K: int
    coefficient: object  # Fraction or ConstExpr

    def __post_init__(self):
        if self.J < 0 or self.K < 0:
            raise ValueError("J and K must be non-negative")
        if not 0 <= self.L <= max(0, self.J - 1):
            raise ValueError(f"L = {self.L} violates 0 <= L <= max(0, J-1) for J = {self.J}")

    def value(self, dps: int = DEFAULT_DPS):
        return scalar_value(self.coefficient, dps)


def trans_series_term(spec, n: int, J: int, L: int, K: int, cache=None) -> TransSeriesTerm:
    """Single coefficient ``Xi_{J,L,K}`` for J <= 2."""
    spec = _spec(spec)
    TransSeriesTerm(J, L, K, 0)  # validates the (J, L) bound
    if J == 0:
        rho = _rho_int(spec)
        if K % rho:
            return TransSeriesTerm(0, 0, K, Fraction(0))
        kk = K // rho
        c = rspt_coeffs(spec, n, kk, cache)[kk]
        return TransSeriesTerm(0, 0, K, c * (-1) ** kk if spec.even else c)
    if J == 1:
        ws = one_instanton_width_series(spec, n, K, cache)
        return TransSeriesTerm(1, 0, K, -ws.coeffs[K])
    if J == 2:
        if K != 0:
            raise ValueError("two-instanton coefficients are implemented at K = 0 only")
        return {t.L: t for t in two_instanton_terms(spec, n)}[L]
    raise ValueError("trans-series terms with J >= 3 are not implemented")


def two_instanton_terms(spec, n: int) -> list[TransSeriesTerm]:
    """K = 0 coefficients of the J = 2 sector.

    Iterating ``delta = x (1 + delta (Lambda - psi(n+1)))`` to second order,
    with ``Lambda`` the logarithm of the coupling factor, gives
    ``Xi_{2,1,0} = 1`` and ``Xi_{2,0,0} = -psi(n+1) = gamma_E - H_n``.
    """
    _spec(spec)
    harmonic = sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))
    return [
        TransSeriesTerm(2, 0, 0, ConstExpr.named("euler_gamma") - harmonic),
        TransSeriesTerm(2, 1, 0, Fraction(1)),
    ]


# ---------------------------------------------------------------------------
# Quantization condition
# ---------------------------------------------------------------------------


class Residual(NamedTuple):
    value: object  # mpc, or None at a pole
    perturbative_root: bool
    B: object


def quantization_residual(
    m: int,
    E,
    g,
    b_order: int = 1,
    a_truncation: int | None = None,
    dps: int = DEFAULT_DPS,
    pole_tol=None,
    bfun: BFunction | None = None,
) -> Residual:
    """Left-hand side of the generalized quantization condition minus one."""
    spec = _spec(m)
    fix = a_fixture(spec.m, dps)
    bfun = bfun or b_function(spec, b_order)
    with mpmath.workdps(dps):
        E = mpmath.mpmathify(E)
        g = mpmath.mpf(g)
        y = -g if spec.even else g
        if not y > 0:
            raise ValueError("quantization condition is evaluated in the tunneling regime")
        B = bfun.at(E, g, dps)
        z = mpmath.mpf(1) / 2 - B
        tol = pole_tol if pole_tol is not None else mpmath.mpf(10) ** (-(dps - 5))
        nearest = mpmath.nint(mpmath.re(z))
        if nearest <= 0 and abs(z - nearest) < tol:
            return Residual(None, True, B)
        s = y ** (1 / _mp(spec.rho))
        norm = 2 * mpmath.pi if spec.even else 8 * mpmath.pi
        A = fix.value(E, y, dps, a_truncation)
        log_lhs = (
            mpmath.loggamma(z)
            + 1j * mpmath.pi * B
            + B * mpmath.log(2 * prefactor_constant(spec.m) / s)
            - A
            - mpmath.log(norm) / 2
        )
        return Residual(mpmath.exp(log_lhs) - 1, False, B)
