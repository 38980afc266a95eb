"""
Large-order growth of perturbative coefficients.

The dispersion relation turns the width on the cut into coefficient
asymptotics. Writing the width as

    Im E(y) = -P y^(-(n+1/2)/rho) exp(-A / y^(1/rho)) sum_k c_k y^(k/rho)

each term contributes the moment

    (1/pi) int_0^oo y^((k-n-1/2)/rho) exp(-A/y^(1/rho)) y^(-K-1) dy
        = (rho/pi) Gamma(rho K + n + 1/2 - k) A^(-(rho K + n + 1/2 - k))

and the K-th coefficient is ``sign_K * P * sum_k c_k * moment_k``, with
``sign_K = (-1)^(K+1)`` on the negative cut (even degree) and ``-1`` for odd
degree. Everything is assembled from log-Gamma so that arguments in the
hundreds stay harmless.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .algebra import DEFAULT_DPS, scalar_value
from .instanton import QuadratureError, action_closed_form
from .quantize import WidthSeries, one_instanton_width_series
from .rspt import CoeffTable, OscillatorSpec

__all__ = [
    "AsymptoticPredictor",
    "RatioFit",
    "dispersion_moment",
    "leading_even",
    "leading_odd",
    "lo7_constant",
    "moment_closed_form",
    "predictor",
    "ratio_diagnostics",
    "subleading_from_width",
]


def _mp(q):
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpmathify(q)


def _spec(m) -> OscillatorSpec:
    return m if isinstance(m, OscillatorSpec) else OscillatorSpec(m)


def leading_even(N: int, n: int, K: int, dps: int = DEFAULT_DPS):
    """Leading growth of ``E_{n,K}`` for the even oscillator of degree ``N``."""
    if N % 2 or N < 4:
        raise ValueError("N must be even and >= 4")
    with mpmath.workdps(dps + 10):
        x = mpmath.mpf(N) / (N - 2)
        arg = mpmath.mpf(N - 2) / 2 * K + n + mpmath.mpf(1) / 2
        log_mag = (
            mpmath.log(N - 2)
            - mpmath.mpf(3) / 2 * mpmath.log(mpmath.pi)
            - mpmath.loggamma(n + 1)
            - (K + 1 - n) * mpmath.log(2)
            + mpmath.loggamma(arg)
            - arg * mpmath.log(mpmath.beta(x, x))
        )
        val = (-1) ** (K + 1) * mpmath.exp(log_mag)
    with mpmath.workdps(dps):
        return +val


def leading_odd(M: int, n: int, K: int, dps: int = DEFAULT_DPS):
    """Leading growth of ``eps_{n,K}`` for the odd oscillator of degree ``M`` (negative)."""
    if M % 2 == 0 or M < 3:
        raise ValueError("M must be odd and >= 3")
    with mpmath.workdps(dps + 10):
        x = mpmath.mpf(M) / (M - 2)
        arg = mpmath.mpf(M - 2) * K + n + mpmath.mpf(1) / 2
        log_mag = (
            mpmath.log(M - 2)
            - mpmath.mpf(3) / 2 * mpmath.log(mpmath.pi)
            - mpmath.loggamma(n + 1)
            - (2 * K + 1 - n) * mpmath.log(2)
            + mpmath.loggamma(arg)
            - arg * mpmath.log(mpmath.beta(x, x))
        )
        val = -mpmath.exp(log_mag)
    with mpmath.workdps(dps):
        return +val


def lo7_constant(dps: int = DEFAULT_DPS):
    """``-(2^(1/2) 17 pi) / (5^(1/4) phi^(3/2) 450)``, the printed 1/K coefficient for degree 7."""
    with mpmath.workdps(dps):
        phi = (1 + mpmath.sqrt(5)) / 2
        return -(mpmath.sqrt(2) * 17 * mpmath.pi) / (mpmath.mpf(5) ** (mpmath.mpf(1) / 4) * phi ** (mpmath.mpf(3) / 2) * 450)


def _sign(spec: OscillatorSpec, K: int) -> int:
    return (-1) ** (K + 1) if spec.even else -1


def moment_closed_form(spec, n: int, K: int, k: int = 0, dps: int = DEFAULT_DPS):
    """``(rho/pi) Gamma(rho K + n + 1/2 - k) A^(-(rho K + n + 1/2 - k))``, positive."""
    spec = _spec(spec)
    with mpmath.workdps(dps + 10):
        rho = _mp(spec.rho)
        a = action_closed_form(spec.m, dps + 10)
        arg = rho * K + n + mpmath.mpf(1) / 2 - k
        val = rho / mpmath.pi * mpmath.exp(mpmath.loggamma(arg) - arg * mpmath.log(a))
    with mpmath.workdps(dps):
        return +val


@dataclass
class AsymptoticPredictor:
    """``c_K`` prediction from a width series truncated at ``depth``."""

    spec: OscillatorSpec
    n: int
    width: WidthSeries
    depth: int = 0
    dps: int = DEFAULT_DPS
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.depth > self.width.order:
            raise ValueError(f"depth {self.depth} exceeds the width series order {self.width.order}")

    def brace(self, K: int):
        """Relative correction ``sum_k c_k Gamma(x - k) A^k / Gamma(x)``, ``x = rho K + n + 1/2``."""
        with mpmath.workdps(self.dps + 10):
            rho = _mp(self.spec.rho)
            x = rho * K + self.n + mpmath.mpf(1) / 2
            a = self.width.action
            total = mpmath.mpf(0)
            for k in range(self.depth + 1):
                c = scalar_value(self.width.coeffs[k], self.dps + 10)
                total += c * mpmath.exp(mpmath.loggamma(x - k) - mpmath.loggamma(x)) * a**k
            return total

    def leading(self, K: int):
        with mpmath.workdps(self.dps + 10):
            val = _sign(self.spec, K) * self.width.prefactor(self.dps + 10) * moment_closed_form(
                self.spec, self.n, K, 0, self.dps + 10
            )
        with mpmath.workdps(self.dps):
            return +val

    def __call__(self, K: int):
        if K < 1:
            raise ValueError("K must be >= 1")
        if K not in self._cache:
            with mpmath.workdps(self.dps + 10):
                v = self.leading(K) * self.brace(K)
            with mpmath.workdps(self.dps):
                self._cache[K] = +v
        return self._cache[K]

    def inverse_k_coefficient(self):
        """Coefficient ``a`` of the ``a/K`` term in the brace."""
        if self.depth < 1:
            return mpmath.mpf(0)
        with mpmath.workdps(self.dps):
            return scalar_value(self.width.coeffs[1], self.dps) * self.width.action / _mp(self.spec.rho)


def predictor(spec, n: int, depth: int = 0, dps: int = DEFAULT_DPS) -> AsymptoticPredictor:
    spec = _spec(spec)
    return AsymptoticPredictor(spec, n, one_instanton_width_series(spec, n, depth), depth, dps)


def subleading_from_width(spec, n: int, width: WidthSeries, K: int, depth: int, dps: int = DEFAULT_DPS):
    """K-th coefficient predicted by the first ``depth`` width corrections."""
    spec = _spec(spec)
    if depth > width.order:
        raise ValueError(f"depth {depth} exceeds the width series order {width.order}")
    return AsymptoticPredictor(spec, n, width, depth, dps)(K)


def dispersion_moment(spec, n: int, K: int, width: WidthSeries | None = None, dps: int = DEFAULT_DPS, tol=None):
    """K-th coefficient by numerical quadrature of the dispersion integral.

    Integrates ``(1/pi) Im E(y) y^(-K-1)`` over the cut with the width series
    (leading term by default), splitting the interval around the peak of the
    integrand. Raises ``QuadratureError`` when the error estimate exceeds ``tol``.
    """
    spec = _spec(spec)
    if K < 1:
        raise ValueError("K must be >= 1")
    width = width or one_instanton_width_series(spec, n, 0)
    with mpmath.workdps(dps + 10):
        tol = mpmath.mpf(10) ** (-(dps - 5)) if tol is None else mpmath.mpf(tol)
        rho = _mp(spec.rho)
        a = width.action
        # peak of y^(-(n+1/2)/rho - K - 1) exp(-a y^(-1/rho))
        p = (n + mpmath.mpf(1) / 2) / rho + K + 1
        y_peak = (a / (rho * p)) ** rho

        def integrand(y):
            if y == 0:
                return mpmath.mpf(0)
            return width.value(y, dps + 10) * y ** (-K - 1)

        pts = [0] + [y_peak * f for f in (mpmath.mpf(1) / 8, mpmath.mpf(1) / 2, 1, 2, 8, 64)] + [mpmath.inf]
        val, err = mpmath.quad(integrand, pts, error=True, maxdegree=10)
        val = _sign(spec, K) * -val / mpmath.pi
        if err > tol * abs(val):
            raise QuadratureError(f"dispersion moment K={K}: achieved relative error {mpmath.nstr(err / abs(val), 5)}")
    with mpmath.workdps(dps):
        return +val


@dataclass(frozen=True)
class RatioFit:
    ratios: list  # (K, c_K / predictor(K)) as floats
    window: tuple
    a: float
    a_err: float
    params: tuple
    terms: int

    def top_decade_deviation(self) -> float:
        kmax = self.ratios[-1][0]
        return max(abs(r - 1) for K, r in self.ratios if K > kmax - 10)


def ratio_diagnostics(
    table: CoeffTable,
    pred,
    window: tuple | None = None,
    terms: int = 2,
    dps: int = DEFAULT_DPS,
) -> RatioFit:
    """Ratios ``c_K / predictor(K)`` and a weighted fit ``ratio - 1 = a/K + b/K^2 + ...``.

    The default window is ``[Kmax/2, Kmax]`` with weights ``K^2``; ``a_err`` is
    the least-squares standard error of ``a``.
    """
    if len(table) < 10:
        raise ValueError("ratio diagnostics need at least 10 coefficients")
    kmax = table.kmax
    ratios = []
    with mpmath.workdps(dps):
        for K in range(1, kmax + 1):
            c = table[K]
            r = (mpmath.mpf(c.numerator) / c.denominator) / pred(K)
            ratios.append((K, float(r)))
    lo, hi = window or (kmax // 2, kmax)
    ks = np.array([K for K, _ in ratios if lo <= K <= hi], dtype=float)
    ys = np.array([r - 1 for K, r in ratios if lo <= K <= hi])
    if len(ks) <= terms:
        raise ValueError("fit window too small for the requested number of terms")
    X = np.stack([ks ** -(j + 1) for j in range(terms)], axis=1)
    w = ks**2
    sw = np.sqrt(w)
    Xw, yw = X * sw[:, None], ys * sw
    params, *_ = np.linalg.lstsq(Xw, yw, rcond=None)
    resid = yw - Xw @ params
    dof = max(1, len(ks) - terms)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(Xw.T @ Xw)
    return RatioFit(ratios, (lo, hi), float(params[0]), float(np.sqrt(cov[0, 0])), tuple(float(p) for p in params), terms)
