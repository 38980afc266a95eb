"""
Exact Rayleigh-Schroedinger coefficients for

    H = -1/2 d^2/dq^2 + 1/2 q^2 + lam * q^m

with ``lam = g`` for even ``m`` and ``lam = sqrt(g)`` for odd ``m``.

The wavefunction is written as ``P(q) exp(-q^2/2)`` with ``P`` a polynomial
in the plain power basis, so every quantity stays rational. Order by order
in ``lam`` the polynomial equation is triangular and is solved from the top
degree downwards; the coefficient of ``q^n`` fixes the energy correction
(intermediate normalization: ``P_k`` has no ``q^n`` component for k >= 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .algebra import ESeries, Poly

__all__ = [
    "CoeffTable",
    "NuPolyTable",
    "OscillatorSpec",
    "degree_bound",
    "lagrange_interpolate",
    "rspt_coeffs",
    "rspt_nu_polys",
]


@dataclass(frozen=True)
class OscillatorSpec:
    """Degree ``m`` oscillator in the ``+g q^m`` (even) / ``+sqrt(g) q^m`` (odd) convention."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise ValueError(f"degree must be an integer >= 3, got {self.m}")

    @property
    def even(self) -> bool:
        return self.m % 2 == 0

    @property
    def parity(self) -> str:
        return "even" if self.even else "odd"

    @property
    def convention(self) -> str:
        return f"+g*q^{self.m}" if self.even else f"+sqrt(g)*q^{self.m}"

    @property
    def rho(self) -> Fraction:
        """Power of ``g`` paired with the instanton action: ``A / g^(1/rho)``."""
        return Fraction(self.m - 2, 2) if self.even else Fraction(self.m - 2)

    @property
    def lattice_step(self) -> Fraction:
        """Exponent step of the fractional trans-series: 2/(N-2) or 1/(M-2)."""
        return 1 / self.rho


@dataclass(frozen=True)
class CoeffTable:
    spec: OscillatorSpec
    n: int
    coeffs: tuple  # Fractions, K = 0..Kmax

    @property
    def kmax(self) -> int:
        return len(self.coeffs) - 1

    def series(self) -> ESeries:
        return ESeries.from_list(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True)
class NuPolyTable:
    spec: OscillatorSpec
    coeffs: tuple  # Poly in nu, K = 0..Kmax

    def level_map(self) -> ESeries:
        """``E(nu, g) = sum_K P_K(nu) g^K`` as a series with Poly coefficients."""
        return ESeries.from_list(self.coeffs)

    def at_level(self, n: int) -> list[Fraction]:
        nu = Fraction(2 * n + 1, 2)
        return [p(nu) for p in self.coeffs]


def _ground_polynomial(n: int) -> list:
    # L P = 0 with a_n = 1, L q^j = (j - n) q^j - j(j-1)/2 q^(j-2)
    a = [mpq(0)] * (n + 1)
    a[n] = mpq(1)
    for j in range(n - 2, -1, -2):
        a[j] = mpq((j + 2) * (j + 1), 2 * (j - n)) * a[j + 2]
    return a


def _lambda_series(m: int, n: int, order: int) -> list:
    """Energy corrections e_0..e_order in powers of the coupling in front of q^m."""
    polys = [_ground_polynomial(n)]
    e = [mpq(2 * n + 1, 2)]
    half = [mpq(j * (j - 1), 2) for j in range(n + m * order + 3)]
    for k in range(1, order + 1):
        deg = n + m * k
        rhs = [mpq(0)] * (deg + 1)
        prev = polys[k - 1]
        for j, c in enumerate(prev):
            if c:
                rhs[j + m] -= c
        for i in range(1, k):
            ei = e[i]
            if not ei:
                continue
            for j, c in enumerate(polys[k - i]):
                if c:
                    rhs[j] += ei * c
        a = [mpq(0)] * (deg + 3)
        for j in range(deg, n, -1):
            a[j] = (rhs[j] + half[j + 2] * a[j + 2]) / (j - n)
        ek = -half[n + 2] * a[n + 2] - rhs[n]
        e.append(ek)
        # the e_k * P_0 term enters below degree n
        p0 = polys[0]
        for j in range(n - 1, -1, -1):
            r = rhs[j] + ek * p0[j]
            a[j] = (r + half[j + 2] * a[j + 2]) / (j - n)
        polys.append(a[: deg + 1])
    return e


def rspt_coeffs(spec: OscillatorSpec | int, n: int, kmax: int, cache=None) -> CoeffTable:
    """Exact coefficients ``c_K`` of ``E_n(g) = sum_K c_K g^K`` for K = 0..kmax.

    For odd degree the recursion runs in ``sqrt(g)``; the odd orders must
    cancel exactly and an ``ArithmeticError`` is raised otherwise.
    """
    if isinstance(spec, int):
        spec = OscillatorSpec(spec)
    if n < 0 or kmax < 0:
        raise ValueError("level and order must be non-negative")
    if cache is not None:
        hit = cache.load(spec.m, n, kmax)
        if hit is not None:
            return CoeffTable(spec, n, tuple(hit))
    if spec.even:
        e = _lambda_series(spec.m, n, kmax)
        coeffs = e
    else:
        e = _lambda_series(spec.m, n, 2 * kmax)
        bad = [k for k in range(1, 2 * kmax + 1, 2) if e[k] != 0]
        if bad:
            raise ArithmeticError(f"odd powers of sqrt(g) failed to cancel at orders {bad}")
        coeffs = e[::2]
    out = tuple(Fraction(int(c.numerator), int(c.denominator)) for c in coeffs)
    if cache is not None:
        cache.store(spec.m, n, kmax, out)
    return CoeffTable(spec, n, out)


def degree_bound(spec: OscillatorSpec, k: int) -> int:
    """Degree in ``nu`` of the K-th coefficient polynomial.

    Empirically ``K*(m-2)/2 + 1`` (even) and ``K*(m-2) + 1`` (odd) for K >= 1;
    every use is checked at an extra level.
    """
    if k == 0:
        return 1
    return k * (spec.m - 2) // 2 + 1 if spec.even else k * (spec.m - 2) + 1


def lagrange_interpolate(xs, ys, symbol: str = "nu") -> Poly:
    """Exact interpolating polynomial through ``(xs[i], ys[i])``."""
    result = Poly((), symbol)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = Poly((1,), symbol)
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Poly((-xj, 1), symbol)
                denom *= xi - xj
        result = result + basis * (Fraction(yi) / denom)
    return result


def rspt_nu_polys(spec: OscillatorSpec | int, kmax: int, cache=None) -> NuPolyTable:
    """Coefficients as exact polynomials ``P_K(nu)``, ``nu = n + 1/2``."""
    if isinstance(spec, int):
        spec = OscillatorSpec(spec)
    top = degree_bound(spec, kmax)
    levels = range(top + 2)
    tables = [rspt_coeffs(spec, n, kmax, cache).coeffs for n in levels]
    polys = []
    for k in range(kmax + 1):
        d = degree_bound(spec, k)
        xs = [Fraction(2 * n + 1, 2) for n in range(d + 1)]
        p = lagrange_interpolate(xs, [tables[n][k] for n in range(d + 1)])
        check = d + 1
        if p(Fraction(2 * check + 1, 2)) != tables[check][k]:
            raise ArithmeticError(
                f"degree bound {d} too small for K={k} at m={spec.m}: interpolation fails at n={check}"
            )
        polys.append(p)
    return NuPolyTable(spec, tuple(polys))
