"""
Instanton profiles, Euclidean actions and leading-order decay widths.

In scaled variables the Euclidean Lagrangian is ``1/2 x'^2 + 1/2 x^2 - x^m``
for both parities. Its bounce through the barrier is

    x(t) = (1 + cosh((m-2)(t - t0)))^(-1/(m-2))

and its action is ``A(m) = 2^(2/(m-2)) B(m/(m-2), m/(m-2))``.

Physical coordinates: ``q = +-(-g)^(-1/(N-2)) x`` for even degree (g < 0) and
``q = -g^(-1/(2(M-2))) x`` for odd degree (g > 0); both make the action
``A(m) / |g|^(1/rho)`` with ``rho = (N-2)/2`` or ``M-2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .algebra import DEFAULT_DPS
from .rspt import OscillatorSpec

__all__ = [
    "ActionPair",
    "InstantonProfile",
    "QuadratureError",
    "RegimeError",
    "action_closed_form",
    "action_numeric",
    "action_pair",
    "prefactor_constant",
    "profile_eval",
    "scaled_potential",
    "width_leading",
]


class RegimeError(ValueError):
    """Coupling sign outside the tunneling regime of the oscillator."""


class QuadratureError(RuntimeError):
    pass


def _spec(m) -> OscillatorSpec:
    return m if isinstance(m, OscillatorSpec) else OscillatorSpec(m)


def check_regime(spec: OscillatorSpec, g) -> None:
    if spec.even and not g < 0:
        raise RegimeError(f"even degree {spec.m}: instantons exist for g < 0, got g = {g}")
    if not spec.even and not g > 0:
        raise RegimeError(f"odd degree {spec.m}: instantons exist for g > 0, got g = {g}")


@dataclass(frozen=True)
class InstantonProfile:
    m: int
    t0: float = 0.0
    branch: int = 1

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.branch == -1 and self.m % 2:
            raise ValueError("odd degree has a single instanton (branch +1)")

    def _offset(self, t):
        return mpmath.mpf(t) - mpmath.mpf(self.t0)

    def scaled(self, t):
        """Scaled solution ``x(t)`` (positive, peak ``2^(-1/(m-2))`` at ``t0``)."""
        r = self.m - 2
        return (1 + mpmath.cosh(r * self._offset(t))) ** (mpmath.mpf(-1) / r)

    def velocity(self, t):
        """Analytic ``dx/dt``."""
        r = self.m - 2
        s = r * self._offset(t)
        return -mpmath.sinh(s) * (1 + mpmath.cosh(s)) ** (mpmath.mpf(-1) / r - 1)

    def acceleration(self, t):
        r = self.m - 2
        s = r * self._offset(t)
        u = 1 + mpmath.cosh(s)
        a = mpmath.mpf(-1) / r
        return -r * (mpmath.cosh(s) * u ** (a - 1) + (a - 1) * mpmath.sinh(s) ** 2 * u ** (a - 2))


def profile_eval(profile: InstantonProfile, t, g):
    """Classical path ``q_cl(t)`` at coupling ``g`` in physical coordinates."""
    spec = _spec(profile.m)
    check_regime(spec, g)
    g = mpmath.mpf(g)
    x = profile.scaled(t)
    if spec.even:
        return profile.branch * (-g) ** (mpmath.mpf(-1) / (spec.m - 2)) * x
    return -(g ** (mpmath.mpf(-1) / (2 * (spec.m - 2)))) * x


def scaled_potential(x, m: int = 3):
    """``U(x) = x^m - x^2/2``, the inverted scaled potential traversed by the bounce."""
    return x**m - x * x / 2


def prefactor_constant(m: int):
    """``C(m) = 2^(2/(m-2))``."""
    return mpmath.mpf(2) ** (mpmath.mpf(2) / (m - 2))


def action_closed_form(m: int, dps: int = DEFAULT_DPS):
    """``A(m) = 2^(2/(m-2)) B(m/(m-2), m/(m-2))``."""
    if m < 3:
        raise ValueError("degree must be >= 3")
    with mpmath.workdps(dps):
        x = mpmath.mpf(m) / (m - 2)
        return +(prefactor_constant(m) * mpmath.beta(x, x))


def action_numeric(m: int, dps: int = DEFAULT_DPS, t0=0, branch: int = 1, tol=None):
    """Action of the bounce by tanh-sinh quadrature of the Euclidean Lagrangian.

    The window ``[t0 - T, t0 + T]`` is chosen so the neglected tails, bounded
    by ``2^(2/(m-2)) e^(-2T)``, sit below ``tol``.
    """
    if m < 3:
        raise ValueError("degree must be >= 3")
    prof = InstantonProfile(m, t0, branch)
    with mpmath.workdps(dps + 10):
        if tol is None:
            tol = mpmath.mpf(10) ** (-dps)
        c = prefactor_constant(m)
        T = (mpmath.log(c / tol)) / 2 + 1

        def lagrangian(t):
            x = branch * prof.scaled(t)
            v = branch * prof.velocity(t)
            return v * v / 2 + x * x / 2 - x**m

        t0 = mpmath.mpf(t0)
        val, err = mpmath.quad(lagrangian, [t0 - T, t0, t0 + T], error=True)
        if err > tol * 10 ** 6:
            raise QuadratureError(f"action quadrature for m={m} reached only {mpmath.nstr(err, 5)}")
    with mpmath.workdps(dps):
        return +val


@dataclass(frozen=True)
class ActionPair:
    m: int
    closed_form: object
    numeric: object
    C: object = field(default=None)

    @property
    def relative_difference(self):
        return abs(self.numeric - self.closed_form) / self.closed_form


def action_pair(m: int, dps: int = DEFAULT_DPS) -> ActionPair:
    return ActionPair(m, action_closed_form(m, dps), action_numeric(m, dps), prefactor_constant(m))


def width_leading(spec, n: int, g, dps: int = DEFAULT_DPS):
    """Leading imaginary part of the resonance energy (negative).

    even:  -(1/(n! sqrt(2 pi))) (2C/(-g)^(2/(N-2)))^(n+1/2) exp(-A/(-g)^(2/(N-2)))
    odd:   -(1/(2 n! sqrt(2 pi))) (2C/g^(1/(M-2)))^(n+1/2) exp(-A/g^(1/(M-2)))
    """
    spec = _spec(spec)
    check_regime(spec, g)
    with mpmath.workdps(dps):
        g = mpmath.mpf(g)
        m = spec.m
        s = abs(g) ** (mpmath.mpf(spec.rho.denominator) / spec.rho.numerator)
        norm = mpmath.factorial(n) * mpmath.sqrt(2 * mpmath.pi)
        if not spec.even:
            norm *= 2
        val = -((2 * prefactor_constant(m) / s) ** (n + mpmath.mpf(1) / 2)) * mpmath.exp(
            -action_closed_form(m, dps) / s
        ) / norm
        return +val
