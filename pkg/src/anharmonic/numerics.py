"""
Numerical ground truth: complex-scaling resonances and Borel-Pade sums.

Complex scaling rotates ``q -> q e^(i theta)``, so in the harmonic oscillator
basis

    H(theta) = e^(-2i theta) p^2/2 + e^(2i theta) q^2/2 + lam e^(i m theta) q^m

which is complex symmetric and banded with half-bandwidth ``max(m, 2)``.
Matrix elements of ``q^m`` are taken from the untruncated operator:
with ``|j)) = (a^+)^j |0>``, ``(a + a^+)^m |j)) = sum_i N_ij |i))`` has integer
``N_ij`` and ``<i|q^m|j> = 2^(-m/2) N_ij sqrt(i!/j!)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import mpmath

from .algebra import DEFAULT_DPS
from .banded import BandedLU, NoConvergence, inverse_iteration
from .instanton import width_leading
from .rspt import OscillatorSpec, rspt_coeffs

log = logging.getLogger(__name__)

__all__ = [
    "BorelSum",
    "PlateauError",
    "ResonanceResult",
    "ScaledHamiltonian",
    "borel_pade",
    "build_hamiltonian",
    "default_thetas",
    "resonance",
    "resonance_scan",
    "seed_energy",
]

DEFAULT_DIMS = (200, 300, 450)
DEFLECTION = 0.05  # radians, applied when a Pade pole sits on the Laplace ray


class PlateauError(RuntimeError):
    """No stable (theta, dim) region; ``table`` holds the raw eigenvalues."""

    def __init__(self, msg, table):
        super().__init__(msg)
        self.table = table


def _spec(m) -> OscillatorSpec:
    return m if isinstance(m, OscillatorSpec) else OscillatorSpec(m)


def coupling_factor(spec: OscillatorSpec, g):
    """Coefficient in front of ``q^m``: ``g`` (even) or principal ``sqrt(g)`` (odd)."""
    g = mpmath.mpmathify(g)
    return g if spec.even else mpmath.sqrt(g)


def _power_integers(m: int, j: int) -> dict[int, int]:
    vec = {j: 1}
    for _ in range(m):
        nxt: dict[int, int] = {}
        for k, c in vec.items():
            nxt[k + 1] = nxt.get(k + 1, 0) + c
            if k:
                nxt[k - 1] = nxt.get(k - 1, 0) + k * c
        vec = nxt
    return vec


def _sqrt_factorial_ratio(i: int, j: int):
    prod = 1
    for k in range(min(i, j) + 1, max(i, j) + 1):
        prod *= k
    r = mpmath.sqrt(prod)
    return r if i >= j else 1 / r


@dataclass
class ScaledHamiltonian:
    spec: OscillatorSpec
    g: object
    theta: object
    dim: int
    rows: list = field(repr=False)
    dps: int = DEFAULT_DPS

    @property
    def bandwidth(self) -> int:
        return max(self.spec.m, 2)

    def dense(self):
        a = mpmath.zeros(self.dim)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                a[i, j] = v
        return a


def default_thetas(m: int, count: int = 8) -> list:
    width = mpmath.pi / (2 * (m + 2))
    return [mpmath.mpf("0.1") + width * k / (count - 1) for k in range(count)]


def build_hamiltonian(spec, g, theta, dim: int, dps: int = DEFAULT_DPS) -> ScaledHamiltonian:
    spec = _spec(spec)
    m = spec.m
    if dim < 16:
        raise ValueError("basis dimension must be at least 16")
    with mpmath.workdps(dps):
        theta = mpmath.mpf(theta)
        if not 0 <= theta < mpmath.pi / (m + 2):
            raise ValueError(f"rotation angle {theta} outside [0, pi/(m+2)) for degree {m}")
        c2 = mpmath.cos(2 * theta)
        s2 = mpmath.sin(2 * theta)
        lam = coupling_factor(spec, g) * mpmath.expjpi(m * theta / mpmath.pi) * mpmath.mpf(2) ** (-mpmath.mpf(m) / 2)
        rows: list[dict] = [dict() for _ in range(dim)]
        for j in range(dim):
            rows[j][j] = mpmath.mpc((j + mpmath.mpf(1) / 2) * c2, 0)
            if j + 2 < dim:
                off = mpmath.mpc(0, s2 * mpmath.sqrt((j + 1) * (j + 2)) / 2)
                rows[j][j + 2] = off
                rows[j + 2][j] = off
        if lam != 0:
            for j in range(dim):
                for i, nij in _power_integers(m, j).items():
                    if i < dim and i >= j:
                        v = lam * nij * _sqrt_factorial_ratio(i, j)
                        rows[i][j] = rows[i].get(j, 0) + v
                        if i != j:
                            rows[j][i] = rows[j].get(i, 0) + v
    return ScaledHamiltonian(spec, g, theta, dim, rows, dps)


@dataclass(frozen=True)
class ResonanceResult:
    energy: object  # mpc
    theta: object
    dim: int
    dps: int
    error: object
    table: tuple = field(default=(), repr=False)

    @property
    def re(self):
        return self.energy.real

    @property
    def im(self):
        return self.energy.imag


def seed_energy(spec, n: int, g, dps: int = 20, kmax: int = 16):
    """Starting shift: Borel-Pade real part plus the leading width.

    Only needs to land in the basin of the wanted eigenvalue, so it runs at
    modest precision; inverse iteration does the rest.
    """
    spec = _spec(spec)
    table = rspt_coeffs(spec, n, kmax)
    beta = spec.rho
    with mpmath.workdps(dps):
        g = mpmath.mpf(g)
        try:
            direction = 0 if (spec.even and g > 0) else 0.3
            re = borel_pade(table.coeffs, beta, direction, g, dps).value.real
        except (ZeroDivisionError, ValueError, mpmath.libmp.NoConvergence):
            re = _optimal_truncation(table.coeffs, g)
        im = 0
        if (spec.even and g < 0) or (not spec.even and g > 0):
            im = width_leading(spec, n, g, dps)
        return mpmath.mpc(re, im)


def _optimal_truncation(coeffs, g):
    total = mpmath.mpf(0)
    best = None
    for k, c in enumerate(coeffs):
        term = mpmath.mpf(c.numerator) / c.denominator * g**k
        if best is not None and abs(term) > best:
            break
        total += term
        best = abs(term)
    return total


def _solve_cell(spec, g, theta, dim, dps, shift):
    h = build_hamiltonian(spec, g, theta, dim, dps)
    with mpmath.workdps(dps):
        lam, _ = inverse_iteration(h.rows, h.bandwidth, shift)
    return lam


def resonance(
    spec,
    n: int,
    g,
    thetas=None,
    dims=None,
    dps: int | None = None,
    seed=None,
    max_error=None,
) -> ResonanceResult:
    """Complex-scaled eigenvalue of level ``n`` with a (theta, dim) plateau estimate."""
    spec = _spec(spec)
    if g == 0:
        return ResonanceResult(mpmath.mpc(n + 0.5), 0, 0, dps or DEFAULT_DPS, mpmath.mpf(0))
    if dps is None:
        dps = DEFAULT_DPS
        resonant = (spec.even and g < 0) or (not spec.even and g > 0)
        if resonant and abs(width_leading(spec, n, g, 20)) < 1e-20:
            dps = 80
    thetas = default_thetas(spec.m) if thetas is None else [mpmath.mpf(t) for t in thetas]
    dims = list(DEFAULT_DIMS if dims is None else dims)
    with mpmath.workdps(dps):
        shift = seed if seed is not None else seed_energy(spec, n, g)
        table = []
        for dim in dims:
            row = []
            s = shift
            for th in thetas:
                try:
                    lam = _solve_cell(spec, g, th, dim, dps, s)
                except NoConvergence as exc:
                    log.warning("no convergence at theta=%s dim=%d: %s", th, dim, exc)
                    lam = None
                row.append(lam)
                if lam is not None:
                    s = lam
            table.append(row)
        best = None
        for a, dim in enumerate(dims):
            for b, th in enumerate(thetas):
                e = table[a][b]
                if e is None:
                    continue
                nbrs = [table[a][bb] for bb in (b - 1, b + 1) if 0 <= bb < len(thetas)]
                nbrs += [table[aa][b] for aa in (a - 1, a + 1) if 0 <= aa < len(dims)]
                nbrs = [x for x in nbrs if x is not None]
                if not nbrs:
                    continue
                var = max(abs(e - x) for x in nbrs)
                if best is None or var < best[0]:
                    best = (var, a, b)
        frozen = tuple(tuple(r) for r in table)
        if best is None:
            raise PlateauError("no converged grid cells", frozen)
        var, a, b = best
        if max_error is not None and var > max_error:
            raise PlateauError(f"plateau variation {mpmath.nstr(var, 5)} above {max_error}", frozen)
        return ResonanceResult(table[a][b], thetas[b], dims[a], dps, var, frozen)


def resonance_scan(spec, n: int, couplings, **kw) -> list[ResonanceResult]:
    out = []
    for g in couplings:
        out.append(resonance(spec, n, g, **kw))
    return out


# ---------------------------------------------------------------------------
# Borel-Pade
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BorelSum:
    coeffs: tuple
    beta: object
    direction: object
    pade_order: tuple
    value: object
    error: object
    deflected: object = 0


def _to_mpf(c):
    if hasattr(c, "numerator") and not isinstance(c, (mpmath.mpf, mpmath.mpc)):
        return mpmath.mpf(int(c.numerator)) / int(c.denominator)
    return mpmath.mpmathify(c)


def _laplace(p, q, beta, g, phi, dps):
    ray = mpmath.expj(phi)

    def integrand(r):
        u = r * ray
        t = g * u**beta
        return mpmath.exp(-u) * mpmath.polyval(p[::-1], t) / mpmath.polyval(q[::-1], t) * ray

    return mpmath.quad(integrand, [0, 1, 10, 40, mpmath.inf])


def _ray_poles(q, beta, g, phi):
    """Angles (in the u plane) of Pade poles, over all branches of t = g u^beta."""
    if len(q) < 2:
        return []
    angles = []
    for t in mpmath.polyroots(q[::-1], maxsteps=200, extraprec=200):
        w = mpmath.mpc(t) / g
        base = mpmath.arg(w)
        for k in range(int(mpmath.ceil(beta)) + 1):
            a = (base + 2 * mpmath.pi * k) / beta
            a = mpmath.atan2(mpmath.sin(a), mpmath.cos(a))
            angles.append(a)
    return angles


def borel_pade(coeffs, beta, direction, g, dps: int = DEFAULT_DPS, order=None) -> BorelSum:
    """Laplace-Borel sum of ``sum c_K g^K`` along the ray ``arg u = direction``.

    Borel transform ``b_K = c_K / Gamma(beta K + 1)``, Pade ``[L/M]`` in the
    Borel variable, then ``int_0^inf e^(-u) B(g u^beta) du`` on the ray. A
    Pade pole within ``DEFLECTION`` of the ray tilts the ray by ``DEFLECTION``
    away from it. The error compares against the ``[L-1/M]`` approximant.
    """
    coeffs = list(coeffs)
    if len(coeffs) < 12:
        raise ValueError("Borel-Pade needs at least 12 coefficients")
    beta = mpmath.mpf(beta.numerator) / beta.denominator if hasattr(beta, "denominator") else mpmath.mpf(beta)
    work = dps + 2 * len(coeffs)
    with mpmath.workdps(work):
        g = mpmath.mpmathify(g)
        phi = mpmath.mpf(direction)
        b = [_to_mpf(c) / mpmath.gamma(beta * k + 1) for k, c in enumerate(coeffs)]
        n = len(b) - 1
        if order is None:
            L = n // 2
            order = (L, n - L)
        L, M = order

        def one(LL, MM, phi):
            p, q = mpmath.pade(b[: LL + MM + 1], LL, MM)
            return p, q

        p, q = one(L, M, phi)
        deflected = mpmath.mpf(0)
        for a in _ray_poles(q, beta, g, phi):
            d = mpmath.atan2(mpmath.sin(a - phi), mpmath.cos(a - phi))
            if abs(d) < DEFLECTION:
                step = -DEFLECTION if d >= 0 else DEFLECTION
                deflected += step
                phi += step
                break
        val = _laplace(p, q, beta, g, phi, work)
        p2, q2 = one(L - 1, M, phi)
        val2 = _laplace(p2, q2, beta, g, phi, work)
    with mpmath.workdps(dps):
        return BorelSum(tuple(coeffs), beta, phi, (L, M), +val, abs(val - val2), deflected)
