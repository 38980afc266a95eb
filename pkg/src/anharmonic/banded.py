"""
Banded LU with partial pivoting and shifted inverse iteration for complex
symmetric matrices, in mpmath arithmetic.

Rows are stored sparsely as ``{column: value}`` dicts; with ``kl`` sub- and
``ku`` super-diagonals the factor keeps at most ``kl + ku`` entries right of
the diagonal, so factorization costs ``O(n * kl * (kl + ku))``.
"""
from __future__ import annotations

import mpmath

__all__ = ["BandedLU", "banded_matvec", "inverse_iteration", "NoConvergence"]


class NoConvergence(RuntimeError):
    pass


class BandedLU:
    """LU factorization ``P A = L U`` of a banded matrix given as row dicts."""

    def __init__(self, rows: list[dict], kl: int, shift=0):
        n = len(rows)
        work = [dict(r) for r in rows]
        if shift:
            for i in range(n):
                work[i][i] = work[i].get(i, 0) - shift
        perm = list(range(n))
        lower: list[dict] = [{} for _ in range(n)]
        for k in range(n):
            last = min(k + kl, n - 1)
            p = max(range(k, last + 1), key=lambda i: abs(work[i].get(k, 0)))
            if p != k:
                work[k], work[p] = work[p], work[k]
                lower[k], lower[p] = lower[p], lower[k]
                perm[k], perm[p] = perm[p], perm[k]
            pivot_row = work[k]
            piv = pivot_row.get(k, 0)
            if piv == 0:
                raise ZeroDivisionError(f"singular banded matrix at column {k}")
            tail = [(j, v) for j, v in pivot_row.items() if j > k]
            for i in range(k + 1, last + 1):
                row = work[i]
                a = row.pop(k, 0)
                if a == 0:
                    continue
                f = a / piv
                lower[i][k] = f
                for j, v in tail:
                    row[j] = row.get(j, 0) - f * v
        self.n = n
        self.upper = work
        self.lower = lower
        self.perm = perm

    def solve(self, b: list) -> list:
        n = self.n
        y = [b[self.perm[i]] for i in range(n)]
        for i in range(n):
            acc = y[i]
            for j, f in self.lower[i].items():
                acc -= f * y[j]
            y[i] = acc
        x = [0] * n
        for i in range(n - 1, -1, -1):
            row = self.upper[i]
            acc = y[i]
            for j, v in row.items():
                if j > i:
                    acc -= v * x[j]
            x[i] = acc / row[i]
        return x


def banded_matvec(rows: list[dict], x: list) -> list:
    return [sum((v * x[j] for j, v in r.items()), mpmath.mpc(0)) for r in rows]


def _bilinear(x, y):
    return mpmath.fsum(a * b for a, b in zip(x, y))


def inverse_iteration(
    rows: list[dict], kl: int, shift, tol=None, maxiter: int = 40, start=None, warmup: int = 8
):
    """Eigenpair of a complex symmetric banded matrix nearest ``shift``.

    A few plain inverse-iteration steps at the fixed shift first pull the
    vector toward the eigenvalue closest to ``shift``. After that the shift is
    refined with the bilinear Rayleigh quotient ``x^T A x / x^T x`` and the
    factorization is redone at each step, which converges cubically near a
    simple eigenvalue. Returns ``(eigenvalue, vector)``.
    """
    n = len(rows)
    if tol is None:
        tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 6))
    x = start or [mpmath.mpc(1) / (i + 1) for i in range(n)]
    sigma = mpmath.mpc(shift)

    def step(lu, x):
        x = lu.solve(x)
        s = max(abs(v) for v in x)
        return [v / s for v in x]

    def rayleigh(x):
        return _bilinear(x, banded_matvec(rows, x)) / _bilinear(x, x)

    try:
        lu = BandedLU(rows, kl, sigma)
    except ZeroDivisionError:
        return sigma, x
    lam_old = None
    for _ in range(warmup):
        x = step(lu, x)
        lam = rayleigh(x)
        if lam_old is not None and abs(lam - lam_old) <= mpmath.mpf(10) ** -3 * max(1, abs(lam)):
            break
        lam_old = lam
    lam_old = None
    for _ in range(maxiter):
        for _inner in range(2):
            x = step(lu, x)
        lam = rayleigh(x)
        if lam_old is not None and abs(lam - lam_old) <= tol * max(1, abs(lam)):
            return lam, x
        lam_old = lam
        try:
            lu = BandedLU(rows, kl, lam)
        except ZeroDivisionError:
            # shift landed on the eigenvalue to working precision
            return lam, x
    raise NoConvergence(f"inverse iteration stalled near {mpmath.nstr(lam_old, 15)}")
