"""
Exact-arithmetic kernel.

Rationals are :class:`fractions.Fraction`. :class:`Poly` is a univariate
polynomial with rational coefficients in a named symbol (``E`` or ``nu``).
:class:`ESeries` is a truncated formal series in a coupling ``g`` whose
exponents live on a lattice ``k * step`` (``step`` rational), with scalar or
:class:`Poly` coefficients.

Truncation bookkeeping follows the usual rule: a series with truncation ``T``
is known modulo ``g^(T*step)``; coefficients at indices ``>= T`` are never
stored or reported.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import NamedTuple

import mpmath

DEFAULT_DPS = 40
MIN_INDEX = -64

__all__ = [
    "ConstExpr",
    "DEFAULT_DPS",
    "ESeries",
    "Evaluation",
    "LatticeMismatch",
    "Poly",
    "eval_numeric",
    "exp_series",
    "series_arith",
    "series_compose",
    "series_reverse",
]


class LatticeMismatch(ValueError):
    """Series on different exponent lattices were combined."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # gmpy2.mpq and friends
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, ConstExpr))


# ---------------------------------------------------------------------------
# Named transcendental constants
# ---------------------------------------------------------------------------

CONSTANTS: dict = {
    "euler_gamma": lambda: +mpmath.euler,
    "pi": lambda: +mpmath.pi,
}


def register_constant(name: str, fn) -> None:
    """Make ``name`` usable inside :class:`ConstExpr`; ``fn()`` evaluates at the current precision."""
    CONSTANTS[name] = fn


class ConstExpr:
    """Rational linear combination of products of named real constants.

    ``ConstExpr({(): 1/2, ("euler_gamma",): 1})`` is ``1/2 + gamma``. Keys are
    sorted tuples of constant names (a monomial); the empty tuple is 1.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        clean = {}
        for mono, c in terms.items():
            mono = tuple(sorted(mono))
            c = _frac(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self.terms = {k: v for k, v in sorted(clean.items()) if v}

    @classmethod
    def named(cls, name: str, c=1) -> "ConstExpr":
        if name not in CONSTANTS:
            raise KeyError(f"unknown constant {name!r}")
        return cls({(name,): c})

    def simplify(self):
        if not self.terms:
            return Fraction(0)
        if list(self.terms) == [()]:
            return self.terms[()]
        return self

    def rational_part(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def _lift(self, other):
        if isinstance(other, ConstExpr):
            return other
        if _is_rational(other):
            return ConstExpr({(): other})
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ConstExpr(out).simplify()

    __radd__ = __add__

    def __neg__(self):
        return ConstExpr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(sorted(k1 + k2))
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return ConstExpr(out).simplify()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_rational(other):
            return NotImplemented
        return ConstExpr({k: v / other for k, v in self.terms.items()})

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def value(self, dps: int = DEFAULT_DPS):
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for mono, c in self.terms.items():
                t = mpmath.mpf(c.numerator) / c.denominator
                for name in mono:
                    t *= CONSTANTS[name]()
                total += t
            return +total

    def __repr__(self):
        parts = []
        for mono, c in self.terms.items():
            parts.append("*".join([str(c)] + list(mono)) if mono else str(c))
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> list:
        return [{"monomial": list(k), "coeff": _ratstr(v)} for k, v in self.terms.items()]


def scalar_value(c, dps: int = DEFAULT_DPS):
    """Numeric value of a Fraction or ConstExpr."""
    if isinstance(c, ConstExpr):
        return c.value(dps)
    c = _frac(c)
    with mpmath.workdps(dps):
        return mpmath.mpf(c.numerator) / c.denominator


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "symbol")

    def __init__(self, coeffs=(), symbol: str = "E"):
        c = [_frac(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)
        self.symbol = symbol

    @classmethod
    def var(cls, symbol: str = "E") -> "Poly":
        return cls((0, 1), symbol)

    @classmethod
    def const(cls, c, symbol: str = "E") -> "Poly":
        return cls((c,), symbol)

    @property
    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def _join(self, other: "Poly") -> str:
        if self.symbol == other.symbol or other.is_constant():
            return self.symbol
        if self.is_constant():
            return other.symbol
        raise ValueError(f"polynomial symbols differ: {self.symbol} vs {other.symbol}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if _is_rational(other):
            return Poly((other,), self.symbol)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        sym = self._join(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return Poly(out, sym)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.coeffs], self.symbol)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_rational(other):
            f = _frac(other)
            return Poly([a * f for a in self.coeffs], self.symbol)
        if not isinstance(other, Poly):
            return NotImplemented
        sym = self._join(other)
        if not self.coeffs or not other.coeffs:
            return Poly((), sym)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, sym)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_rational(other):
            return NotImplemented
        f = _frac(other)
        return Poly([a / f for a in self.coeffs], self.symbol)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly((1,), self.symbol)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if _is_rational(other):
            return self.coeffs == Poly((other,)).coeffs
        if isinstance(other, Poly):
            if self.coeffs != other.coeffs:
                return False
            return self.is_constant() or self.symbol == other.symbol
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant())
        return hash((self.coeffs, self.symbol))

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a number, a Poly or an ESeries."""
        if not self.coeffs:
            return x * 0 if isinstance(x, ESeries) else Fraction(0)
        acc = self.coeffs[-1]
        if isinstance(x, ESeries):
            acc = ESeries.constant(acc, x.step, x.truncation)
        for a in reversed(self.coeffs[:-1]):
            acc = acc * x + a
        return acc

    def derivative(self) -> "Poly":
        return Poly([i * a for i, a in enumerate(self.coeffs)][1:], self.symbol)

    def rename(self, symbol: str) -> "Poly":
        return Poly(self.coeffs, symbol)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if a == 0:
                continue
            mono = "" if i == 0 else (self.symbol if i == 1 else f"{self.symbol}^{i}")
            if mono and a == 1:
                parts.append(mono)
            elif mono and a == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{a}*{mono}" if mono else str(a))
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Truncated series on an exponent lattice
# ---------------------------------------------------------------------------


def _coeff_is_zero(c) -> bool:
    return c == 0


class ESeries:
    """Truncated series ``sum_k terms[k] * g**(k*step) + O(g**(truncation*step))``.

    Instances are immutable. Coefficients are :class:`Fraction` or
    :class:`Poly`. ``truncation`` is the index of the first untracked
    exponent.
    """

    __slots__ = ("_terms", "step", "truncation", "symbol")

    def __init__(self, terms: dict, step=1, truncation: int = 1, symbol: str = "g"):
        step = _frac(step)
        if step <= 0:
            raise ValueError("lattice step must be positive")
        truncation = int(truncation)
        clean = {}
        for k, c in terms.items():
            k = int(k)
            if k >= truncation:
                continue
            if k < MIN_INDEX:
                raise ValueError(f"exponent index {k} below the Laurent bound {MIN_INDEX}")
            if isinstance(c, ConstExpr):
                c = c.simplify()
            elif _is_rational(c):
                c = _frac(c)
            elif not isinstance(c, Poly):
                raise TypeError(f"unsupported coefficient type {type(c).__name__}")
            if not _coeff_is_zero(c):
                clean[k] = c
        self._terms = dict(sorted(clean.items()))
        self.step = step
        self.truncation = truncation
        self.symbol = symbol

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c, step=1, truncation: int = 1) -> "ESeries":
        return cls({0: c}, step, truncation)

    @classmethod
    def monomial(cls, k: int, c=1, step=1, truncation: int | None = None) -> "ESeries":
        return cls({k: c}, step, k + 1 if truncation is None else truncation)

    @classmethod
    def from_list(cls, coeffs, step=1, truncation: int | None = None, start: int = 0) -> "ESeries":
        coeffs = list(coeffs)
        t = start + len(coeffs) if truncation is None else truncation
        return cls({start + i: c for i, c in enumerate(coeffs)}, step, t)

    # access ---------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __getitem__(self, k: int):
        if k >= self.truncation:
            raise IndexError(f"index {k} at or beyond truncation {self.truncation}")
        return self._terms.get(k, Fraction(0))

    def items(self):
        return self._terms.items()

    def coefficients(self, start: int = 0) -> list:
        return [self[k] for k in range(start, self.truncation)]

    @property
    def valuation(self) -> int:
        """Lowest index with a nonzero coefficient (``truncation`` if none)."""
        return next(iter(self._terms), self.truncation)

    def exponent(self, k: int) -> Fraction:
        return k * self.step

    def is_zero(self) -> bool:
        return not self._terms

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "ESeries"):
        if self.step != other.step:
            raise LatticeMismatch(
                f"incompatible oscillator conventions: lattice steps {self.step} and {other.step}"
            )

    def _lift(self, other) -> "ESeries":
        if isinstance(other, ESeries):
            self._check(other)
            return other
        if _is_scalar(other) or isinstance(other, Poly):
            # exact constants are known to all orders
            return ESeries({0: other}, self.step, max(self.truncation, 1))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = min(self.truncation, other.truncation)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return ESeries(out, self.step, t)

    __radd__ = __add__

    def __neg__(self):
        return ESeries({k: -c for k, c in self._terms.items()}, self.step, self.truncation)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other) or isinstance(other, Poly):
            return ESeries({k: c * other for k, c in self._terms.items()}, self.step, self.truncation)
        if not isinstance(other, ESeries):
            return NotImplemented
        self._check(other)
        t = min(self.truncation + other.valuation, other.truncation + self.valuation)
        out: dict = {}
        for i, a in self._terms.items():
            if i + other.valuation >= t:
                break
            for j, b in other._terms.items():
                k = i + j
                if k >= t:
                    break
                p = a * b
                out[k] = out[k] + p if k in out else p
        return ESeries(out, self.step, t)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if _is_rational(other):
            f = _frac(other)
            return ESeries({k: c / f for k, c in self._terms.items()}, self.step, self.truncation)
        if isinstance(other, ESeries):
            return self * other.reciprocal()
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        if k == 0:
            return ESeries.constant(1, self.step, max(self.truncation - self.valuation, 1))
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ESeries):
            return NotImplemented
        return (
            self.step == other.step
            and self.truncation == other.truncation
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.step, self.truncation, tuple(self._terms.items())))

    def shift(self, k: int) -> "ESeries":
        """Multiply by the exact monomial ``g**(k*step)``."""
        return ESeries({i + k: c for i, c in self._terms.items()}, self.step, self.truncation + k)

    def truncate(self, t: int) -> "ESeries":
        return ESeries(self._terms, self.step, min(t, self.truncation))

    def reciprocal(self) -> "ESeries":
        """``1/s`` for a series whose lowest term has a nonzero scalar coefficient."""
        v = self.valuation
        if v >= self.truncation:
            raise ZeroDivisionError("reciprocal of a series known to be zero")
        lead = self._terms[v]
        if not _is_rational(lead):
            raise TypeError("reciprocal requires a rational leading coefficient")
        # s = lead*g^v*(1 + u), 1/(1+u) = sum (-u)^j
        u = (self.shift(-v) / lead) - 1
        n = self.truncation - v
        geo = ESeries.from_list([(-1) ** j for j in range(n)], 1, n)
        return (_compose_on(geo, u) / lead).shift(-v)

    def derivative_in_symbol(self) -> "ESeries":
        """Differentiate every Poly coefficient with respect to its symbol."""
        return ESeries(
            {k: c.derivative() if isinstance(c, Poly) else Fraction(0) for k, c in self._terms.items()},
            self.step,
            self.truncation,
        )

    def map_coefficients(self, fn) -> "ESeries":
        return ESeries({k: fn(c) for k, c in self._terms.items()}, self.step, self.truncation)

    def substitute(self, inner: "ESeries") -> "ESeries":
        """Replace the polynomial symbol in every coefficient by ``inner``.

        ``inner`` lives on the same lattice; it may carry a constant term
        since the coefficients are polynomials.
        """
        self._check(inner)
        acc = ESeries({}, self.step, self.truncation)
        for k, c in self._terms.items():
            if isinstance(c, Poly):
                acc = acc + c(inner).shift(k)
            else:
                acc = acc + ESeries({k: c}, self.step, self.truncation)
        return acc

    def __call__(self, value):
        """Evaluate every Poly coefficient at an exact scalar, giving a scalar series."""
        return self.map_coefficients(lambda c: c(value) if isinstance(c, Poly) else c)

    def __repr__(self):
        body = []
        for k, c in self._terms.items():
            e = k * self.step
            mono = "" if e == 0 else f"*g^({e})"
            body.append(f"({c}){mono}")
        body.append(f"O(g^({self.truncation * self.step}))")
        return " + ".join(body)

    # serialization ----------------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for k, c in self._terms.items():
            if isinstance(c, Poly):
                terms.append({"k": k, "poly": [str(a) for a in c.coeffs], "symbol": c.symbol})
            elif isinstance(c, ConstExpr):
                raise TypeError("series with transcendental coefficients have no exact JSON form")
            else:
                terms.append({"k": k, "poly": [str(c)]})
        return {"lattice_step": _ratstr(self.step), "terms": terms, "truncation": self.truncation}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ESeries":
        terms = {}
        for t in d["terms"]:
            coeffs = [Fraction(a) for a in t["poly"]]
            if "symbol" in t:
                terms[t["k"]] = Poly(coeffs, t["symbol"])
            else:
                (terms[t["k"]],) = coeffs
        return cls(terms, Fraction(d["lattice_step"]), d["truncation"])

    @classmethod
    def from_json(cls, s: str) -> "ESeries":
        return cls.from_dict(json.loads(s))


def _ratstr(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def series_arith(a: ESeries, b: ESeries, op: str) -> ESeries:
    """Add or multiply two series on the same lattice."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def _compose_on(outer: ESeries, inner: ESeries) -> ESeries:
    # Horner nest; the truncated-product rule tracks the known order.
    if outer.step != 1 or outer.valuation < 0:
        raise ValueError("outer series must be an ordinary power series")
    acc = ESeries({}, inner.step, 0)
    for k in range(outer.truncation - 1, -1, -1):
        acc = acc * inner + outer[k]
    return acc


def series_compose(outer, inner: ESeries) -> ESeries:
    """Substitute ``inner`` for the variable of ``outer``.

    ``outer`` is either an ESeries (power series in ``x``) or an exact
    :class:`Poly`. A truncated outer series needs ``inner`` to have positive
    valuation; a polynomial outer accepts any ``inner``.
    """
    if isinstance(outer, Poly):
        return outer(inner)
    if inner.valuation <= 0 and not inner.is_zero():
        raise ValueError("composition needs an inner series without constant term "
                         "unless the outer series is a polynomial")
    return _compose_on(outer, inner)


def exp_series(s: ESeries) -> ESeries:
    """``exp(s)`` for ``s`` of positive valuation."""
    if s.valuation <= 0 and not s.is_zero():
        raise ValueError("exp needs a series without constant or negative terms")
    n = max(1, -(-s.truncation // max(s.valuation, 1)))
    coeffs = []
    f = Fraction(1)
    for j in range(n + 1):
        coeffs.append(f)
        f /= j + 1
    return _compose_on(ESeries.from_list(coeffs), s)


def series_reverse(s: ESeries, order: int | None = None) -> ESeries:
    """Compositional inverse.

    Two forms are accepted:

    * a scalar power series ``s(x) = a1*x + a2*x**2 + ...`` with ``a1 != 0``;
      returns ``r`` with ``s(r(y)) = y`` to the truncation of ``s``;
    * a level map ``s = x + sum_K P_K(x) g**K`` with Poly coefficients and
      ``g**0`` coefficient exactly the variable ``x``; returns
      ``x = y + sum_K Q_K(y) g**K`` with ``s(x(y), g) = y``. The new symbol
      is ``E`` when ``x`` is ``nu`` and ``nu`` otherwise.
    """
    t = s.truncation if order is None else min(order, s.truncation)
    head = s._terms.get(0)
    if isinstance(head, Poly):
        x = head.symbol
        if head != Poly.var(x):
            raise ValueError("level map must start with its own variable")
        y = "E" if x == "nu" else "nu"
        tail = s.truncate(t) - ESeries({0: head}, s.step, t)
        r = ESeries({0: Poly.var(y)}, s.step, t)
        for _ in range(t):
            r = ESeries({0: Poly.var(y)}, s.step, t) - _rename_subst(tail, r, x)
        return r
    if s.step != 1:
        raise ValueError("scalar reversion is defined for integer lattices")
    if s.valuation != 1:
        raise ValueError("vanishing linear coefficient: series is not invertible")
    a1 = s[1]
    h = s.truncate(t) - ESeries({1: a1}, 1, t)
    y = ESeries({1: 1}, 1, t)
    r = y / a1
    for _ in range(t):
        r = (y - series_compose(h, r)) / a1
    return r


def _rename_subst(series: ESeries, inner: ESeries, symbol: str) -> ESeries:
    for c in series._terms.values():
        if isinstance(c, Poly) and not c.is_constant() and c.symbol != symbol:
            raise ValueError("coefficient symbol does not match the inversion variable")
    return series.substitute(inner)


class Evaluation(NamedTuple):
    """Numeric value of a truncated series plus a crude truncation indicator."""

    value: object
    last_term: object
    dps: int


def eval_numeric(s: ESeries, g, dps: int = DEFAULT_DPS, branch: str | None = None, at=None) -> Evaluation:
    """Evaluate ``s`` at coupling ``g`` with ``dps`` decimal digits.

    Fractional lattices at negative ``g`` need ``branch="principal"``
    (``g`` approached from the upper half plane). Poly coefficients are
    evaluated at ``at``.
    """
    with mpmath.workdps(dps):
        g = mpmath.mpmathify(g)
        frac_lattice = s.step.denominator != 1 or any(k < 0 for k in s._terms)
        if isinstance(g, mpmath.mpf) and g < 0 and s.step.denominator != 1 and branch != "principal":
            raise ValueError("negative coupling on a fractional lattice: select branch='principal'")
        if g == 0 and frac_lattice and s.valuation < 0:
            raise ZeroDivisionError("Laurent head evaluated at g = 0")
        if isinstance(g, mpmath.mpf) and g < 0 and s.step.denominator != 1:
            g = mpmath.mpc(g, 0)
        base = g ** (mpmath.mpf(s.step.numerator) / s.step.denominator) if s.step != 1 else g
        total = mpmath.mpf(0)
        last = mpmath.mpf(0)
        for k, c in s._terms.items():
            if isinstance(c, Poly):
                if at is None:
                    raise ValueError("polynomial coefficients need a value for their symbol")
                cv = _poly_numeric(c, mpmath.mpmathify(at))
            else:
                cv = scalar_value(c, dps)
            term = cv * base**k
            total += term
            last = abs(term)
        return Evaluation(+total, +last, dps)


def _poly_numeric(p: Poly, x):
    acc = mpmath.mpf(0)
    for a in reversed(p.coeffs):
        acc = acc * x + mpmath.mpf(a.numerator) / a.denominator
    return acc
