"""Exact scalar kernel: rationals, univariate polynomials, rational functions.

All coefficient arithmetic in this package is exact.  Rationals are
``fractions.Fraction`` (arbitrary precision, always normalized with a
positive denominator).  On top of that this module provides

  UniPoly  -- univariate polynomial over Fraction in one named parameter,
              stored as a coefficient tuple, lowest degree first, with no
              trailing zeros (the zero polynomial is the empty tuple);
  RatFun   -- reduced quotient of two UniPoly with a monic denominator.

The canonical form of a RatFun is unique: gcd(num, den) = 1, den monic,
content pushed into the numerator.  Equality is therefore structural.
A RatFun carries exactly one parameter name; expressions never mix two
deformation parameters.  Values are immutable and safe to share.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

Scalar = Union[int, Fraction]


class ZeroDenominator(ZeroDivisionError):
    """Raised when a rational function is built over a zero denominator."""


class Pole(ArithmeticError):
    """Raised when a reduced rational function is evaluated at a root of
    its denominator."""


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class UniPoly:
    """Univariate polynomial over Fraction, lowest-degree coefficient first."""

    __slots__ = ("param", "coeffs")

    def __init__(self, coeffs: Iterable[Scalar] = (), param: str = "w"):
        self.param = param
        self.coeffs = _trim([Fraction(c) for c in coeffs])

    @staticmethod
    def const(c: Scalar, param: str = "w") -> "UniPoly":
        return UniPoly([Fraction(c)], param)

    @staticmethod
    def var(param: str = "w") -> "UniPoly":
        return UniPoly([0, 1], param)

    @property
    def degree(self) -> int:
        """Degree, with the convention deg 0 = -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def _unify(self, other: "UniPoly") -> str:
        # Constants are parameter-agnostic; genuine two-parameter mixes are a bug.
        if self.param == other.param:
            return self.param
        if self.is_const():
            return other.param
        if other.is_const():
            return self.param
        raise ValueError(f"parameter mismatch: {self.param!r} vs {other.param!r}")

    def __add__(self, other: "UniPoly") -> "UniPoly":
        param = self._unify(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out, param)

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs], self.param)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        param = self._unify(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly((), param)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out, param)

    def scale(self, c: Scalar) -> "UniPoly":
        c = Fraction(c)
        return UniPoly([a * c for a in self.coeffs], self.param)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        param = self._unify(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.leading()
        q = [Fraction(0)] * max(0, len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / lead
            q[i - dd] = f
            for j, b in enumerate(other.coeffs):
                rem[i - dd + j] -= f * b
        return UniPoly(q, param), UniPoly(rem, param)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading())

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def eval(self, x: Scalar) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(
            [i * c for i, c in enumerate(self.coeffs)][1:], self.param
        )

    def shift(self, k: int) -> "UniPoly":
        """Multiply by param**k (k >= 0)."""
        if self.is_zero():
            return self
        return UniPoly((Fraction(0),) * k + self.coeffs, self.param)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs and (
            self.param == other.param or self.is_const() or other.is_const()
        )

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*{self.param}")
            else:
                parts.append(f"{c}*{self.param}^{i}")
        return " + ".join(parts)


class RatFun:
    """Reduced rational function num/den with monic denominator.

    Construct through :func:`ratfun_normalize` (or the helpers below), which
    produce the unique canonical representative.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly, _canonical: bool = False):
        if _canonical:
            self.num = num
            self.den = den
            return
        c = ratfun_normalize(num, den)
        self.num = c.num
        self.den = c.den

    @property
    def param(self) -> str:
        return self.num.param if not self.num.is_const() else self.den.param

    @staticmethod
    def const(c: Scalar, param: str = "w") -> "RatFun":
        return RatFun(
            UniPoly.const(c, param), UniPoly.const(1, param), _canonical=True
        )

    @staticmethod
    def var(param: str = "w") -> "RatFun":
        return RatFun(UniPoly.var(param), UniPoly.const(1, param), _canonical=True)

    @staticmethod
    def from_poly(p: UniPoly) -> "RatFun":
        return RatFun(p, UniPoly.const(1, p.param), _canonical=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return self.num.coeffs[0]

    def __add__(self, other: "RatFun") -> "RatFun":
        return ratfun_normalize(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, _canonical=True)

    def __sub__(self, other: "RatFun") -> "RatFun":
        return self + (-other)

    def __mul__(self, other: "RatFun") -> "RatFun":
        return ratfun_normalize(self.num * other.num, self.den * other.den)

    def inv(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return ratfun_normalize(self.den, self.num)

    def __truediv__(self, other: "RatFun") -> "RatFun":
        return self * other.inv()

    def scale(self, c: Scalar) -> "RatFun":
        c = Fraction(c)
        if c == 0:
            return RatFun.const(0, self.param)
        return RatFun(self.num.scale(c), self.den, _canonical=True)

    def eval(self, x: Scalar) -> Fraction:
        return ratfun_eval(self, x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den == UniPoly.const(1, self.den.param):
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def ratfun_normalize(num: UniPoly, den: UniPoly) -> RatFun:
    """Return the unique canonical representative of num/den.

    gcd cancelled, denominator made monic, content moved to the numerator.
    Raises ZeroDenominator if den = 0.
    """
    if den.is_zero():
        raise ZeroDenominator("zero denominator in rational function")
    param = num._unify(den)
    if num.is_zero():
        one = UniPoly.const(1, param)
        return RatFun(UniPoly((), param), one, _canonical=True)
    g = num.gcd(den)
    if g.degree > 0:
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
    lead = den.leading()
    if lead != 1:
        den = den.scale(1 / lead)
        num = num.scale(1 / lead)
    return RatFun(num, den, _canonical=True)


def ratfun_eval(f: RatFun, a: Scalar) -> Fraction:
    """Evaluate the reduced function at a; raises Pole on a denominator root."""
    d = f.den.eval(a)
    if d == 0:
        raise Pole(f"pole of rational function at {f.param} = {a}")
    return f.num.eval(a) / d


def binomial(n: Scalar, k: int) -> Fraction:
    """Generalized binomial coefficient C(n, k) for rational n, integer k >= 0."""
    n = Fraction(n)
    out = Fraction(1)
    for i in range(k):
        out *= (n - i) / (k - i)
    return out


def poly_binomial(p: UniPoly, k: int) -> UniPoly:
    """C(p, k) = p (p-1) ... (p-k+1) / k! as a polynomial."""
    out = UniPoly.const(1, p.param)
    for i in range(k):
        out = out * (p - UniPoly.const(i, p.param))
    return out.scale(Fraction(1, _factorial(k)))


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def format_fraction(q: Fraction) -> str:
    """Serialize a rational as 'p/q' (or plain integer when q = 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)
