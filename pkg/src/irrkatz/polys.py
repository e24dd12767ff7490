"""Dense univariate polynomials and rational functions over exact rationals.

Internal plumbing for the operator algebra: nothing here knows about
differential operators.  Polynomials are dense coefficient tuples, lowest
degree first; rational functions are reduced fractions of polynomials with
a monic denominator, so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Union

from .scalar import Rat

Scalar = Union[Fraction, int]


def _trim(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class Poly:
    """Polynomial in one variable over Q, dense, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        object.__setattr__(
            self, "coeffs", _trim([Fraction(c) for c in coeffs])
        )

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def const(c: Scalar) -> "Poly":
        return Poly([c])

    @staticmethod
    def x(power: int = 1) -> "Poly":
        return Poly([0] * power + [1])

    @staticmethod
    def monomial(coeff: Scalar, power: int) -> "Poly":
        return Poly([0] * power + [coeff])

    # -- basics -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "PolyLike") -> "Poly":
        other = as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "PolyLike") -> "Poly":
        return self + (-as_poly(other))

    def __rsub__(self, other: "PolyLike") -> "Poly":
        return as_poly(other) + (-self)

    def __mul__(self, other: "PolyLike") -> "Poly":
        other = as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        rem = list(self.coeffs)
        d = other.degree
        lead = other.leading()
        while len(rem) - 1 >= d and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            k = len(rem) - 1 - d
            factor = rem[-1] / lead
            q[k] = factor
            for j in range(d + 1):
                rem[k + j] -= factor * other.coeffs[j]
            rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def eval(self, point: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * Fraction(point) + c
        return acc

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def shift(self, c: Scalar) -> "Poly":
        """The polynomial q with q(y) = p(y + c) (Taylor shift)."""
        c = Fraction(c)
        out = Poly()
        for coeff in reversed(self.coeffs):
            out = out * Poly([c, 1]) + Poly.const(coeff)
        return out

    def reverse(self, at_degree: int | None = None) -> "Poly":
        """Coefficient reversal: x^n * p(1/x) for n = at_degree (default deg p)."""
        n = self.degree if at_degree is None else at_degree
        if n < self.degree:
            raise ValueError("reversal degree below actual degree")
        out = [Fraction(0)] * (n + 1)
        for k, c in enumerate(self.coeffs):
            out[n - k] = c
        return Poly(out)

    def order_at(self, c: Scalar) -> int:
        """Multiplicity of the root x = c (0 if p(c) != 0); error on zero."""
        if self.is_zero():
            raise ValueError("order of the zero polynomial")
        p, m = self, 0
        c = Fraction(c)
        while p.eval(c) == 0:
            p = p // Poly([-c, 1])
            m += 1
        return m

    # -- integer structure --------------------------------------------------

    def int_content_and_primitive(self) -> tuple[Fraction, "Poly"]:
        """Write p = r * q with q in Z[x], content 1, positive leading coeff."""
        if self.is_zero():
            return Fraction(0), Poly()
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // int_gcd(den, c.denominator)
        ints = [c * den for c in self.coeffs]
        num = 0
        for c in ints:
            num = int_gcd(num, int(c))
        if ints[-1] < 0:
            num = -num
        r = Fraction(num, den)
        return r, Poly([c / r for c in self.coeffs])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.leading()
        return Poly([c / lead for c in self.coeffs])

    def rational_roots(self) -> dict[Fraction, int]:
        """All rational roots with multiplicities (rational root theorem)."""
        roots: dict[Fraction, int] = {}
        if self.is_zero():
            raise ValueError("roots of the zero polynomial")
        p = self
        low = 0
        while p[low] == 0:
            low += 1
        if low:
            roots[Fraction(0)] = low
            p = Poly(p.coeffs[low:])
        _, zp = p.int_content_and_primitive()
        if zp.degree == 0:
            return roots
        a0 = int(zp.coeffs[0])
        an = int(zp.leading())
        for p_div in _divisors(abs(a0)):
            for q_div in _divisors(abs(an)):
                for cand in (Fraction(p_div, q_div), Fraction(-p_div, q_div)):
                    if cand in roots:
                        continue
                    if zp.eval(cand) == 0:
                        roots[cand] = zp.order_at(cand)
        return roots

    def splits_over_q(self) -> bool:
        """True iff the polynomial factors completely into rational roots."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        return sum(self.rational_roots().values()) == self.degree

    # -- text ---------------------------------------------------------------

    def format(self, var: str = "x") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self[k]
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                xk = var if k == 1 else f"{var}^{k}"
                body = xk if abs(c) == 1 else f"{abs(c)}*{xk}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Poly({self.format()})"


PolyLike = Union[Poly, Fraction, int]


def as_poly(value: PolyLike) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.const(value)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q[x]."""
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def falling_factorial(j: int) -> Poly:
    """t (t-1) ... (t-j+1) as a polynomial in t; 1 for j = 0."""
    out = Poly.const(1)
    for k in range(j):
        out = out * Poly([-k, 1])
    return out


class RatFunc:
    """Reduced fraction num/den of polynomials, den monic and nonzero."""

    __slots__ = ("num", "den")

    def __init__(self, num: PolyLike, den: PolyLike = 1):
        num = as_poly(num)
        den = as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly.const(1)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
            lead = den.leading()
            if lead != 1:
                num = num * (1 / lead)
                den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def of(value: "RatLike") -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        return RatFunc(as_poly(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFunc.of(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: "RatLike") -> "RatFunc":
        other = RatFunc.of(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: "RatLike") -> "RatFunc":
        return self + (-RatFunc.of(other))

    def __rsub__(self, other: "RatLike") -> "RatFunc":
        return RatFunc.of(other) + (-self)

    def __mul__(self, other: "RatLike") -> "RatFunc":
        other = RatFunc.of(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatLike") -> "RatFunc":
        other = RatFunc.of(other)
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: "RatLike") -> "RatFunc":
        return RatFunc.of(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def subst_inverse(self) -> "RatFunc":
        """f(1/x) as a rational function of x."""
        n = max(self.num.degree, self.den.degree)
        if n < 0:
            return self
        return RatFunc(self.num.reverse(n), self.den.reverse(n))

    # -- local data ---------------------------------------------------------

    def order_at(self, c: Fraction) -> int:
        """Valuation at x = c: root multiplicity of num minus that of den."""
        if self.is_zero():
            raise ValueError("order of zero")
        return self.num.order_at(c) - self.den.order_at(c)

    def degree_at_infinity(self) -> int:
        """deg num - deg den; the order of growth at infinity."""
        if self.is_zero():
            raise ValueError("degree of zero")
        return self.num.degree - self.den.degree

    def laurent_coeff(self, c: Fraction, k: int) -> Fraction:
        """Coefficient of (x-c)^k in the Laurent expansion at x = c."""
        if self.is_zero():
            return Fraction(0)
        num = self.num.shift(c)
        den = self.den.shift(c)
        dord = den.order_at(Fraction(0))
        den = Poly(den.coeffs[dord:])
        # series of num/den up to order k + dord, den now a unit at 0
        need = k + dord
        if need < 0:
            return Fraction(0)
        series = [Fraction(0)] * (need + 1)
        inv0 = 1 / den.coeffs[0]
        for j in range(need + 1):
            acc = num[j]
            for i in range(1, j + 1):
                acc -= den[i] * series[j - i]
            series[j] = acc * inv0
        return series[need]

    def format(self, var: str = "x") -> str:
        if self.is_poly():
            return self.num.format(var)
        return f"({self.num.format(var)})/({self.den.format(var)})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"RatFunc({self.format()})"


RatLike = Union[RatFunc, Poly, Fraction, int]
