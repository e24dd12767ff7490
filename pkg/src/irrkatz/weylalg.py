"""Exact noncommutative operator algebra over Q(x).

Operators are sums ``a_0 + a_1*D + ... + a_n*D^n`` with rational-function
coefficients, kept in normal form (all powers of D commuted to the right)
under the relation ``x*D - D*x = -1``.  On top of the ring structure this
module provides the local invariants (weights, characteristic polynomials,
Newton polygons, theta expansions) and the global transforms (primitive
component, additions, exponential twists, Fourier-Laplace, Euler).

Points are either finite rationals or the point at infinity (``INF``).
Analysis at infinity always routes through the involution
``x -> 1/x, D -> -x^2*D`` (:func:`subst_infty`) so there is a single code
path for local computations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Union

from .polys import Poly, RatFunc, RatLike, as_poly, falling_factorial, poly_gcd
from .scalar import ParamExpr


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()

Location = Union[Fraction, _Infinity]


def location_key(at: Location) -> tuple:
    """Sort key putting infinity first, then finite points in order."""
    if at is INF:
        return (0,)
    return (1, at)


def format_location(at: Location) -> str:
    return "inf" if at is INF else str(at)


def parse_location(text: str) -> Location:
    text = text.strip()
    if text == "inf":
        return INF
    return Fraction(text)


class OperatorSyntaxError(ValueError):
    """Raised on malformed operator text; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class DiffOperator:
    """A differential operator in normal form; immutable.

    ``coeffs[i]`` is the rational-function coefficient of ``D^i``; the top
    coefficient is nonzero.  The zero operator has an empty tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RatLike] = ()):
        cs = [RatFunc.of(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("DiffOperator is immutable")

    @staticmethod
    def zero() -> "DiffOperator":
        return DiffOperator()

    @staticmethod
    def of(value: "OpLike") -> "DiffOperator":
        if isinstance(value, DiffOperator):
            return value
        return DiffOperator([RatFunc.of(value)])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def rank(self) -> int:
        """Degree in D; raises on the zero operator."""
        if not self.coeffs:
            raise ValueError("rank of the zero operator")
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> RatFunc:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RatFunc(0)

    def leading(self) -> RatFunc:
        if not self.coeffs:
            raise ValueError("leading coefficient of the zero operator")
        return self.coeffs[-1]

    def is_polynomial(self) -> bool:
        return all(c.is_poly() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- ring structure ---------------------------------------------------

    def __add__(self, other: "OpLike") -> "DiffOperator":
        other = DiffOperator.of(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOperator([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "DiffOperator":
        return DiffOperator([-c for c in self.coeffs])

    def __sub__(self, other: "OpLike") -> "DiffOperator":
        return self + (-DiffOperator.of(other))

    def __rsub__(self, other: "OpLike") -> "DiffOperator":
        return DiffOperator.of(other) + (-self)

    def __mul__(self, other: "OpLike") -> "DiffOperator":
        other = DiffOperator.of(other)
        if self.is_zero() or other.is_zero():
            return DiffOperator()
        out = [RatFunc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for j, b in enumerate(other.coeffs):
            if b.is_zero():
                continue
            # D^i * b = sum_k comb(i, k) * b^(k) * D^(i-k)
            deriv = b
            derivs = [deriv]
            for _ in range(len(self.coeffs) - 1):
                deriv = deriv.derivative()
                derivs.append(deriv)
            for i, a in enumerate(self.coeffs):
                if a.is_zero():
                    continue
                for k in range(i + 1):
                    term = derivs[k]
                    if term.is_zero():
                        continue
                    out[i - k + j] += a * comb(i, k) * term
        return DiffOperator(out)

    def __rmul__(self, other: "OpLike") -> "DiffOperator":
        # functions and scalars commute into the coefficients
        return DiffOperator.of(other) * self

    def __pow__(self, n: int) -> "DiffOperator":
        if n < 0:
            raise ValueError("negative operator power")
        result = DiffOperator.of(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def apply(self, f: RatLike) -> RatFunc:
        """Apply the operator to a rational function."""
        f = RatFunc.of(f)
        acc = RatFunc(0)
        for a in self.coeffs:
            acc += a * f
            f = f.derivative()
        return acc

    # -- text -------------------------------------------------------------

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"DiffOperator({to_text(self)})"


OpLike = Union[DiffOperator, RatFunc, Poly, Fraction, int]

X = DiffOperator([RatFunc(Poly.x())])
D = DiffOperator([RatFunc(0), RatFunc(1)])


def to_text(p: DiffOperator) -> str:
    """Canonical serialization: ``(poly)*D^i`` terms, lowest i first."""
    if p.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        body = c.format()
        if not c.is_poly():
            body = f"({c.num.format()})/({c.den.format()})"
        if i == 0:
            parts.append(f"({body})")
        elif i == 1:
            parts.append(f"({body})*D")
        else:
            parts.append(f"({body})*D^{i}")
    return " + ".join(parts)


# -- parser ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*^]))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = len(text) - len(stripped)
            if text[bad] == "/":
                raise OperatorSyntaxError(
                    "'/' is only allowed inside rational literals p/q", bad
                )
            raise OperatorSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.group(1):
            tokens.append(("num", Fraction(m.group(1)), m.start(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, symbol: str):
        kind, val, pos = self.next()
        if kind != "op" or val != symbol:
            raise OperatorSyntaxError(f"expected {symbol!r}", pos)

    def parse(self) -> DiffOperator:
        expr = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise OperatorSyntaxError("trailing input", pos)
        return expr

    def expr(self) -> DiffOperator:
        acc = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> DiffOperator:
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.next()
                acc = acc * self.factor()
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                raise OperatorSyntaxError(
                    "implicit multiplication is not allowed", self.peek()[2]
                )
            else:
                return acc

    def factor(self) -> DiffOperator:
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            inner = self.factor()
            return inner if val == "+" else -inner
        return self.power()

    def power(self) -> DiffOperator:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            ekind, exp, epos = self.next()
            if ekind != "num" or not isinstance(exp, Fraction) or exp.denominator != 1 or exp < 0:
                raise OperatorSyntaxError("exponent must be a nonnegative integer", epos)
            return base ** int(exp)
        return base

    def atom(self) -> DiffOperator:
        kind, val, pos = self.next()
        if kind == "num":
            return DiffOperator.of(val)
        if kind == "name":
            if val == "x":
                return X
            if val == "D":
                return D
            raise OperatorSyntaxError(f"unknown symbol {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise OperatorSyntaxError("expected a number, 'x', 'D' or '('", pos)


def parse(text: str) -> DiffOperator:
    """Parse operator text like ``"D^2 + (-x^2-7)*D + (-2*x+3)"``."""
    return _Parser(text).parse()


# -- local invariants --------------------------------------------------------


def weight(p: DiffOperator, at: Location) -> int:
    """Minimum monomial weight of ``p`` at the point.

    At finite c the weight of ``(x-c)^a D^b`` is ``a - b``; at infinity the
    weight of ``x^a D^b`` is ``b - a``.
    """
    if p.is_zero():
        raise ValueError("weight of the zero operator")
    if at is INF:
        return min(
            i - c.degree_at_infinity()
            for i, c in enumerate(p.coeffs)
            if not c.is_zero()
        )
    return min(
        c.order_at(at) - i for i, c in enumerate(p.coeffs) if not c.is_zero()
    )


def homogeneous_part(p: DiffOperator, at: Location, k: int) -> DiffOperator:
    """Sum of the monomials of weight exactly k (possibly zero)."""
    if p.is_zero():
        raise ValueError("homogeneous part of the zero operator")
    out = []
    for i, c in enumerate(p.coeffs):
        if c.is_zero():
            out.append(RatFunc(0))
            continue
        if at is INF:
            # monomial x^(i-k) D^i
            gamma = c.subst_inverse().laurent_coeff(Fraction(0), k - i)
            power = i - k
        else:
            gamma = c.laurent_coeff(at, k + i)
            power = k + i
        if gamma == 0:
            out.append(RatFunc(0))
            continue
        base = Poly.x() if at is INF else Poly([-at, 1])
        if power >= 0:
            out.append(RatFunc(Poly.const(gamma) * base ** power))
        else:
            out.append(RatFunc(Poly.const(gamma), base ** (-power)))
    return DiffOperator(out)


def char_poly(p: DiffOperator, at: Location) -> Poly:
    """Characteristic polynomial: falling-factorial symbol of the lowest
    weight part; its roots are the characteristic exponents."""
    if at is INF:
        return char_poly(subst_infty(p), Fraction(0))
    if p.is_zero():
        raise ValueError("characteristic polynomial of the zero operator")
    wt = weight(p, at)
    out = Poly()
    for j, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        gamma = c.laurent_coeff(at, wt + j)
        if gamma != 0:
            out = out + gamma * falling_factorial(j)
    return out


def is_regular_singular(p: DiffOperator, at: Location) -> bool:
    """Degree criterion: the characteristic polynomial has full degree."""
    return char_poly(p, at).degree == p.rank


@dataclass(frozen=True)
class NewtonPolygon:
    """Relevant boundary of the weight diagram at a point.

    ``vertices`` are (D-degree, weight) pairs with strictly increasing
    slopes between them.  A point with no positive-slope edges (a regular
    singular point, in particular) has a single vertex and no slopes; at
    an irregular point with a moderate (slope-0) block, the leading
    horizontal edge is part of the boundary and contributes slope 0.
    """

    vertices: tuple[tuple[int, int], ...]
    slopes: tuple[Fraction, ...]

    def slope_edge(self, slope: Fraction) -> tuple[tuple[int, int], tuple[int, int]]:
        k = self.slopes.index(slope)
        return self.vertices[k], self.vertices[k + 1]

    @property
    def regular_rank(self) -> int:
        """Total rank of the moderate part: where positive slopes begin."""
        if self.slopes and self.slopes[0] == 0:
            return self.vertices[1][0]
        return self.vertices[0][0]


def newton_polygon(p: DiffOperator, at: Location) -> NewtonPolygon:
    """Newton polygon at the point, computed from monomial weights."""
    if p.is_zero():
        raise ValueError("Newton polygon of the zero operator")
    pts = {}
    for i, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        if at is INF:
            pts[i] = i - c.degree_at_infinity()
        else:
            pts[i] = c.order_at(at) - i
    wt = min(pts.values())
    i0 = max(i for i, y in pts.items() if y == wt)
    # lower convex hull rightwards from (i0, wt)
    chain: list[tuple[int, int]] = [(i0, wt)]
    for i in sorted(k for k in pts if k > i0):
        y = pts[i]
        while len(chain) >= 2:
            (i1, y1), (i2, y2) = chain[-2], chain[-1]
            if (y2 - y1) * (i - i1) >= (y - y1) * (i2 - i1):
                chain.pop()
            else:
                break
        chain.append((i, y))
    # drop interior points that are above the final hull
    vertices = [chain[0]]
    for pt in chain[1:]:
        while len(vertices) >= 2:
            (i1, y1), (i2, y2) = vertices[-2], vertices[-1]
            if (y2 - y1) * (pt[0] - i1) >= (pt[1] - y1) * (i2 - i1):
                vertices.pop()
            else:
                break
        vertices.append(pt)
    if len(vertices) >= 2 and vertices[0][0] > 0:
        # an irregular point with a moderate block: the horizontal edge
        # up to the first positive slope belongs to the boundary
        vertices.insert(0, (0, wt))
    slopes = tuple(
        Fraction(vertices[k + 1][1] - vertices[k][1], vertices[k + 1][0] - vertices[k][0])
        for k in range(len(vertices) - 1)
    )
    return NewtonPolygon(tuple(vertices), slopes)


@dataclass(frozen=True)
class ThetaExpansion:
    """Expansion ``P = sum_i (x-c)^i p_i(theta_c)`` with ``theta_c = (x-c)D``.

    At infinity the terms are those of the chart operator at 0, which is
    the same as writing ``P = sum_i x^(-i) p_i(theta_inf)`` with
    ``theta_inf = -x*D``.  The minimal-index term is the characteristic
    polynomial.
    """

    point: Location
    terms: tuple[tuple[int, Poly], ...]

    def term_map(self) -> dict[int, Poly]:
        return dict(self.terms)

    @property
    def min_index(self) -> int:
        return self.terms[0][0]

    def term(self, i: int) -> Poly:
        for k, q in self.terms:
            if k == i:
                return q
        return Poly()

    def reconstruct(self) -> DiffOperator:
        """Rebuild the operator (oracle for tests)."""
        if self.point is INF:
            chart = _theta_reconstruct(self.terms, Fraction(0))
            return subst_infty(chart)
        return _theta_reconstruct(self.terms, self.point)


def _theta_reconstruct(terms, c: Fraction) -> DiffOperator:
    base = RatFunc(Poly([-c, 1]))
    theta = DiffOperator([RatFunc(0), base])
    acc = DiffOperator()
    for i, q in terms:
        power = DiffOperator.of(base ** i)
        horner = DiffOperator()
        for coeff in reversed(q.coeffs):
            horner = horner * theta + DiffOperator.of(coeff)
        acc = acc + power * horner
    return acc


def theta_expand(p: DiffOperator, at: Location) -> ThetaExpansion:
    """Theta expansion at a point.

    Coefficients must be Laurent polynomials in the local parameter, i.e.
    denominators must be powers of (x - c); this holds for polynomial
    operators and for everything produced by the extraction pipeline.
    """
    if at is INF:
        chart = theta_expand(subst_infty(p), Fraction(0))
        return ThetaExpansion(INF, chart.terms)
    if p.is_zero():
        raise ValueError("theta expansion of the zero operator")
    c = at
    buckets: dict[int, Poly] = {}
    for j, coeff in enumerate(p.coeffs):
        if coeff.is_zero():
            continue
        shift = coeff.den.order_at(c)
        if coeff.den != Poly([-c, 1]) ** shift:
            raise ValueError(
                f"coefficient {coeff} is not a Laurent polynomial at {c}"
            )
        num = coeff.num.shift(c)
        ff = falling_factorial(j)
        for m, gamma in enumerate(num.coeffs):
            if gamma == 0:
                continue
            w = (m - shift) - j
            buckets[w] = buckets.get(w, Poly()) + gamma * ff
    terms = tuple(
        (i, q) for i, q in sorted(buckets.items()) if not q.is_zero()
    )
    return ThetaExpansion(at, terms)


# -- transforms --------------------------------------------------------------


def prim(p: DiffOperator) -> DiffOperator:
    """The primitive component: polynomial coefficients with trivial common
    factor and monic top coefficient.  Unique in W(x) f-multiples."""
    if p.is_zero():
        raise ValueError("primitive component of the zero operator")
    den = Poly.const(1)
    for c in p.coeffs:
        den = den * (c.den // poly_gcd(den, c.den))
    nums = [(c * RatFunc(den)).as_poly() for c in p.coeffs]
    g = Poly()
    for q in nums:
        if not q.is_zero():
            g = q if g.is_zero() else poly_gcd(g, q)
    nums = [q // g for q in nums]
    lead = nums[-1].leading()
    return DiffOperator([RatFunc(q * (1 / lead)) for q in nums])


def subst_infty(p: DiffOperator) -> DiffOperator:
    """The chart operator at infinity: x -> 1/x, D -> -x^2 D (an involution)."""
    d_image = DiffOperator([RatFunc(0), RatFunc(Poly([0, 0, -1]))])
    acc = DiffOperator()
    power = DiffOperator.of(1)
    for c in p.coeffs:
        if not c.is_zero():
            acc = acc + DiffOperator.of(c.subst_inverse()) * power
        power = power * d_image
    return acc


def ad_power(p: DiffOperator, c: Fraction, lam) -> DiffOperator:
    """Addition at x - c: the automorphism D -> D - lam/(x-c).

    Shifts the characteristic exponents at c by +lam.  The concrete engine
    requires a rational lam; parameter-carrying values are rejected.
    """
    lam = ParamExpr.of(lam).as_rat()
    shift = DiffOperator.of(RatFunc(Poly.const(lam), Poly([-c, 1])))
    return _substitute_d(p, D - shift)


def ad_exp(p: DiffOperator, w) -> DiffOperator:
    """Exponential twist by a factor in theta form.

    ``w`` is an exponential factor (point plus coefficient map): at finite c
    it is sum w_k (x-c)^(-k) and the twist is D -> D - w/(x-c); at infinity
    it is sum w_k x^k and the twist is D -> D - w/x.
    """
    return ad_exp_raw(p, w.point, w.coeffs)


def ad_exp_raw(p: DiffOperator, at: Location, coeffs: Mapping[int, Fraction]) -> DiffOperator:
    f = RatFunc(0)
    for k, wk in coeffs.items():
        if k < 1:
            raise ValueError("theta-form orders must be >= 1")
        if at is INF:
            f += RatFunc(Poly.monomial(wk, k - 1))
        else:
            f += RatFunc(Poly.const(wk), Poly([-at, 1]) ** (k + 1))
    return _substitute_d(p, D - DiffOperator.of(f))


def _substitute_d(p: DiffOperator, d_image: DiffOperator) -> DiffOperator:
    acc = DiffOperator()
    power = DiffOperator.of(1)
    for c in p.coeffs:
        if not c.is_zero():
            acc = acc + DiffOperator.of(c) * power
        power = power * d_image
    return acc


def laplace(p: DiffOperator) -> DiffOperator:
    """Fourier-Laplace transform: x -> -D, D -> x (on W[x] only)."""
    return _laplace_images(p, -D, X)


def laplace_inv(p: DiffOperator) -> DiffOperator:
    """Inverse Fourier-Laplace transform: x -> D, D -> -x."""
    return _laplace_images(p, D, -X)


def _laplace_images(p: DiffOperator, x_image: DiffOperator, d_image: DiffOperator) -> DiffOperator:
    if not p.is_polynomial():
        raise ValueError("Fourier-Laplace transform needs polynomial coefficients")
    acc = DiffOperator()
    d_power = DiffOperator.of(1)
    for c in p.coeffs:
        if not c.is_zero():
            poly = c.as_poly()
            horner = DiffOperator()
            for coeff in reversed(poly.coeffs):
                horner = horner * x_image + DiffOperator.of(coeff)
            acc = acc + horner * d_power
        d_power = d_power * d_image
    return acc


def euler(p: DiffOperator, lam) -> DiffOperator:
    """Euler transform with parameter lam:
    Laplace . Prim . Ad(x^lam) . Laplace^(-1) . Prim."""
    lam = ParamExpr.of(lam).as_rat()
    q = prim(p)
    q = laplace_inv(q)
    q = ad_power(q, Fraction(0), lam)
    q = prim(q)
    return laplace(q)


def deg_of(p: DiffOperator) -> int:
    """Maximum coefficient degree (for polynomial operators)."""
    if not p.is_polynomial():
        raise ValueError("degree is defined for polynomial operators")
    if p.is_zero():
        raise ValueError("degree of the zero operator")
    return max(c.as_poly().degree for c in p.coeffs if not c.is_zero())


class IrrationalSingularityError(ValueError):
    """The leading coefficient has a non-rational root; the desk-scale
    engine only handles rational singular locations."""


def singular_points(p: DiffOperator) -> list[Fraction]:
    """Finite singular points of the primitive component, sorted."""
    q = prim(p)
    lead = q.leading().as_poly()
    roots = lead.rational_roots()
    if sum(roots.values()) != lead.degree:
        raise IrrationalSingularityError(
            f"leading coefficient {lead} has irrational roots"
        )
    return sorted(roots)


def is_singular(p: DiffOperator, at: Location) -> bool:
    """True iff the point is a singular point of the operator."""
    if at is INF:
        return is_singular(subst_infty(p), Fraction(0))
    if p.is_zero():
        raise ValueError("singularity of the zero operator")
    if p.rank == 0:
        return False
    lead = p.leading()
    return any(
        not c.is_zero() and c.order_at(at) < lead.order_at(at)
        for c in p.coeffs[:-1]
    )
