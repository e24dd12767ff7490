"""Discrete local invariants of an operator and their extraction.

A formal datum lists, per singular point (the point at infinity always
first), the exponential factors in theta form together with the spectral
data of each local factor: chains of exponents ``lam, lam+1, ...,
lam+m-1`` with multiplicities.

Extraction from a concrete operator proceeds point by point: the Newton
polygon supplies the positive slopes, the boundary polynomial of each
slope supplies candidate leading theta-form coefficients, and twisting a
candidate away recursively peels the factor down to its regular-singular
core, whose characteristic polynomial is grouped into integer chains and
certified by the triangular vanishing conditions on the theta expansion.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Sequence

from . import weylalg
from .lattice import LatticeShape, LatticeVector
from .exponents import ExponentVector
from .polys import Poly
from .scalar import ParamExpr, ParamLike, diff_in_integers, parse_param_expr
from .weylalg import (
    INF,
    DiffOperator,
    Location,
    ThetaExpansion,
    format_location,
    location_key,
    parse_location,
)


class ExtractionError(Exception):
    """Base class for honest extraction failures."""


class RamifiedPointError(ExtractionError):
    """A Newton-polygon slope is not an integer: the local structure is
    ramified and out of scope for this engine."""


class NonSplitCharPolyError(ExtractionError):
    """A characteristic (or slope-boundary) polynomial does not split over
    the rationals at the chosen instance."""


class OshimaCheckError(ExtractionError):
    """The chain pattern could not be verified by the triangular vanishing
    conditions; the spectral data would be a guess."""


class ExponentialFactor:
    """Exponential factor in theta form at a point.

    ``coeffs`` maps order ``k >= 1`` to a nonzero rational: at a finite
    point c the factor is ``sum w_k (x-c)^(-k)``, at infinity it is
    ``sum w_k x^k``.  The empty map is the zero factor.  Solutions of the
    attached local factor grow like ``exp(integral of w/(x-c))`` (``w/x``
    at infinity).
    """

    __slots__ = ("point", "_items")

    def __init__(self, point: Location, coeffs: Mapping[int, Fraction] | None = None):
        items = []
        for k, v in sorted((coeffs or {}).items()):
            v = Fraction(v)
            if v == 0:
                continue
            if k < 1:
                raise ValueError("theta-form orders must be >= 1 (no constant term)")
            items.append((int(k), v))
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "_items", tuple(items))

    def __setattr__(self, name, value):
        raise AttributeError("ExponentialFactor is immutable")

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._items)

    def is_zero(self) -> bool:
        return not self._items

    @property
    def degree(self) -> int:
        """Top order (the Newton-polygon slope); 0 for the zero factor."""
        return self._items[-1][0] if self._items else 0

    def weight(self) -> int:
        """wt of the factor: minus the top order, and 0 for the zero factor."""
        return -self.degree

    def __sub__(self, other: "ExponentialFactor") -> "ExponentialFactor":
        if self.point is not other.point and self.point != other.point:
            raise ValueError("factors live at different points")
        coeffs = self.coeffs
        for k, v in other._items:
            coeffs[k] = coeffs.get(k, Fraction(0)) - v
        return ExponentialFactor(self.point, coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExponentialFactor):
            return NotImplemented
        return (
            location_key(self.point) == location_key(other.point)
            and self._items == other._items
        )

    def __hash__(self):
        return hash((location_key(self.point), self._items))

    def format(self) -> str:
        if not self._items:
            return "0"
        parts = []
        for k, v in self._items:
            if self.point is INF:
                var = "x" if k == 1 else f"x^{k}"
            elif self.point == 0:
                var = f"x^-{k}"
            else:
                var = f"(x-{self.point})^-{k}"
            parts.append(f"{v}*{var}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ExponentialFactor({format_location(self.point)}: {self.format()})"


def factor_weight_diff(w1: ExponentialFactor, w2: ExponentialFactor) -> int:
    """wt of the difference of two factors; 0 when they are equal."""
    if w1 == w2:
        return 0
    return (w1 - w2).weight()


class SpectralData:
    """Chains ``(lam_s, m_s)``: exponents lam, lam+1, ..., lam+m-1.

    Bases of distinct chains never differ by an integer (for parameter
    expressions this is the generic reading).
    """

    __slots__ = ("chains",)

    def __init__(self, chains: Sequence[tuple[ParamLike, int]]):
        parsed = tuple((ParamExpr.of(lam), int(m)) for lam, m in chains)
        if not parsed:
            raise ValueError("spectral data needs at least one chain")
        if any(m < 1 for _, m in parsed):
            raise ValueError("chain multiplicities must be positive")
        for i in range(len(parsed)):
            for j in range(i + 1, len(parsed)):
                if diff_in_integers(parsed[i][0], parsed[j][0]):
                    raise ValueError(
                        f"chain bases {parsed[i][0]} and {parsed[j][0]} differ by an integer"
                    )
        object.__setattr__(self, "chains", parsed)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralData is immutable")

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.chains)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralData):
            return NotImplemented
        return self.chains == other.chains

    def __hash__(self):
        return hash(self.chains)

    def format(self) -> str:
        lams = ",".join(str(l) for l, _ in self.chains)
        ms = ",".join(str(m) for _, m in self.chains)
        return f"{{({lams});({ms})}}"

    def __repr__(self):
        return f"SpectralData({self.format()})"


class FormalData:
    """Per-point factor lists; the point at infinity always comes first.

    Factor list order is significant: it fixes the slot indexing shared
    with lattice vectors and exponent vectors.
    """

    __slots__ = ("points",)

    def __init__(
        self,
        points: Sequence[tuple[Location, Sequence[tuple[ExponentialFactor, SpectralData]]]],
    ):
        pts = tuple((loc, tuple(factors)) for loc, factors in points)
        if not pts or pts[0][0] is not INF:
            raise ValueError("the first point must be the point at infinity")
        keys = [location_key(loc) for loc, _ in pts]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate points")
        ranks = []
        for loc, factors in pts:
            if not factors:
                raise ValueError(f"point {format_location(loc)} has no factors")
            ws = [w for w, _ in factors]
            if len(set(ws)) != len(ws):
                raise ValueError(f"duplicate exponential factors at {format_location(loc)}")
            for w, _ in factors:
                if location_key(w.point) != location_key(loc):
                    raise ValueError("factor attached to the wrong point")
            ranks.append(sum(s.rank for _, s in factors))
        if len(set(ranks)) > 1:
            raise ValueError(f"unequal ranks across points: {ranks}")
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("FormalData is immutable")

    @property
    def rank(self) -> int:
        return sum(s.rank for _, s in self.points[0][1])

    def locations(self) -> tuple[Location, ...]:
        return tuple(loc for loc, _ in self.points)

    def factors(self, i: int) -> tuple[tuple[ExponentialFactor, SpectralData], ...]:
        return self.points[i][1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalData):
            return NotImplemented
        return self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        rows = []
        for loc, factors in self.points:
            body = ", ".join(f"w={w.format()} {s.format()}" for w, s in factors)
            rows.append(f"{format_location(loc)}: {body}")
        return "FormalData(" + " | ".join(rows) + ")"


def index_set(data: FormalData) -> tuple[tuple[int, ...], ...]:
    """All index tuples (one factor index per point), lexicographic."""
    return to_shape(data).index_tuples()


# -- bridges to the lattice side ---------------------------------------------


def to_shape(data: FormalData) -> LatticeShape:
    chain_lengths = tuple(
        tuple(len(s.chains) for _, s in factors) for _, factors in data.points
    )
    weights = tuple(
        tuple(
            tuple(factor_weight_diff(w1, w2) for w2, _ in factors)
            for w1, _ in factors
        )
        for _, factors in data.points
    )
    return LatticeShape(chain_lengths, weights)


def m_vector(data: FormalData) -> LatticeVector:
    return LatticeVector(
        to_shape(data),
        [
            [[m for _, m in s.chains] for _, s in factors]
            for _, factors in data.points
        ],
    )


def exponent_vector(data: FormalData) -> ExponentVector:
    return ExponentVector(
        to_shape(data),
        [
            [[lam for lam, _ in s.chains] for _, s in factors]
            for _, factors in data.points
        ],
    )


# -- the Fuchs relation --------------------------------------------------------


def fuchs_defect(data: FormalData) -> ParamExpr:
    """Deviation from the weighted exponent-sum identity; zero iff the
    Fuchs relation holds."""
    return fuchs_defect_of(to_shape(data), m_vector(data), exponent_vector(data))


def fuchs_defect_of(
    shape: LatticeShape, m: LatticeVector, nu: ExponentVector
) -> ParamExpr:
    n = m.rank
    total = ParamExpr(0)
    for i in range(shape.num_points):
        for j in range(shape.factor_count(i)):
            for s in range(shape.chain_lengths[i][j]):
                ms = m.entries[i][j][s]
                lam = nu.entries[i][j][s]
                total = total + Fraction(ms, 2) * (2 * lam + (ms - 1))
        for j in range(shape.factor_count(i)):
            for j2 in range(shape.factor_count(i)):
                if j == j2:
                    continue
                total = total + Fraction(
                    shape.weights[i][j][j2] * m.block_sum(i, j) * m.block_sum(i, j2), 2
                )
    total = total - Fraction((shape.p + 1) * n * (n - 1), 2)
    return total + n * (n - 1)


# -- the triangular certification ----------------------------------------------


def oshima_check(expansion: ThetaExpansion, data: SpectralData) -> bool:
    """Triangular vanishing pattern certifying the chain grouping.

    For each chain (lam, m): the term of minimal index vanishes at lam,
    ..., lam+m-1, the next at lam, ..., lam+m-2, and so on.  Chain bases
    must be parameter-free.
    """
    r = expansion.min_index
    for lam, m in data.chains:
        base = lam.as_rat()
        for u in range(m):
            poly = expansion.term(r + u)
            for v in range(m - u):
                if poly.eval(base + v) != 0:
                    return False
    return True


def group_chains(roots: Mapping[Fraction, int]) -> list[tuple[Fraction, int]]:
    """Group characteristic roots into integer chains.

    Each residue class modulo 1 must form a gap-free, multiplicity-free
    run lam, lam+1, ..., lam+m-1; anything else is not representable as
    spectral data and is reported honestly.
    """
    classes: dict[Fraction, list[Fraction]] = {}
    for root, mult in roots.items():
        if mult != 1:
            raise OshimaCheckError(
                f"repeated characteristic exponent {root}; chain grouping is ambiguous"
            )
        residue = root - (root.numerator // root.denominator)
        classes.setdefault(residue, []).append(root)
    chains = []
    for members in classes.values():
        members.sort()
        for a, b in zip(members, members[1:]):
            if b - a != 1:
                raise OshimaCheckError(
                    f"exponents {a} and {b} differ by a non-unit integer; "
                    "no valid chain grouping"
                )
        chains.append((members[0], len(members)))
    chains.sort()
    return chains


# -- extraction ----------------------------------------------------------------


def extract_formal_data(p: DiffOperator) -> FormalData:
    """Compute the formal datum of a primitive operator.

    Requires rational singular points, integer slopes and characteristic
    polynomials splitting over Q; failures raise the dedicated errors.
    """
    p = weylalg.prim(p)
    if p.rank < 1:
        raise ValueError("extraction needs an operator of rank >= 1")
    points: list[tuple[Location, list[tuple[ExponentialFactor, SpectralData]]]] = []
    finite = weylalg.singular_points(p)
    for at in [INF] + finite:
        chart = weylalg.subst_infty(p) if at is INF else p
        c = Fraction(0) if at is INF else at
        raw = _peel_factors(chart, c, None)
        total = sum(s.rank for _, s in raw)
        if total != p.rank:
            raise ExtractionError(
                f"local ranks at {format_location(at)} sum to {total}, "
                f"expected {p.rank}"
            )
        factors = []
        for coeffs, spectral in raw:
            if at is INF:
                coeffs = {k: -v for k, v in coeffs.items()}
            factors.append((ExponentialFactor(at, coeffs), spectral))
        factors.sort(key=lambda fs: (fs[0].degree, fs[0]._items))
        points.append((at, factors))
    return FormalData(points)


def _peel_factors(
    q: DiffOperator, c: Fraction, max_degree: int | None
) -> list[tuple[dict[int, Fraction], SpectralData]]:
    """Factors of the chart operator at c with theta-degree < max_degree.

    Returns raw coefficient maps in chart orientation; the caller flips
    signs for the point at infinity.
    """
    np = weylalg.newton_polygon(q, c)
    out: list[tuple[dict[int, Fraction], SpectralData]] = []
    if np.regular_rank > 0:
        out.append(({}, _regular_spectral_data(q, c, np.regular_rank)))
    for slope in np.slopes:
        if slope == 0 or (max_degree is not None and slope >= max_degree):
            continue
        if slope.denominator != 1:
            raise RamifiedPointError(
                f"Newton polygon slope {slope} is not an integer"
            )
        k = int(slope)
        edge = _edge_polynomial(q, c, np, slope)
        roots = edge.rational_roots()
        if sum(roots.values()) != edge.degree:
            raise NonSplitCharPolyError(
                f"slope-{k} boundary polynomial {edge} does not split over Q"
            )
        for v0, mult in sorted(roots.items()):
            twisted = weylalg.ad_exp_raw(q, c, {k: -v0})
            sub = _peel_factors(twisted, c, k)
            got = sum(s.rank for _, s in sub)
            if got != mult:
                raise ExtractionError(
                    f"slope-{k} candidate {v0} produced rank {got}, expected {mult}"
                )
            for coeffs, spectral in sub:
                coeffs = dict(coeffs)
                coeffs[k] = v0
                out.append((coeffs, spectral))
    return out


def _regular_spectral_data(q: DiffOperator, c: Fraction, expected_rank: int) -> SpectralData:
    char = weylalg.char_poly(q, c)
    if char.degree != expected_rank:
        raise ExtractionError(
            f"characteristic polynomial degree {char.degree} != regular rank {expected_rank}"
        )
    roots = char.rational_roots()
    if sum(roots.values()) != char.degree:
        raise NonSplitCharPolyError(
            f"characteristic polynomial {char} does not split over Q"
        )
    chains = group_chains(roots)
    data = SpectralData(chains)
    if not oshima_check(weylalg.theta_expand(q, c), data):
        raise OshimaCheckError(
            f"triangular vanishing conditions fail for chains {data.format()}"
        )
    return data


def _edge_polynomial(q, c: Fraction, np, slope: Fraction) -> Poly:
    (ia, ya), (ib, _) = np.slope_edge(slope)
    coeffs = []
    for i in range(ia, ib + 1):
        y = ya + slope * (i - ia)
        a_i = q.coeff(i)
        if a_i.is_zero() or y.denominator != 1:
            coeffs.append(Fraction(0))
        else:
            coeffs.append(a_i.laurent_coeff(c, int(y) + i))
    return Poly(coeffs)


# -- JSON ------------------------------------------------------------------------


def to_json(data: FormalData) -> str:
    """Canonical JSON form; bit-exact round trip with :func:`from_json`."""
    doc = {
        "points": [
            {
                "location": format_location(loc),
                "factors": [
                    {
                        "w": [[k, str(v)] for k, v in w._items],
                        "spectral": [[str(lam), m] for lam, m in s.chains],
                    }
                    for w, s in factors
                ],
            }
            for loc, factors in data.points
        ]
    }
    return json.dumps(doc, separators=(",", ":"))


def from_json(text: str) -> FormalData:
    try:
        doc = json.loads(text)
        points = []
        for entry in doc["points"]:
            loc = parse_location(entry["location"])
            factors = []
            for f in entry["factors"]:
                w = ExponentialFactor(loc, {int(k): Fraction(v) for k, v in f["w"]})
                s = SpectralData(
                    [(parse_param_expr(lam), int(m)) for lam, m in f["spectral"]]
                )
                factors.append((w, s))
            points.append((loc, factors))
        return FormalData(points)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed formal-data JSON: {exc}") from exc
