"""Local invariants of differential operators, step by step.

Parses a few operators and walks through the machinery that reads off
their local structure: weights, characteristic polynomials, Newton
polygons, theta expansions, and the extracted formal data.
"""

from fractions import Fraction

from irrkatz import (
    INF,
    char_poly,
    extract_formal_data,
    is_regular_singular,
    newton_polygon,
    parse,
    singular_points,
    theta_expand,
    weight,
)

ZERO = Fraction(0)


def section(title):
    print()
    print(f"== {title}")


section("a first-order operator: x*D - 5")
p = parse("x*D - 5")
print("operator:      ", p)
print("weight at 0:   ", weight(p, ZERO))
print("char poly at 0:", char_poly(p, ZERO).format("t"), "-> exponent 5")
print("char poly at oo:", char_poly(p, INF).format("t"), "-> exponent -5")
print("theta form at 0:", [(i, q.format("t")) for i, q in theta_expand(p, ZERO).terms])

section("the triconfluent operator: D^2 + (-x^2-7)*D + (-2*x+3)")
tri = parse("D^2 + (-x^2-7)*D + (-2*x+3)")
print("operator:        ", tri)
print("finite singular points:", singular_points(tri), "(none: everything sits at infinity)")
np = newton_polygon(tri, INF)
print("Newton polygon at oo: vertices", np.vertices, "slopes", [str(s) for s in np.slopes])
print("regular singular at oo?", is_regular_singular(tri, INF))
data = extract_formal_data(tri)
print("formal data:", data)
print("note the slope-3 factor: its theta form is x^3 + 7x, degree = slope")

section("a ramified example the engine honestly refuses: Airy")
try:
    extract_formal_data(parse("D^2 - x"))
except Exception as exc:
    print("extract_formal_data(D^2 - x) ->", type(exc).__name__, "-", exc)
