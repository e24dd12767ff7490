from __future__ import annotations

import random
from fractions import Fraction

import pytest

from irrkatz import corpus
from irrkatz.polys import Poly, RatFunc
from irrkatz.weylalg import DiffOperator


def random_poly_op(rng: random.Random, max_rank: int = 3, max_deg: int = 3) -> DiffOperator:
    """Random nonzero operator with small integer polynomial coefficients."""
    while True:
        coeffs = []
        for _ in range(rng.randint(1, max_rank + 1)):
            poly = Poly([Fraction(rng.randint(-4, 4)) for _ in range(rng.randint(1, max_deg + 1))])
            coeffs.append(RatFunc(poly))
        op = DiffOperator(coeffs)
        if not op.is_zero():
            return op


def random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-12, 12), rng.randint(1, 9))


@pytest.fixture(scope="session")
def corpus_ops():
    """Default instantiation of every corpus entry."""
    return {name: corpus.instantiate(name) for name in corpus.names()}


@pytest.fixture(scope="session")
def corpus_shapes():
    from irrkatz import formal

    shapes = {}
    for name in corpus.names():
        shapes[name] = formal.to_shape(corpus.symbolic_formal_data(name))
    return shapes
