import random
from fractions import Fraction

import pytest

from irrkatz import corpus, formal
from irrkatz.exponents import act_sigma_t
from irrkatz.lattice import LatticeVector
from irrkatz.reduce import (
    AssumptionViolatedError,
    normalize,
    reduce_operator,
    reduce_vector,
    twisted_euler,
    _check_prediction,
)
from irrkatz.rootsys import Verdict, idx


def shape_of(name):
    return formal.to_shape(corpus.symbolic_formal_data(name))


def m_of(name):
    return formal.m_vector(corpus.symbolic_formal_data(name))


# -- normalize ----------------------------------------------------------------


def test_normalize_examples():
    shape = shape_of("Heun")
    a = LatticeVector(shape, [[[1, 2]], [[2, 1]], [[3, 0]], [[0, 3]]])
    sorted_a, steps = normalize(a)
    assert sorted_a.entries[0][0] == (2, 1)
    assert sorted_a.entries[3][0] == (3, 0)
    assert len(steps) == 2
    again, steps2 = normalize(sorted_a)
    assert again == sorted_a and steps2 == []


def test_normalize_swap_count_is_inversion_count():
    rng = random.Random(50)
    shape = formal.to_shape(corpus.symbolic_formal_data("Heun"))
    for _ in range(30):
        chains = [[rng.randint(0, 4) for _ in range(2)] for _ in range(4)]
        total = sum(sum(ch) for ch in chains)
        # rebalance by padding the first slot
        target = max(sum(ch) for ch in chains)
        for ch in chains:
            ch[0] += target - sum(ch)
        a = LatticeVector(shape, [[ch] for ch in chains])
        _, steps = normalize(a)
        inversions = sum(
            1
            for point in a.entries
            for ch in point
            for i in range(len(ch))
            for j in range(i + 1, len(ch))
            if ch[i] < ch[j]
        )
        assert len(steps) == inversions


# -- lattice reduction -----------------------------------------------------------


def test_reduce_gauss():
    transcript = reduce_vector(m_of("Gauss"))
    assert transcript.verdict is Verdict.REAL_ROOT
    euler_steps = transcript.euler_steps()
    assert len(euler_steps) == 1
    assert euler_steps[0].defect == -1
    assert transcript.final.to_text() == "1,0|1,0|1,0"
    assert transcript.replay() == transcript.final


def test_reduce_heun_family_fixed():
    for name in ("Heun", "cHeun", "bHeun", "tHeun", "dHeun"):
        m = m_of(name)
        transcript = reduce_vector(m)
        assert transcript.verdict is Verdict.IMAGINARY_ROOT, name
        assert transcript.fundamental == m
        assert transcript.euler_steps() == []


def test_reduce_doubled_heun():
    transcript = reduce_vector(m_of("Heun").scale(2))
    assert transcript.verdict is Verdict.IMAGINARY_ROOT
    assert transcript.fundamental == m_of("Heun").scale(2)


def test_reduce_rejects_bad_input():
    shape = shape_of("Heun")
    with pytest.raises(ValueError):
        reduce_vector(LatticeVector.zero(shape))
    with pytest.raises(ValueError):
        reduce_vector(LatticeVector(shape, [[[2, -1]], [[1, 0]], [[1, 0]], [[1, 0]]]))
    with pytest.raises(ValueError):
        LatticeVector(shape, [[[1, 1]], [[1, 0]], [[1, 0]], [[1, 0]]])


def test_reduce_idx_conserved_and_verdict_implications():
    rng = random.Random(51)
    for name in corpus.names():
        shape = shape_of(name)
        for _ in range(25):
            a = random_balanced(rng, shape)
            transcript = reduce_vector(a)
            assert transcript.replay() == transcript.final
            euler_steps = transcript.euler_steps()
            assert len(euler_steps) <= a.rank
            assert all(s.after.rank < s.before.rank for s in euler_steps)
            for step in transcript.steps:
                assert idx(step.before) == idx(step.after)
            if transcript.verdict is Verdict.REAL_ROOT:
                assert idx(a) == 2
            elif transcript.verdict is Verdict.IMAGINARY_ROOT:
                assert idx(a) <= 0


def test_transcript_json_lines():
    transcript = reduce_vector(m_of("Gauss"))
    lines = transcript.to_json_lines().splitlines()
    assert len(lines) == len(transcript.steps)
    import json

    first = json.loads(lines[0])
    assert first["kind"] == "twisted_euler"
    assert first["defect"] == -1
    assert first["before"] == "1,1|1,1|1,1"


# -- operator-level reduction ----------------------------------------------------


def test_reduce_operator_gauss_end_to_end():
    op = corpus.instantiate("Gauss")
    result = reduce_operator(op)
    assert result.transcript.verdict is Verdict.REAL_ROOT
    assert len(result.transcript.euler_steps()) == 1
    assert result.final.rank == 1
    data = formal.extract_formal_data(result.final)
    a, b, c = (corpus.get("Gauss").defaults[k] for k in "abc")
    chains_inf = [(lam.as_rat(), m) for lam, m in data.factors(0)[0][1].chains]
    assert chains_inf == [(b + 1 - a, 1)]


def test_reduce_operator_heun_unchanged():
    op = corpus.instantiate("Heun")
    result = reduce_operator(op)
    assert result.transcript.verdict is Verdict.IMAGINARY_ROOT
    assert result.final == op
    assert result.operators == ()


def test_reduce_operator_confluent_heun_unchanged():
    op = corpus.instantiate("cHeun")
    result = reduce_operator(op)
    assert result.transcript.verdict is Verdict.IMAGINARY_ROOT
    assert result.final == op


def test_twisted_euler_integer_resonance_guard():
    # exponent sum along the tuple must stay away from the integers
    op = corpus.instantiate("Gauss", {"a": Fraction(1), "b": Fraction(2, 11), "c": Fraction(3, 5)})
    with pytest.raises(AssumptionViolatedError):
        reduce_operator(op)


def test_reduce_operator_retries_with_fresh_instance():
    bad = corpus.instantiate("Gauss", {"a": Fraction(1), "b": Fraction(2, 11), "c": Fraction(3, 5)})
    result = reduce_operator(bad, reinstantiate=corpus.reinstantiator("Gauss", seed=7))
    assert result.final.rank == 1


def test_reduce_operator_rank_three_rigid():
    # rank-3 operator with spectral type (1,1,1 | 1,1,1 | 2,1): rigid, so
    # the reduction takes two steps of defect -1 through a rank-2 stage,
    # exercising a multiplicity-2 chain at a finite point along the way
    from irrkatz.weylalg import DiffOperator, X, D, prim

    a1, a2, a3 = Fraction(1, 7), Fraction(2, 11), Fraction(3, 13)
    b1, b2 = Fraction(1, 5), Fraction(1, 3)
    th = X * D
    p = prim(
        th * (th + DiffOperator.of(b1 - 1)) * (th + DiffOperator.of(b2 - 1))
        - X * (th + DiffOperator.of(a1)) * (th + DiffOperator.of(a2)) * (th + DiffOperator.of(a3))
    )
    data = formal.extract_formal_data(p)
    point_one = {w.is_zero(): s for w, s in data.factors(2)}
    chains = sorted((lam.as_rat(), m) for lam, m in point_one[True].chains)
    assert chains == [(b1 + b2 - a1 - a2 - a3, 1), (Fraction(0), 2)]
    m = formal.m_vector(data)
    assert idx(m) == 2
    result = reduce_operator(p)
    assert [op.rank for op in result.operators] == [2, 1]
    assert [s.defect for s in result.transcript.euler_steps()] == [-1, -1]
    assert result.final.rank == 1


def test_twisted_euler_through_exponential_twist():
    # a confluent rigid operator where the move picks the factor with a
    # nonzero exponential part: the conjugation by the twist is exercised
    # together with a rank drop and a vanishing factor
    from irrkatz.weylalg import parse

    a, c = Fraction(1, 7), Fraction(1, 3)
    op = parse(f"x*D^2 + (({c}) - x)*D - ({a})")
    data = formal.extract_formal_data(op)
    shape = formal.to_shape(data)
    m = formal.m_vector(data)
    assert idx(m) == 2
    assert {t: m.defect(t) for t in shape.index_tuples()} == {(0, 0): -1, (1, 0): -1}
    locations = data.locations()
    factor_table = [[w for w, _ in factors] for _, factors in data.points]
    nu = formal.exponent_vector(data)
    t = (1, 0)
    assert not factor_table[0][1].is_zero()
    lambdas = [nu.slot(i, t[i], 0).as_rat() for i in range(2)]
    moved = twisted_euler(op, locations, factor_table, t, lambdas)
    assert moved.rank == 1
    _check_prediction(moved, locations, factor_table, m.sigma_t(t), act_sigma_t(nu, t))


def test_twisted_euler_is_an_involution_on_operators():
    # applying the same move twice recovers the original operator exactly
    op = corpus.instantiate("Gauss")
    data = formal.extract_formal_data(op)
    shape = formal.to_shape(data)
    locations = data.locations()
    factor_table = [[w for w, _ in factors] for _, factors in data.points]
    nu = formal.exponent_vector(data)
    t = (0, 0, 0)
    lam1 = [nu.slot(i, t[i], 0).as_rat() for i in range(3)]
    once = twisted_euler(op, locations, factor_table, t, lam1)
    assert once.rank == 1
    nu2 = act_sigma_t(nu, t)
    lam2 = [nu2.slot(i, t[i], 0).as_rat() for i in range(3)]
    twice = twisted_euler(once, locations, factor_table, t, lam2)
    assert twice == op


def test_twisted_euler_matches_prediction_on_all_tuples():
    # exercises the cross-factor exponent coefficients at every weight
    # appearing in the corpus (0, -1, -2): apply the move for each index
    # tuple of each irregular entry and compare extraction to prediction
    for name in ("cHeun", "bHeun", "dHeun"):
        op = corpus.instantiate(name)
        data = formal.extract_formal_data(op)
        shape = formal.to_shape(data)
        locations = data.locations()
        factor_table = [[w for w, _ in factors] for _, factors in data.points]
        m = formal.m_vector(data)
        nu = formal.exponent_vector(data)
        for t in shape.index_tuples():
            lambdas = [nu.slot(i, t[i], 0).as_rat() for i in range(shape.num_points)]
            moved = twisted_euler(op, locations, factor_table, t, lambdas)
            _check_prediction(moved, locations, factor_table, m.sigma_t(t), act_sigma_t(nu, t))


def random_balanced(rng, shape, max_rank=5):
    rank = rng.randint(1, max_rank)
    entries = []
    for lens in shape.chain_lengths:
        point = [[0] * l for l in lens]
        for _ in range(rank):
            j = rng.randrange(len(lens))
            s = rng.randrange(lens[j])
            point[j][s] += 1
        entries.append(point)
    return LatticeVector(shape, entries)
