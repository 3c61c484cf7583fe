from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarcalc.errors import DomainError, UnsupportedError
from haarcalc.lca import (
    R,
    T,
    Z,
    CompactOpenChoice,
    GroupExpr,
    Kind,
    classify,
    cyclic,
    generalized_index,
    integer_ring,
    local_field,
    normalize,
    prufer,
    quotient_by,
    structure_decompose,
    subgroup_of,
)
from haarcalc.parsing import parse_expr
from haarcalc.randgen import random_choice, random_expr

from oracles import brute_generalized_index

seeds = st.integers(0, 2**32 - 1)


def test_normalize_examples():
    Q5 = local_field(5)
    e = GroupExpr((( Q5, 1), (R, 1), (Q5, 1)))
    assert normalize(e).terms == ((R, 1), (Q5, 2))
    assert normalize(GroupExpr()).terms == ()
    assert normalize(GroupExpr(((cyclic(6), 1), (cyclic(4), 1)))).terms == ((cyclic(4), 1), (cyclic(6), 1))
    assert GroupExpr.of(cyclic(1)).is_zero


@given(seeds)
def test_normalize_idempotent(seed):
    import random

    e = random_expr(random.Random(seed), vector_free=False)
    assert normalize(normalize(e)) == normalize(e)
    assert classify(normalize(e)) == classify(e)


@pytest.mark.parametrize(
    "text,flags",
    [
        ("Qp(5)", (True, False, False)),
        ("R + Z", (False, False, False)),
        ("T + Z/4", (True, True, False)),
        ("Z/4", (True, True, True)),
        ("Prufer(3) + Z + D(x)", (True, False, True)),
        ("0", (True, True, True)),
    ],
)
def test_classify(text, flags):
    c = classify(parse_expr(text))
    assert (c.vector_free, c.compact, c.discrete) == flags


def test_structure_decompose_examples():
    d = structure_decompose(parse_expr("R^2 + Qp(3) + Z"))
    assert d.real_rank == 2
    assert str(d.compact) == "Zp(3)"
    assert str(d.discrete) == "Prufer(3) + Z"
    d = structure_decompose(parse_expr("T"))
    assert (d.real_rank, str(d.compact), str(d.discrete)) == (0, "T", "0")
    d = structure_decompose(parse_expr("Z/6"))
    assert (str(d.compact), str(d.discrete)) == ("Z/6", "0")


@given(seeds)
def test_structure_pieces_are_compact_and_discrete(seed):
    import random

    d = structure_decompose(random_expr(random.Random(seed), vector_free=False))
    assert classify(d.compact).compact
    assert classify(d.discrete).discrete


def test_generalized_index_examples():
    X = GroupExpr.of(local_field(7))
    a0, a1 = CompactOpenChoice(X, (0,)), CompactOpenChoice(X, (1,))
    assert generalized_index(a0, a1).value == 7
    assert generalized_index(a1, a0).value == Fraction(1, 7)
    Y = GroupExpr.of(cyclic(12))
    assert generalized_index(CompactOpenChoice(Y, (6,)), CompactOpenChoice(Y, (4,))).value == Fraction(3, 2)


def test_nested_index_is_literal_index():
    O = GroupExpr.of(integer_ring(3))
    # [Z_3 : 9 Z_3] = 9
    assert generalized_index(CompactOpenChoice(O, (0,)), CompactOpenChoice(O, (2,))).value == 9
    P = GroupExpr.of(prufer(2))
    # the order-8 subgroup has index 4 over the order-2 one
    assert generalized_index(CompactOpenChoice(P, (3,)), CompactOpenChoice(P, (1,))).value == 4


def _oracle_occurrences(X):
    out = []
    for a in X.occurrences():
        tag = {Kind.LOCAL_FIELD: "K", Kind.INTEGER_RING: "O", Kind.PRUFER: "Prufer", Kind.CYCLIC: "Z/"}.get(a.kind, "fixed")
        out.append((tag, a.param))
    return out


small_exprs = st.sampled_from(
    ["Qp(2)", "Qp(3) + Z/12", "Zp(2)^2 + Prufer(3)", "K(4) + T", "O(4) + Z + Z/8", "Prufer(2)^2 + D(x)", "Z/30 + Qp(5)"]
)


@settings(max_examples=60, deadline=None)
@given(small_exprs, seeds)
def test_generalized_index_matches_coset_count(text, seed):
    import random

    rng = random.Random(seed)
    X = parse_expr(text)
    c1, c2 = random_choice(rng, X, spread=2), random_choice(rng, X, spread=2)
    want = brute_generalized_index(_oracle_occurrences(X), c1.params, c2.params)
    assert generalized_index(c1, c2).value == want


@given(seeds)
def test_index_cocycle(seed):
    import random

    rng = random.Random(seed)
    X = random_expr(rng)
    c1, c2, c3 = (random_choice(rng, X) for _ in range(3))
    assert generalized_index(c1, c1).is_zero()
    assert generalized_index(c1, c2) + generalized_index(c2, c3) == generalized_index(c1, c3)
    assert (generalized_index(c1, c2) + generalized_index(c2, c1)).is_zero()


def test_quotient_examples():
    Qp = GroupExpr.of(local_field(5))
    assert str(quotient_by(Qp, CompactOpenChoice(Qp, (0,)))) == "Prufer(5)"
    Zp = GroupExpr.of(integer_ring(5))
    assert str(quotient_by(Zp, CompactOpenChoice(Zp, (2,)))) == "Z/25"
    Tg = GroupExpr.of(T)
    assert quotient_by(Tg, CompactOpenChoice(Tg, (None,))).is_zero
    Y = GroupExpr.of(cyclic(12))
    assert str(quotient_by(Y, CompactOpenChoice(Y, (4,)))) == "Z/3"
    assert str(subgroup_of(CompactOpenChoice(Y, (4,)))) == "Z/4"


def test_quotient_rejects_real_lines():
    with pytest.raises(UnsupportedError):
        quotient_by(GroupExpr.of(R), CompactOpenChoice(GroupExpr(), ()))
    with pytest.raises(UnsupportedError):
        CompactOpenChoice.canonical(GroupExpr.of(R))


@pytest.mark.parametrize(
    "text,params",
    [("Zp(3)", (-1,)), ("Z/12", (5,)), ("Z", (0,)), ("T", (1,)), ("Prufer(2)", (-2,)), ("Qp(2)", (None,))],
)
def test_choice_parameter_ranges(text, params):
    with pytest.raises(DomainError):
        CompactOpenChoice(parse_expr(text), params)


def test_choice_length_mismatch():
    with pytest.raises(DomainError):
        CompactOpenChoice(parse_expr("Qp(2)^2"), (0,))
    X = parse_expr("Qp(2) + Z + Z/4")
    c = CompactOpenChoice.from_free(X, [1, 2])
    assert c.params == (1, None, 2)


def test_atom_validation():
    with pytest.raises(DomainError):
        local_field(6)
    with pytest.raises(DomainError):
        cyclic(0)
    assert str(local_field(4)) == "K(4)" and str(integer_ring(9)) == "O(9)"
    assert str(Z) == "Z"
