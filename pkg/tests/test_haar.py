import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarcalc.errors import BaseMismatchError, DomainError, UnsupportedError
from haarcalc.haar import (
    Diagram,
    Edge,
    HaarElement,
    canonical_measure,
    catalog_filtrations,
    check_axiom3,
    check_axiom4,
    check_axiom5,
    fundamental_cycles,
    glue,
    haq_membership,
    holonomy,
    pushforward,
    root_measure,
    split,
    swap_morphism,
)
from haarcalc.lca import CompactOpenChoice, generalized_index
from haarcalc.morphisms import Morphism, compose, is_automorphism, mod_of
from haarcalc.parsing import parse_expr, parse_morphism
from haarcalc.randgen import random_automorphism, random_choice, random_expr
from haarcalc.scalars import ONE, PositiveReal
from haarcalc import sequences as sq

seeds = st.integers(0, 2**32 - 1)
P = PositiveReal.of


def test_root_measure_scale():
    X = parse_expr("Qp(3)")
    assert root_measure(X, CompactOpenChoice(X, (1,))).scale == P(3)
    assert root_measure(X, CompactOpenChoice(X, (-2,))).scale == P(Fraction(1, 9))
    assert root_measure(X, CompactOpenChoice.canonical(X)) == canonical_measure(X)
    Y = parse_expr("Z/12")
    assert root_measure(Y, CompactOpenChoice(Y, (3,))).scale == P(4)


def test_root_measure_refuses_real_lines():
    with pytest.raises(UnsupportedError):
        root_measure(parse_expr("R + Z"), CompactOpenChoice.canonical(parse_expr("Z")))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_root_measures_differ_by_index(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    c1, c2 = random_choice(rng, X), random_choice(rng, X)
    ratio = root_measure(X, c2).scale / root_measure(X, c1).scale
    assert ratio == PositiveReal(generalized_index(c1, c2))


def test_pushforward_examples():
    X = parse_expr("Qp(5)")
    f = parse_morphism("mul(5)", X)
    assert pushforward(f, canonical_measure(X)).scale == P(Fraction(1, 5))
    with pytest.raises(BaseMismatchError):
        pushforward(f, canonical_measure(parse_expr("Z")))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_pushforward_is_functorial(seed):
    rng = random.Random(seed)
    X = random_expr(rng, vector_free=False)
    f, g = random_automorphism(rng, X, True), random_automorphism(rng, X, True)
    mu = canonical_measure(X).act(7)
    assert pushforward(compose(g, f), mu) == pushforward(g, pushforward(f, mu))
    assert pushforward(Morphism.identity(X), mu) == mu


def test_split_and_glue_round_trip():
    seq = sq.mult_unif_prufer(7)
    mu = canonical_measure(seq.total).act(3)
    s = split(seq, mu)
    assert s.r == P(21)
    assert s.sub.scale == P(21) and s.quot.scale == ONE
    assert glue(seq, s.sub, s.quot) == mu
    with pytest.raises(BaseMismatchError):
        split(seq, canonical_measure(parse_expr("Z")))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_glue_inverts_split(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    seq = sq.compact_open(X, random_choice(rng, X))
    mu = canonical_measure(X).act(Fraction(rng.randint(1, 50), rng.randint(1, 50)))
    s = split(seq, mu)
    assert glue(seq, s.sub, s.quot) == mu
    assert glue(seq, s.sub.act(2), s.quot) == mu.act(2)


def test_haq_membership():
    X = parse_expr("Qp(2)")
    assert haq_membership(canonical_measure(X).act(Fraction(3, 7)))
    assert not haq_membership(canonical_measure(X).act(PositiveReal.symbol("pi")))
    with pytest.raises(DomainError):
        haq_membership(canonical_measure(parse_expr("R")))


def test_real_convention_flag():
    assert "real_convention" in HaarElement(parse_expr("R")).to_json()
    assert "real_convention" not in HaarElement(parse_expr("Z")).to_json()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_axiom3_on_random_automorphisms(seed):
    rng = random.Random(seed)
    f = random_automorphism(rng, random_expr(rng, vector_free=False), True)
    assert all(r.passed for r in check_axiom3(f))


def test_axiom4_over_the_catalog():
    results = [check_axiom4(f) for f in catalog_filtrations()]
    assert len(results) > 1000
    failed = [r.case for r in results if not r.passed]
    assert failed == []


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_axiom5_swap(seed):
    rng = random.Random(seed)
    a, b = random_expr(rng, vector_free=False), random_expr(rng, vector_free=False)
    assert check_axiom5(a, b).passed
    assert is_automorphism(swap_morphism(a, b))
    assert mod_of(swap_morphism(a, b)) == ONE


def _two_edges(p, alpha):
    X = parse_expr(f"Qp({p})")
    f = parse_morphism(f"mul({alpha})", X)
    return Diagram((X, X), (Edge(0, 1, f), Edge(0, 1, Morphism.identity(X))))


def test_holonomy_of_parallel_edges():
    d = _two_edges(5, 5)
    cycles = fundamental_cycles(d)
    assert cycles == [[(0, 1), (1, -1)]]
    assert holonomy(d, cycles[0]) == P(Fraction(1, 5))
    assert holonomy(d, [(1, 1), (0, -1)]) == P(5)
    assert holonomy(d, []) == ONE


def test_holonomy_rejects_bad_walks():
    d = _two_edges(3, 3)
    with pytest.raises(DomainError):
        holonomy(d, [(0, 1)])
    with pytest.raises(DomainError):
        holonomy(d, [(0, 1), (1, 1)])
    with pytest.raises(DomainError):
        holonomy(d, [(2, 1)])
    with pytest.raises(DomainError):
        holonomy(d, [(0, 2)])


def test_diagram_validation():
    X, Y = parse_expr("Qp(2)"), parse_expr("Z")
    with pytest.raises(DomainError):
        Diagram((X,), (Edge(0, 3, Morphism.identity(X)),))
    with pytest.raises(BaseMismatchError):
        Diagram((X, Y), (Edge(0, 1, Morphism.identity(X)),))
    with pytest.raises(DomainError):
        Diagram((Y, Y), (Edge(0, 1, parse_morphism("mul(2)", Y)),))


def test_tree_has_no_cycles():
    X = parse_expr("Zp(2)")
    d = Diagram((X, X, X), (Edge(0, 1, Morphism.identity(X)), Edge(1, 2, Morphism.identity(X))))
    assert fundamental_cycles(d) == []


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_vector_free_holonomy_is_rational(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    n = rng.randint(1, 4)
    edges = tuple(Edge(rng.randrange(n), rng.randrange(n), random_automorphism(rng, X)) for _ in range(rng.randint(0, 6)))
    d = Diagram((X,) * n, edges)
    for c in fundamental_cycles(d):
        assert holonomy(d, c).is_rational
