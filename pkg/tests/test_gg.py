import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarcalc.errors import DomainError, GuardError
from haarcalc.gg import (
    FinitePGroup,
    ShortExact,
    exactness_violation,
    gg_build,
    gg_loop,
    gg_pi0,
    hom_count,
    homs,
    identity_matrix,
    image_map,
    is_automorphism,
    objects,
)

from oracles import automorphism_count


@pytest.mark.parametrize("N,count", [(0, 1), (1, 4), (2, 16), (3, 49)])
def test_vertex_counts(N, count):
    assert len(gg_build(2, N).vertices) == count


def test_objects_are_partitions():
    assert [str(P) for P in objects(3, 2)] == ["0", "Z/3", "Z/3^2", "Z/3 + Z/3"]
    assert FinitePGroup(2, (1, 3)).partition == (3, 1)
    with pytest.raises(DomainError):
        FinitePGroup(4, (1,))
    with pytest.raises(DomainError):
        FinitePGroup(2, (0,))


@pytest.mark.parametrize(
    "p,partition",
    [(2, (1,)), (3, (1,)), (2, (2,)), (2, (1, 1)), (3, (1, 1)), (2, (2, 1)), (2, (1, 1, 1))],
)
def test_automorphism_counts_match_brute_force(p, partition):
    P = FinitePGroup(p, partition)
    found = sum(1 for m in homs(P, P) if is_automorphism(P, m))
    assert found == automorphism_count(P.moduli)


def test_known_automorphism_counts():
    # |GL_2(F_2)| = 6, |Aut(Z/4)| = 2, |Aut(Z/4 + Z/2)| = 8, |GL_3(F_2)| = 168
    for part, want in [((1, 1), 6), ((2,), 2), ((2, 1), 8), ((1, 1, 1), 168)]:
        P = FinitePGroup(2, part)
        assert sum(1 for m in homs(P, P) if is_automorphism(P, m)) == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_homs_are_homomorphisms(seed):
    rng = random.Random(seed)
    objs = objects(2, 3)
    P, Q = rng.choice(objs), rng.choice(objs)
    ms = list(homs(P, Q))
    assert len(ms) == hom_count(P, Q)
    m = rng.choice(ms)
    table = dict(zip(P.elements(), image_map(P, Q, m)))
    for x in P.elements():
        for y in P.elements():
            assert table[P.add(x, y)] == Q.add(table[x], table[y])


def test_complex_sizes_at_small_length():
    cx = gg_build(2, 2)
    assert cx.sequence_count == 23
    assert cx.edge_count == 165
    assert cx.invalid == []
    assert sum(cx.edge_classes().values()) == cx.edge_count


def test_pi0_invariants():
    info = gg_pi0(gg_build(2, 2))
    assert info["difference_constant"]
    assert info["edges_changing_difference"] == 0
    assert all(info["basepoint_joins_diagonal"].values())
    sizes = sum(c["size"] for c in info["components"])
    assert sizes == info["vertex_count"] == 16


def test_pi0_at_length_three():
    cx = gg_build(2, 3)
    assert (len(cx.vertices), cx.sequence_count, cx.edge_count) == (49, 491, 70865)
    info = gg_pi0(cx)
    assert info["invalid_sequences"] == 0
    assert info["difference_constant"]
    assert info["components_per_difference"]["0"] == 1


def test_exactness_violations_are_named():
    P = FinitePGroup(2, (1,))
    zero = FinitePGroup(2, ())
    ok = ShortExact(zero, P, P, ((),), identity_matrix(P))
    assert exactness_violation(ok) is None
    bad = ShortExact(zero, P, P, ((),), ((0,),))
    assert exactness_violation(bad) is not None


def test_guard():
    with pytest.raises(GuardError):
        gg_build(2, 4)
    with pytest.raises(GuardError):
        gg_build(101, 3)
    with pytest.raises(DomainError):
        gg_build(6, 1)


def test_loop_for_an_automorphism():
    P = FinitePGroup(3, (1,))
    out = gg_loop(P, [[2]])
    assert out["valid"] and not out["degenerate"]
    assert out["path"] == ["nu", "xi^-1"]
    assert gg_loop(P, [[1]])["degenerate"]
    with pytest.raises(DomainError):
        gg_loop(P, [[0]])
    with pytest.raises(DomainError):
        gg_loop(P, [[1, 0]])
