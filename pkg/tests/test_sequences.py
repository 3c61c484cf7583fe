import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarcalc.errors import DomainError, InvariantError, UnsupportedError
from haarcalc.lca import CompactOpenChoice
from haarcalc.parsing import parse_expr, parse_morphism
from haarcalc.randgen import random_automorphism, random_choice, random_expr
from haarcalc.scalars import ONE, PositiveReal
from haarcalc.sequences import (
    ExactSequence,
    SeqKind,
    adapted_triple,
    compact_open,
    defect,
    defect_spread,
    finite_order,
    ideal_filtration,
    iso_left,
    iso_right,
    lattice_real,
    make_sequence,
    mult_n_t,
    mult_n_z,
    mult_unif_prufer,
    sum_split,
    tower_sequences,
    uniformizer,
)

seeds = st.integers(0, 2**32 - 1)
P = PositiveReal.of


@pytest.mark.parametrize(
    "seq,expected",
    [
        (uniformizer(5), 1),
        (ideal_filtration(3, 2, 0), 1),
        (ideal_filtration(4, 5, 5), 1),
        (mult_unif_prufer(7), 7),
        (mult_n_z(6), 6),
        (mult_n_z(1), 1),
        (mult_n_t(4), 1),
        (lattice_real(), 1),
    ],
)
def test_named_defects(seq, expected):
    assert defect(seq) == P(expected)
    assert defect_spread(seq) == {P(expected)}


def test_iso_defects_follow_the_module():
    f = parse_morphism("mul(5)", parse_expr("Qp(5)"))
    assert defect(iso_left(f)) == P(1) / 5
    assert defect(iso_right(f)) == P(5)
    with pytest.raises(DomainError):
        iso_left(parse_morphism("mul(2)", parse_expr("Z")))


def test_shapes():
    s = uniformizer(3)
    assert (str(s.sub), str(s.total), str(s.quot)) == ("Zp(3)", "Qp(3)", "Prufer(3)")
    s = ideal_filtration(2, 3, 1)
    assert (str(s.sub), str(s.quot)) == ("Zp(2)", "Z/4")
    s = mult_n_t(6)
    assert (str(s.sub), str(s.total), str(s.quot)) == ("Z/6", "T", "T")
    assert lattice_real().involves_real and "real_convention" in lattice_real().to_json()
    assert not uniformizer(3).involves_real


def test_constructor_validation():
    with pytest.raises(DomainError):
        ideal_filtration(3, 0, 2)
    with pytest.raises(DomainError):
        mult_n_z(0)
    with pytest.raises(DomainError):
        mult_n_t(True)
    with pytest.raises(DomainError):
        compact_open(parse_expr("R + Zp(2)"), CompactOpenChoice.canonical(parse_expr("Zp(2)")))
    with pytest.raises(DomainError):
        make_sequence("MULT_N_Z")


def test_finite_orders():
    assert finite_order(parse_expr("Z/4^2 + Z/3")) == 48
    assert finite_order(parse_expr("0")) == 1
    assert finite_order(parse_expr("Z/4 + Zp(2)")) is None


def test_order_check_catches_bad_sequences():
    from haarcalc.sequences import _check_orders

    bad = ExactSequence(SeqKind.MULT_N_Z, parse_expr("Z/2"), parse_expr("Z/6"), parse_expr("Z/2"))
    with pytest.raises(InvariantError):
        _check_orders(bad)


def test_make_sequence_dispatch():
    assert make_sequence("MULT_N_Z", 3) == mult_n_z(3)
    assert make_sequence(SeqKind.UNIFORMIZER, 2) == uniformizer(2)


def test_compact_open_on_a_local_field():
    X = parse_expr("Qp(3)")
    seq = compact_open(X, CompactOpenChoice(X, (1,)))
    assert defect_spread(seq) == {P(1) / 3}


def test_cyclic_compact_open_defect_is_one_for_canonical_adapted():
    X = parse_expr("Z/12")
    seq = compact_open(X, CompactOpenChoice(X, (4,)))
    assert (str(seq.sub), str(seq.quot)) == ("Z/4", "Z/3")
    assert defect_spread(seq) == {ONE}


def test_adapted_triple_for_real_kinds_is_unsupported():
    with pytest.raises(UnsupportedError):
        adapted_triple(lattice_real())


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_defect_independent_of_adapted_choice(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    seq = compact_open(X, random_choice(rng, X, spread=2))
    assert len(defect_spread(seq, spread=3)) == 1


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_sum_split_defect_is_trivial(seed):
    rng = random.Random(seed)
    a, b = random_expr(rng, vector_free=False), random_expr(rng, vector_free=False)
    assert defect_spread(sum_split(a, b)) == {ONE}


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_iso_defects_are_inverse(seed):
    rng = random.Random(seed)
    X = random_expr(rng, vector_free=False)
    f = random_automorphism(rng, X, allow_symbols=True)
    assert defect(iso_left(f)) * defect(iso_right(f)) == ONE


def test_tower_sequences_close_up():
    X = parse_expr("Qp(2) + Z/8")
    inner = CompactOpenChoice(X, (3, 2))
    outer = CompactOpenChoice(X, (1, 4))
    s13, sq, s23, s12 = tower_sequences(X, inner, outer)
    assert s13.total == s23.total == X
    assert s13.quot == sq.total and sq.quot == s23.quot
    assert s12.total == s23.sub and s12.sub == s13.sub
    assert defect(s13) * defect(sq) == defect(s23) * defect(s12)
    with pytest.raises(DomainError):
        tower_sequences(X, outer, inner)
