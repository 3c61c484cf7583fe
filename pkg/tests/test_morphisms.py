import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from haarcalc.errors import BaseMismatchError, DomainError, UnsupportedError
from haarcalc.lca import integer_ring, local_field
from haarcalc.morphisms import (
    MatrixBlock,
    Morphism,
    Permutation,
    ScalarMul,
    ScalarMulValuation,
    compose,
    inverse,
    is_automorphism,
    mod_of,
    validate_automorphism,
)
from haarcalc.parsing import parse_expr, parse_morphism
from haarcalc.randgen import random_automorphism, random_expr
from haarcalc.scalars import ONE, PositiveReal

from oracles import lattice_index

seeds = st.integers(0, 2**32 - 1)


def _m(expr, text):
    return parse_morphism(text, parse_expr(expr))


@pytest.mark.parametrize(
    "expr,text,expected",
    [
        ("Qp(5)", "mul(5)", Fraction(1, 5)),
        ("Qp(5)", "mul(1/5)", 5),
        ("Qp(5) + R", "mul(5)", 1),
        ("Qp(3)^2", "mul(9)", Fraction(1, 81)),
        ("R^3", "mul(-2)", 8),
        ("K(4)", "val(1)", Fraction(1, 4)),
        ("K(9)^2", "val(-1)", 81),
        ("Zp(7) + Z/10", "mul(3)", 1),
        ("Z + D(x)", "mul(-1)", 1),
    ],
)
def test_module_examples(expr, text, expected):
    assert mod_of(_m(expr, text)) == PositiveReal.of(expected)


def test_module_of_symbolic_real_scalar():
    f = _m("R^2 + Qp(2)", "mul(3*c)")
    # |3c|^2 from R^2, and |3|_2 = 1 from the 2-adic block
    assert mod_of(f) == PositiveReal.of(9) * PositiveReal.symbol("c", 2)
    assert mod_of(_m("Qp(2)", "mul(3)")) == ONE


def test_matrix_blocks():
    X = parse_expr("R^2 + Qp(2)^2")
    f = Morphism.build(
        X,
        {
            parse_expr("R").terms[0][0]: MatrixBlock(((Fraction(2), Fraction(1)), (Fraction(0), Fraction(3)))),
            local_field(2): MatrixBlock(((Fraction(2), Fraction(0)), (Fraction(1), Fraction(4)))),
        },
    )
    assert mod_of(f) == PositiveReal.of(6) * PositiveReal.of(Fraction(1, 8))


@pytest.mark.parametrize(
    "expr,text,reason",
    [
        ("Z", "mul(2)", "not a unit of Z"),
        ("Zp(3)", "mul(3)", "3-adic unit"),
        ("Z/6", "mul(3)", "unit mod 6"),
        ("Prufer(5)", "mul(10)", "5-adic unit"),
        ("Zp(2)", "val(1)", "valuation"),
        ("Qp(2)", "mul(c)", "only allowed on R"),
    ],
)
def test_non_automorphisms_are_reported(expr, text, reason):
    X = parse_expr(expr)
    if text == "val(1)":
        f = Morphism.build(X, {integer_ring(2): ScalarMulValuation(1)})
    elif text == "mul(c)":
        f = Morphism.build(X, {local_field(2): ScalarMul(Fraction(1), (("c", 1),))})
    else:
        f = parse_morphism(text, X)
    v = validate_automorphism(f)
    assert v is not None and reason in v.reason
    assert not is_automorphism(f)
    with pytest.raises(DomainError):
        mod_of(f)


def test_singular_matrix_is_rejected():
    X = parse_expr("R^2")
    R = X.terms[0][0]
    f = Morphism.build(X, {R: MatrixBlock(((Fraction(1), Fraction(2)), (Fraction(2), Fraction(4))))})
    assert "zero" in validate_automorphism(f).reason


def test_valuation_canonicalizes_on_prime_fields():
    f = Morphism.valuation(parse_expr("Qp(5)"), 2)
    assert f.blocks[0].payload == ScalarMul(Fraction(25))
    g = Morphism.valuation(parse_expr("K(4)"), 0)
    assert is_automorphism(g) and mod_of(g) == ONE


def test_source_target_must_agree():
    with pytest.raises(BaseMismatchError):
        Morphism.identity(parse_expr("Z")).with_target(parse_expr("T"))
    with pytest.raises(BaseMismatchError):
        compose(Morphism.identity(parse_expr("Z")), Morphism.identity(parse_expr("T")))


def test_cyclic_scalars_reduce():
    f = _m("Z/6", "mul(7)")
    assert f.blocks[0].payload == ScalarMul(Fraction(1))


def test_permutation_size_checked():
    X = parse_expr("Z^2")
    with pytest.raises(DomainError):
        Morphism.build(X, {X.terms[0][0]: Permutation((0, 1, 2))})


def test_valuation_and_matrix_do_not_mix():
    X = parse_expr("K(4)^2")
    a = Morphism.valuation(X, 1)
    b = Morphism.build(X, {local_field(4): Permutation((1, 0))})
    with pytest.raises(UnsupportedError):
        compose(a, b)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_module_is_multiplicative(seed):
    rng = random.Random(seed)
    X = random_expr(rng, vector_free=False)
    f = random_automorphism(rng, X, allow_symbols=True)
    g = random_automorphism(rng, X, allow_symbols=True)
    assert mod_of(compose(g, f)) == mod_of(g) * mod_of(f)
    assert mod_of(inverse(f)) == mod_of(f).inverse()
    assert mod_of(Morphism.identity(X)) == ONE


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_inverse_composes_to_identity_module(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    f = random_automorphism(rng, X)
    assert is_automorphism(inverse(f))
    assert mod_of(compose(inverse(f), f)) == ONE


small = st.integers(-6, 6)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]), small, small, small, small)
def test_p_adic_module_matches_lattice_index(p, a, b, c, d):
    det = a * d - b * c
    assume(det != 0 and det % p**4 != 0)
    rows = ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))
    f = Morphism.build(parse_expr(f"Qp({p})^2"), {local_field(p): MatrixBlock(rows)})
    # the image of Z_p^2 has volume 1/[Z_p^2 : M Z_p^2]
    assert mod_of(f) == PositiveReal.of(Fraction(1, lattice_index([[a, b], [c, d]], p)))


def test_to_json_omits_identity_blocks():
    f = Morphism.valuation(parse_expr("Qp(5) + Z"), 1)
    j = Morphism.identity(parse_expr("Z")).to_json()
    assert j["blocks"] == []
    assert len(f.to_json()["blocks"]) == 1
