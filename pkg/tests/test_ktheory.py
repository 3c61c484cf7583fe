import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarcalc.errors import DomainError
from haarcalc.ktheory import KClass, k0_class, k1_class, k1_torsor_action
from haarcalc.morphisms import compose, mod_of
from haarcalc.parsing import parse_expr, parse_morphism
from haarcalc.randgen import random_automorphism, random_expr, random_finite_expr
from haarcalc.scalars import Base, PrimeExponentVector, TorsorElement
from haarcalc.sequences import finite_order

seeds = st.integers(0, 2**32 - 1)


def test_k1_examples():
    assert k1_class(parse_morphism("mul(7)", parse_expr("Qp(7)"))).to_json() == {"7": -1}
    assert k1_class(parse_morphism("val(2)", parse_expr("K(4)"))).to_json() == {"2": -4}
    assert k1_class(parse_morphism("mul(-1)", parse_expr("Z + T"))).to_json() == {}


def test_k1_needs_vector_free():
    with pytest.raises(DomainError):
        k1_class(parse_morphism("id", parse_expr("R")))


def test_torsor_action_is_basechanged():
    t = k1_torsor_action(parse_morphism("mul(3)", parse_expr("Qp(3)^2")))
    assert t.base is Base.REAL
    assert t == TorsorElement(Base.REAL, 1).act(mod_of(parse_morphism("mul(3)", parse_expr("Qp(3)^2"))))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_k1_is_a_homomorphism(seed):
    rng = random.Random(seed)
    X = random_expr(rng)
    f, g = random_automorphism(rng, X), random_automorphism(rng, X)
    assert k1_class(compose(g, f)) == k1_class(g) + k1_class(f)
    assert k1_class(f).as_scalar() == mod_of(f)


def test_k0_examples():
    assert k0_class(parse_expr("Z/12")).to_json() == {"2": 2, "3": 1}
    assert k0_class(parse_expr("Z/4^2 + Z/9")).to_json() == {"2": 4, "3": 2}
    assert k0_class(parse_expr("0")) == KClass(PrimeExponentVector())
    with pytest.raises(DomainError):
        k0_class(parse_expr("Zp(2)"))


@given(seeds)
def test_k0_counts_the_order(seed):
    rng = random.Random(seed)
    G, H = random_finite_expr(rng), random_finite_expr(rng)
    assert k0_class(G).as_scalar().to_fraction() == finite_order(G)
    assert k0_class(G + H) == k0_class(G) + k0_class(H)
    assert (k0_class(G) + -k0_class(G)).vector.is_zero()
