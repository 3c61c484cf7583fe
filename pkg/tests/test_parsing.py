import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from haarcalc.errors import DomainError, ParseError
from haarcalc.lca import normalize
from haarcalc.morphisms import MatrixBlock, Permutation, ScalarMul, ScalarMulValuation, mod_of
from haarcalc.parsing import (
    format_expr,
    parse_diagram,
    parse_expr,
    parse_morphism,
    parse_positive_real,
    parse_scalar,
)
from haarcalc.randgen import random_expr
from haarcalc.scalars import PositiveReal


@pytest.mark.parametrize(
    "text,canonical",
    [
        ("Qp(5) + R + Qp(5)", "R + Qp(5)^2"),
        ("Z/4+Z/2^2", "Z/2^2 + Z/4"),
        ("  T  ", "T"),
        ("K(4) + O(9)", "K(4) + O(9)"),
        ("Prufer(8)", "Prufer(8)"),
        ("D(x) + D(y)", "D(x) + D(y)"),
        ("Z/1 + Z", "Z"),
        ("0", "0"),
        ("", "0"),
    ],
)
def test_parse_and_format(text, canonical):
    assert format_expr(parse_expr(text)) == canonical


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("Qp(4)", "write K(4)"),
        ("Zp(9)", "write O(9)"),
        ("K(6)", "prime power"),
        ("Z/0", "n >= 1"),
        ("R^0", "positive"),
        ("Foo", "unknown atom"),
        ("R R", "expected '+'"),
        ("Qp(", "argument"),
        ("R +", "atom"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_expr(text)
    assert fragment in str(err.value)
    assert err.value.position is not None


@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    e = random_expr(random.Random(seed), vector_free=False)
    assert parse_expr(format_expr(e)) == normalize(e)


def test_scalars():
    assert parse_scalar("-3/2*c^2") == (Fraction(-3, 2), (("c", 2),))
    assert parse_scalar("5") == (Fraction(5), ())
    assert parse_positive_real("2*pi^-1") == PositiveReal.of(2) * PositiveReal.symbol("pi", -1)
    with pytest.raises(ParseError):
        parse_scalar("3/0")
    with pytest.raises(ParseError):
        parse_scalar(" ")
    with pytest.raises(DomainError):
        parse_positive_real("-1")


def test_morphism_shorthands():
    X = parse_expr("Qp(3) + R")
    assert mod_of(parse_morphism("mul(3)", X)) == PositiveReal.of(1)
    assert mod_of(parse_morphism("id", X)) == PositiveReal.of(1)
    f = parse_morphism("mul(2*c)", X)
    blocks = {str(b.atom): b.payload for b in f.blocks}
    assert blocks["R"] == ScalarMul(Fraction(2), (("c", 1),))
    assert blocks["Qp(3)"] == ScalarMul(Fraction(2))
    v = parse_morphism("val(-1)", parse_expr("K(4)"))
    assert v.blocks[0].payload == ScalarMulValuation(-1)


@pytest.mark.parametrize("text", ["mul()", "val(x)", "id(3)", "scale(2)", "[1,"])
def test_morphism_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_morphism(text, parse_expr("Qp(2)"))


def test_morphism_json_blocks():
    X = parse_expr("R^2 + Qp(2)^2 + Z")
    text = json.dumps(
        [
            {"block": "R^2", "matrix": [[1, "c"], [0, 2]]},
            {"block": "Qp(2)^2", "perm": [1, 0]},
            {"block": "Z", "mul": -1},
        ]
    )
    f = parse_morphism(text, X)
    payloads = [b.payload for b in f.blocks]
    assert isinstance(payloads[0], MatrixBlock)
    assert payloads[1] == Permutation((1, 0))
    assert mod_of(f) == PositiveReal.of(2)


@pytest.mark.parametrize(
    "data",
    [
        {"block": "Z^2", "mul": 1},
        {"block": "R + Z", "mul": 1},
        [{"block": "Z", "mul": 1}, {"block": "Z", "mul": -1}],
        {"mul": 1},
        {"block": "Z", "mul": 1, "val": 2},
        {"block": "Z", "matrix": [[1.5]]},
        "nope",
    ],
)
def test_morphism_json_errors(data):
    with pytest.raises(DomainError):
        from haarcalc.parsing import morphism_from_json

        morphism_from_json(data, parse_expr("R + Z"))


def test_diagram():
    text = json.dumps(
        {
            "vertices": ["Qp(5)", "Qp(5)"],
            "edges": [
                {"from": 0, "to": 1, "morphism": "mul(5)"},
                {"from": 0, "to": 1, "morphism": "id"},
            ],
            "cycle": [[0, 1], [1, -1]],
        }
    )
    d, cycles = parse_diagram(text)
    assert len(d.edges) == 2 and cycles == [[(0, 1), (1, -1)]]
    d, cycles = parse_diagram({"vertices": ["Z"], "edges": []})
    assert cycles is None


@pytest.mark.parametrize(
    "data",
    [
        {"edges": []},
        {"vertices": ["Z"], "edges": [{"from": 0}]},
        {"vertices": ["Z"], "edges": [{"from": 0, "to": 4, "morphism": "id"}]},
    ],
)
def test_diagram_errors(data):
    with pytest.raises(DomainError):
        parse_diagram(data)
    with pytest.raises(ParseError):
        parse_diagram("{")
