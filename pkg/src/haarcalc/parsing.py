"""Text formats: group expressions, morphisms, scalars and diagrams.

Group grammar::

    expr := term ("+" term)*        (empty text or "0" is the zero group)
    term := atom ("^" nat)?
    atom := "R" | "Qp(" prime ")" | "Zp(" prime ")" | "Prufer(" q ")"
          | "K(" q ")" | "O(" q ")" | "Z" | "T" | "Z/" nat | "D(" label ")"

with q a prime power.  Printing is ``str(expr)``; parse(str(e)) == e.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from sympy import isprime

from .errors import DomainError, ParseError
from .haar import Diagram, Edge
from .lca import Atom, GroupExpr, Kind, R, T, Z, blackbox, cyclic, prime_power
from .morphisms import (
    Identity,
    MatrixBlock,
    Morphism,
    Payload,
    Permutation,
    ScalarMul,
    ScalarMulValuation,
)
from .scalars import PositiveReal

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()+^/]))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self, what: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what} but the input ended", len(self.text), self.text)
        self.i += 1
        return tok

    def expect(self, value: str) -> int:
        kind, val, pos = self.next(repr(value))
        if val != value:
            raise ParseError(f"expected {value!r}, found {val!r}", pos, self.text)
        return pos

    def number(self, what: str) -> tuple[int, int]:
        kind, val, pos = self.next(what)
        if kind != "num":
            raise ParseError(f"expected {what}, found {val!r}", pos, self.text)
        return int(val), pos


_PRIME_ONLY = {"Qp": "K", "Zp": "O"}
_Q_ATOMS = {"Qp": Kind.LOCAL_FIELD, "K": Kind.LOCAL_FIELD, "Zp": Kind.INTEGER_RING, "O": Kind.INTEGER_RING, "Prufer": Kind.PRUFER}


def _atom(lex: _Lexer) -> Atom:
    kind, val, pos = lex.next("an atom")
    if kind != "name":
        raise ParseError(f"expected an atom, found {val!r}", pos, lex.text)
    if val == "R":
        return R
    if val == "T":
        return T
    if val == "Z":
        nxt = lex.peek()
        if nxt and nxt[1] == "/":
            lex.i += 1
            n, npos = lex.number("a modulus after 'Z/'")
            if n < 1:
                raise ParseError("Z/n needs n >= 1", npos, lex.text)
            return cyclic(n)
        return Z
    if val in _Q_ATOMS:
        lex.expect("(")
        q, qpos = lex.number(f"an argument for {val}")
        lex.expect(")")
        if val in _PRIME_ONLY and not isprime(q):
            hint = f"; for residue field size {q} write {_PRIME_ONLY[val]}({q})" if _is_prime_power(q) else ""
            raise ParseError(f"{val}({q}) needs a prime argument{hint}", qpos, lex.text)
        if not _is_prime_power(q):
            raise ParseError(f"{val}({q}) needs a prime power argument", qpos, lex.text)
        return Atom(_Q_ATOMS[val], q)
    if val == "D":
        lex.expect("(")
        lk, label, lpos = lex.next("a label")
        if lk not in ("name", "num"):
            raise ParseError(f"expected a label, found {label!r}", lpos, lex.text)
        lex.expect(")")
        return blackbox(label)
    raise ParseError(f"unknown atom {val!r}", pos, lex.text)


def _is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except DomainError:
        return False
    return True


def parse_expr(text: str) -> GroupExpr:
    if text.strip() in ("", "0"):
        return GroupExpr()
    lex = _Lexer(text)
    terms: list[tuple[Atom, int]] = []
    while True:
        atom = _atom(lex)
        k = 1
        nxt = lex.peek()
        if nxt and nxt[1] == "^":
            lex.i += 1
            k, kpos = lex.number("an exponent")
            if k < 1:
                raise ParseError("exponents must be positive", kpos, text)
        terms.append((atom, k))
        nxt = lex.peek()
        if nxt is None:
            break
        if nxt[1] != "+":
            raise ParseError(f"expected '+' or end of input, found {nxt[1]!r}", nxt[2], text)
        lex.i += 1
    return GroupExpr.of(*terms)


def format_expr(expr: GroupExpr) -> str:
    return str(expr)


# -- scalars ---------------------------------------------------------------

_FACTOR = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<exp>-?\d+))?$")


def parse_scalar(text: str) -> tuple[Fraction, tuple[tuple[str, int], ...]]:
    """``-3/2*c^2*d`` -> (Fraction(-3, 2), (("c", 2), ("d", 1)))."""
    text = str(text).strip()
    if not text:
        raise ParseError("empty scalar", 0, text)
    coeff = Fraction(1)
    symbols: list[tuple[str, int]] = []
    pos = 0
    for part in text.split("*"):
        piece = part.strip()
        m = _FACTOR.match(piece)
        if m:
            symbols.append((m["name"], int(m["exp"] or 1)))
        else:
            try:
                coeff *= Fraction(piece)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"cannot read {piece!r} as a rational or symbol", pos, text) from None
        pos += len(part) + 1
    return coeff, tuple(symbols)


def parse_positive_real(text: str) -> PositiveReal:
    coeff, symbols = parse_scalar(text)
    if coeff <= 0:
        raise DomainError(f"scale must be positive, got {text!r}")
    return PositiveReal.of(coeff) * PositiveReal(symbols=symbols)


def _entry(x):
    if isinstance(x, str):
        coeff, symbols = parse_scalar(x)
        return ScalarMul(coeff, symbols).as_entry()
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DomainError(f"bad matrix entry {x!r}")
    if isinstance(x, float):
        if not x.is_integer():
            raise DomainError(f"write non-integer entries as fractions, got {x}")
        x = int(x)
    return Fraction(x)


# -- morphisms -------------------------------------------------------------

_CALL = re.compile(r"^\s*(?P<fn>mul|val|id)\s*(?:\((?P<arg>[^()]*)\))?\s*$")


def _payload_from_json(item: dict) -> Payload:
    keys = set(item) - {"block"}
    if keys == {"matrix"}:
        return MatrixBlock(tuple(tuple(_entry(x) for x in row) for row in item["matrix"]))
    if keys == {"mul"} or keys == {"mul", "symbols"}:
        coeff, symbols = parse_scalar(str(item["mul"]))
        extra = tuple((s, int(e)) for s, e in item.get("symbols", {}).items())
        return ScalarMul(coeff, symbols + extra)
    if keys == {"val"}:
        return ScalarMulValuation(int(item["val"]))
    if keys == {"perm"}:
        return Permutation(tuple(item["perm"]))
    if keys in ({"identity"}, set()):
        return Identity()
    raise DomainError(f"block needs exactly one of matrix/mul/val/perm, got {sorted(keys)}")


def morphism_from_json(data: Any, expr: GroupExpr) -> Morphism:
    """Blocks like ``{"block": "R^2", "matrix": [[1,1],[0,1]]}`` (a list or
    a single object); atoms without a block get the identity."""
    if isinstance(data, dict) and "blocks" in data:
        data = data["blocks"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise DomainError("morphism JSON must be a block object or a list of them")
    payloads: dict[Atom, Payload] = {}
    for item in data:
        if not isinstance(item, dict) or "block" not in item:
            raise DomainError(f"every block needs a 'block' selector, got {item!r}")
        sel = parse_expr(str(item["block"]))
        if len(sel.terms) != 1:
            raise DomainError(f"block selector {item['block']!r} must name a single atom")
        atom, k = sel.terms[0]
        if expr.multiplicity(atom) != k:
            raise DomainError(f"{item['block']!r} does not match {atom}^{expr.multiplicity(atom)} in {expr}")
        if atom in payloads:
            raise DomainError(f"two blocks for {atom}")
        payloads[atom] = _payload_from_json(item)
    return Morphism.build(expr, payloads)


def parse_morphism(text: str, expr: GroupExpr) -> Morphism:
    """``mul(q)``, ``val(k)``, ``id`` or the JSON block form."""
    stripped = text.strip()
    if stripped.startswith(("[", "{")):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid morphism JSON: {exc.msg}", exc.pos, text) from None
        return morphism_from_json(data, expr)
    m = _CALL.match(text)
    if not m:
        raise ParseError("morphisms are mul(q), val(k), id or JSON blocks", 0, text)
    fn, arg = m["fn"], m["arg"]
    if fn == "id":
        if arg not in (None, ""):
            raise ParseError("id takes no argument", m.start("arg"), text)
        return Morphism.identity(expr)
    if arg is None or not arg.strip():
        raise ParseError(f"{fn} needs an argument", len(text), text)
    if fn == "val":
        try:
            v = int(arg)
        except ValueError:
            raise ParseError(f"val needs an integer, got {arg!r}", m.start("arg"), text) from None
        return Morphism.valuation(expr, v)
    coeff, symbols = parse_scalar(arg)
    if coeff == 0:
        raise DomainError("mul(0) is not an isomorphism")
    if symbols:
        # symbols live on real lines only; every other block gets the rational part
        payloads = {
            a: ScalarMul(coeff, symbols if a.kind is Kind.REAL_LINE else ())
            for a, _ in expr.terms
        }
        return Morphism.build(expr, payloads)
    return Morphism.scalar(expr, coeff)


def _morphism_field(value, expr: GroupExpr) -> Morphism:
    if isinstance(value, str):
        return parse_morphism(value, expr)
    return morphism_from_json(value, expr)


def parse_diagram(data: Any) -> tuple[Diagram, list[list[tuple[int, int]]] | None]:
    """Diagram JSON with an optional explicit ``cycle`` (list of
    [edge, +1/-1] pairs, or of bare edge indices meaning forward)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid diagram JSON: {exc.msg}", exc.pos, data) from None
    if not isinstance(data, dict) or "vertices" not in data:
        raise DomainError("diagram JSON needs a 'vertices' list")
    vertices = [parse_expr(v) for v in data["vertices"]]
    edges = []
    for i, e in enumerate(data.get("edges", [])):
        try:
            src, tgt = int(e["from"]), int(e["to"])
            morph = e["morphism"]
        except (KeyError, TypeError, ValueError):
            raise DomainError(f"edge {i} needs integer 'from', 'to' and a 'morphism'") from None
        if not (0 <= src < len(vertices) and 0 <= tgt < len(vertices)):
            raise DomainError(f"edge {i} points outside the vertex list")
        f = _morphism_field(morph, vertices[src])
        edges.append(Edge(src, tgt, f.with_target(vertices[tgt])))
    cycles = None
    if "cycle" in data or "cycles" in data:
        raw = data.get("cycles") or [data["cycle"]]
        cycles = [[(s, 1) if isinstance(s, int) else (int(s[0]), int(s[1])) for s in c] for c in raw]
    return Diagram(tuple(vertices), tuple(edges)), cycles
