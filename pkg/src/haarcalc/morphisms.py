"""Block-structured isomorphisms between group expressions and their modules.

A morphism carries one block per distinct atom of its source; the block acts
on all ``k`` copies of that atom (k = multiplicity).  Payloads:

* :class:`Identity`
* :class:`ScalarMul` -- multiplication by a nonzero rational, optionally times
  a monomial in positive real symbols (real lines only)
* :class:`ScalarMulValuation` -- multiplication by an element of valuation v,
  for local fields whose residue cardinality is not prime
* :class:`MatrixBlock` -- a k x k matrix
* :class:`Permutation` -- a permutation of the k copies

The module of an automorphism is its forward volume ratio mu(f(S)) / mu(S).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Union

import sympy

from . import linalg
from .errors import BaseMismatchError, DomainError, UnsupportedError
from .lca import Atom, GroupExpr, Kind, is_vector_free, normalize, prime_power
from .scalars import ONE, PositiveReal, factorize


@dataclass(frozen=True)
class Identity:
    def to_json(self):
        return {"identity": True}


@dataclass(frozen=True)
class ScalarMul:
    coeff: Fraction
    symbols: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        merged: dict[str, int] = {}
        for s, e in self.symbols:
            merged[s] = merged.get(s, 0) + e
        object.__setattr__(self, "symbols", tuple(sorted((s, e) for s, e in merged.items() if e)))

    def as_entry(self) -> linalg.Entry:
        if not self.symbols:
            return self.coeff
        expr = sympy.Rational(self.coeff.numerator, self.coeff.denominator)
        for s, e in self.symbols:
            expr *= linalg.sym(s) ** e
        return expr

    def to_json(self):
        out = {"mul": linalg.entry_to_json(self.coeff)}
        if self.symbols:
            out["symbols"] = dict(self.symbols)
        return out


@dataclass(frozen=True)
class ScalarMulValuation:
    v: int

    def to_json(self):
        return {"val": self.v}


@dataclass(frozen=True)
class MatrixBlock:
    rows: linalg.Matrix

    def __post_init__(self):
        object.__setattr__(self, "rows", linalg.as_matrix(self.rows))

    def to_json(self):
        return {"matrix": [[linalg.entry_to_json(x) for x in row] for row in self.rows]}


@dataclass(frozen=True)
class Permutation:
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise DomainError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        object.__setattr__(self, "perm", perm)

    def as_matrix(self) -> linalg.Matrix:
        n = len(self.perm)
        return tuple(
            tuple(Fraction(int(self.perm[j] == i)) for j in range(n)) for i in range(n)
        )

    def to_json(self):
        return {"perm": list(self.perm)}


Payload = Union[Identity, ScalarMul, ScalarMulValuation, MatrixBlock, Permutation]


@dataclass(frozen=True)
class Block:
    atom: Atom
    size: int
    payload: Payload

    def to_json(self):
        block = str(self.atom) if self.size == 1 else f"{self.atom}^{self.size}"
        return {"block": block, **self.payload.to_json()}


def _canonical_payload(atom: Atom, size: int, payload: Payload) -> Payload:
    if isinstance(payload, ScalarMulValuation):
        if payload.v == 0:
            return Identity()
        if atom.kind is Kind.LOCAL_FIELD and atom.q_is_prime:
            # over Q_p a valuation-v scalar is p**v up to a unit
            return ScalarMul(Fraction(atom.param) ** payload.v)
    if isinstance(payload, ScalarMul) and atom.kind is Kind.CYCLIC and not payload.symbols:
        return ScalarMul(linalg.reduce_mod(payload.coeff, atom.param))
    if isinstance(payload, MatrixBlock):
        if len(payload.rows) != size:
            raise DomainError(f"block {atom}^{size} got a {len(payload.rows)}x{len(payload.rows)} matrix")
        if atom.kind is Kind.CYCLIC and linalg.all_exact(payload.rows):
            n = atom.param
            return MatrixBlock(tuple(tuple(linalg.reduce_mod(x, n) for x in row) for row in payload.rows))
    if isinstance(payload, Permutation) and len(payload.perm) != size:
        raise DomainError(f"block {atom}^{size} got a permutation of length {len(payload.perm)}")
    return payload


@dataclass(frozen=True)
class Morphism:
    source: GroupExpr
    target: GroupExpr
    blocks: tuple[Block, ...]

    def __post_init__(self):
        src, tgt = normalize(self.source), normalize(self.target)
        if src != tgt:
            raise BaseMismatchError(
                f"block morphisms map like atoms to like atoms; {src} and {tgt} differ"
            )
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", tgt)
        atoms = [a for a, _ in src.terms]
        if [b.atom for b in self.blocks] != atoms:
            raise DomainError("blocks must cover the atoms of the source in canonical order")

    @classmethod
    def build(
        cls,
        source: GroupExpr,
        payloads: Mapping[Atom, Payload] | None = None,
        target: GroupExpr | None = None,
    ) -> Morphism:
        """Blocks from an atom -> payload mapping; missing atoms get Identity."""
        source = normalize(source)
        payloads = dict(payloads or {})
        blocks = []
        for atom, k in source.terms:
            payload = payloads.pop(atom, Identity())
            blocks.append(Block(atom, k, _canonical_payload(atom, k, payload)))
        if payloads:
            raise DomainError(f"no such atom in {source}: {', '.join(map(str, payloads))}")
        return cls(source, source if target is None else target, tuple(blocks))

    @classmethod
    def identity(cls, expr: GroupExpr) -> Morphism:
        return cls.build(expr)

    @classmethod
    def scalar(cls, expr: GroupExpr, coeff, symbols: tuple[tuple[str, int], ...] = ()) -> Morphism:
        """Multiplication by one scalar on every atom, e.g. ``mul(5)``."""
        expr = normalize(expr)
        return cls.build(expr, {a: ScalarMul(Fraction(coeff), symbols) for a, _ in expr.terms})

    @classmethod
    def valuation(cls, expr: GroupExpr, v: int) -> Morphism:
        """Multiplication by a valuation-v scalar on every local-field atom."""
        expr = normalize(expr)
        return cls.build(
            expr, {a: ScalarMulValuation(v) for a, _ in expr.terms if a.kind is Kind.LOCAL_FIELD}
        )

    def with_target(self, target: GroupExpr) -> Morphism:
        return Morphism(self.source, target, self.blocks)

    def to_json(self):
        return {
            "source": str(self.source),
            "target": str(self.target),
            "blocks": [b.to_json() for b in self.blocks if not isinstance(b.payload, Identity)],
        }


def _to_matrix(payload: Payload, size: int) -> linalg.Matrix:
    if isinstance(payload, Identity):
        return linalg.identity(size)
    if isinstance(payload, MatrixBlock):
        return payload.rows
    if isinstance(payload, Permutation):
        return payload.as_matrix()
    if isinstance(payload, ScalarMul):
        e = payload.as_entry()
        zero = Fraction(0)
        return tuple(tuple(e if i == j else zero for j in range(size)) for i in range(size))
    raise UnsupportedError("a valuation scalar cannot be combined with matrix-type blocks")


def _compose_payload(atom: Atom, size: int, g: Payload, f: Payload) -> Payload:
    if isinstance(f, Identity):
        return g
    if isinstance(g, Identity):
        return f
    if isinstance(g, ScalarMul) and isinstance(f, ScalarMul):
        return ScalarMul(g.coeff * f.coeff, g.symbols + f.symbols)
    if isinstance(g, ScalarMulValuation) and isinstance(f, ScalarMulValuation):
        return ScalarMulValuation(g.v + f.v)
    # a valuation scalar is only known up to units, so it absorbs +-1
    for a, b in ((g, f), (f, g)):
        if isinstance(a, ScalarMulValuation) and isinstance(b, ScalarMul) and abs(b.coeff) == 1 and not b.symbols:
            return a
    if isinstance(g, Permutation) and isinstance(f, Permutation):
        return Permutation(tuple(g.perm[i] for i in f.perm))
    product = linalg.matmul(_to_matrix(g, size), _to_matrix(f, size))
    return MatrixBlock(product)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """g after f."""
    if f.target != g.source:
        raise BaseMismatchError(f"cannot compose: {f.target} is not {g.source}")
    blocks = tuple(
        Block(bf.atom, bf.size, _canonical_payload(bf.atom, bf.size, _compose_payload(bf.atom, bf.size, bg.payload, bf.payload)))
        for bg, bf in zip(g.blocks, f.blocks)
    )
    return Morphism(f.source, g.target, blocks)


def _invert_payload(atom: Atom, payload: Payload) -> Payload:
    if isinstance(payload, Identity):
        return payload
    if isinstance(payload, ScalarMul):
        if payload.coeff == 0:
            raise DomainError("multiplication by zero is not invertible")
        return ScalarMul(1 / payload.coeff, tuple((s, -e) for s, e in payload.symbols))
    if isinstance(payload, ScalarMulValuation):
        return ScalarMulValuation(-payload.v)
    if isinstance(payload, Permutation):
        inv = [0] * len(payload.perm)
        for i, j in enumerate(payload.perm):
            inv[j] = i
        return Permutation(tuple(inv))
    return MatrixBlock(linalg.inverse(payload.rows))


def inverse(f: Morphism) -> Morphism:
    """Inverse of a valid automorphism."""
    violation = validate_automorphism(f)
    if violation is not None:
        raise DomainError(f"not invertible: {violation}")
    blocks = tuple(
        Block(b.atom, b.size, _canonical_payload(b.atom, b.size, _invert_payload(b.atom, b.payload)))
        for b in f.blocks
    )
    return Morphism(f.target, f.source, blocks)


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    block: int
    atom: str
    reason: str

    def __str__(self) -> str:
        return f"block {self.block} ({self.atom}): {self.reason}"

    def to_json(self):
        return {"block": self.block, "atom": self.atom, "reason": self.reason}


def _p_integral(x: Fraction, p: int) -> bool:
    return x.denominator % p != 0


def _unit_reason(atom: Atom, value: linalg.Entry, what: str) -> str | None:
    """Why ``value`` (a scalar or determinant) fails to be a unit for atom."""
    k = atom.kind
    if not linalg.is_exact(value):
        if k is Kind.REAL_LINE:
            return None if not linalg.is_zero(value) else f"{what} is zero"
        return f"symbolic {what} is only allowed on R blocks"
    if value == 0:
        return f"{what} is zero"
    if k is Kind.REAL_LINE:
        return None
    if k is Kind.LOCAL_FIELD:
        if atom.q_is_prime or abs(value) == 1:
            return None
        return f"{what} {value}: only valuation scalars are supported when q is not prime"
    if k in (Kind.INTEGER_RING, Kind.PRUFER):
        p = atom.prime
        if not _p_integral(value, p) or value.numerator % p == 0:
            return f"{what} {value} is not a {p}-adic unit"
        return None
    if k in (Kind.Z_DISCRETE, Kind.CIRCLE, Kind.DISCRETE_BLACKBOX):
        if abs(value) != 1:
            return f"{what} {value} is not a unit of Z"
        return None
    n = atom.param
    if gcd(value.denominator, n) != 1 or gcd(value.numerator, n) != 1:
        return f"{what} {value} is not a unit mod {n}"
    return None


def _entries_reason(atom: Atom, rows: linalg.Matrix) -> str | None:
    k = atom.kind
    if k is Kind.REAL_LINE:
        return None
    if not linalg.all_exact(rows):
        return "symbolic entries are only allowed on R blocks"
    flat = [x for row in rows for x in row]
    if k is Kind.LOCAL_FIELD:
        return None if atom.q_is_prime else "matrix blocks need a prime residue field size"
    if k in (Kind.INTEGER_RING, Kind.PRUFER):
        p = atom.prime
        return None if all(_p_integral(x, p) for x in flat) else f"entries are not {p}-adic integers"
    if k in (Kind.Z_DISCRETE, Kind.CIRCLE, Kind.DISCRETE_BLACKBOX):
        return None if all(x.denominator == 1 for x in flat) else "entries must be integers"
    n = atom.param
    return None if all(gcd(x.denominator, n) == 1 for x in flat) else f"entries are not integral mod {n}"


def _block_reason(block: Block) -> str | None:
    atom, payload = block.atom, block.payload
    if isinstance(payload, (Identity, Permutation)):
        return None
    if isinstance(payload, ScalarMul):
        if payload.symbols and atom.kind is not Kind.REAL_LINE:
            return "symbolic scalars are only allowed on R blocks"
        if payload.symbols:
            return None if payload.coeff != 0 else "scalar is zero"
        return _unit_reason(atom, payload.coeff, "scalar")
    if isinstance(payload, ScalarMulValuation):
        if atom.kind is Kind.LOCAL_FIELD:
            return None
        return f"a valuation-{payload.v} scalar is not an automorphism of {atom}"
    reason = _entries_reason(atom, payload.rows)
    if reason:
        return reason
    return _unit_reason(atom, linalg.det(payload.rows), "determinant")


def validate_automorphism(f: Morphism) -> Violation | None:
    """First violated invertibility condition, or None if f is an isomorphism."""
    if f.source != f.target:
        return Violation(-1, "", f"source {f.source} differs from target {f.target}")
    for i, block in enumerate(f.blocks):
        reason = _block_reason(block)
        if reason:
            return Violation(i, str(block.atom), reason)
    return None


def is_automorphism(f: Morphism) -> bool:
    return validate_automorphism(f) is None


# -- module ------------------------------------------------------------------


def _block_module(block: Block) -> PositiveReal:
    atom, k, payload = block.atom, block.size, block.payload
    if isinstance(payload, (Identity, Permutation)):
        return ONE
    if atom.kind is Kind.REAL_LINE:
        if isinstance(payload, ScalarMul):
            return linalg.abs_monomial(payload.as_entry()) ** k
        return linalg.abs_monomial(linalg.det(payload.rows))
    if atom.kind is not Kind.LOCAL_FIELD:
        return ONE
    p, f_exp = prime_power(atom.param)
    if isinstance(payload, ScalarMulValuation):
        v = payload.v * k
    elif isinstance(payload, ScalarMul):
        v = linalg.valuation(payload.coeff, p) * k
    else:
        v = linalg.valuation(linalg.det(payload.rows), p)
    return PositiveReal(factorize(p).scaled(-f_exp * v))


def mod_of(f: Morphism) -> PositiveReal:
    """Forward volume ratio mu(f(S)) / mu(S) of an automorphism."""
    violation = validate_automorphism(f)
    if violation is not None:
        raise DomainError(f"mod_of needs an automorphism: {violation}")
    result = ONE
    for block in f.blocks:
        result = result * _block_module(block)
    return result


def is_vector_free_morphism(f: Morphism) -> bool:
    return is_vector_free(f.source)
