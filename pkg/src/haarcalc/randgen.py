"""Seeded random objects for the property suites.

All generators take a ``random.Random`` instance (Mersenne Twister MT19937);
nothing reads global random state, so a seed fixes every output.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .lca import (
    FIXED_KINDS,
    Atom,
    CompactOpenChoice,
    GroupExpr,
    Kind,
    R,
    T,
    Z,
    blackbox,
    cyclic,
    integer_ring,
    local_field,
    prufer,
)
from .morphisms import (
    Identity,
    MatrixBlock,
    Morphism,
    Permutation,
    ScalarMul,
    ScalarMulValuation,
    validate_automorphism,
)
from .scalars import Base, PositiveReal, TorsorElement

PRIMES = (2, 3, 5, 7, 11)
PRIME_POWERS = (2, 3, 4, 5, 7, 8, 9)
SYMBOLS = ("c", "d", "e")


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_atom(rng: random.Random, vector_free: bool = True) -> Atom:
    kinds = [k for k in Kind if not (vector_free and k is Kind.REAL_LINE)]
    kind = rng.choice(kinds)
    if kind is Kind.REAL_LINE:
        return R
    if kind is Kind.LOCAL_FIELD:
        return local_field(rng.choice(PRIME_POWERS))
    if kind is Kind.INTEGER_RING:
        return integer_ring(rng.choice(PRIME_POWERS))
    if kind is Kind.PRUFER:
        return prufer(rng.choice(PRIME_POWERS))
    if kind is Kind.Z_DISCRETE:
        return Z
    if kind is Kind.CIRCLE:
        return T
    if kind is Kind.CYCLIC:
        return cyclic(rng.randint(2, 36))
    return blackbox(rng.choice(("x", "y", "Rd")))


def random_expr(rng: random.Random, vector_free: bool = True, max_terms: int = 4, max_mult: int = 3) -> GroupExpr:
    n = rng.randint(1, max_terms)
    return GroupExpr.of(*((random_atom(rng, vector_free), rng.randint(1, max_mult)) for _ in range(n)))


def random_finite_expr(rng: random.Random, max_terms: int = 3) -> GroupExpr:
    return GroupExpr.of(*((cyclic(rng.randint(2, 60)), rng.randint(1, 2)) for _ in range(rng.randint(1, max_terms))))


def random_choice(rng: random.Random, expr: GroupExpr, spread: int = 3) -> CompactOpenChoice:
    params = []
    for atom in expr.occurrences():
        k = atom.kind
        if k in FIXED_KINDS:
            params.append(None)
        elif k is Kind.LOCAL_FIELD:
            params.append(rng.randint(-spread, spread))
        elif k in (Kind.INTEGER_RING, Kind.PRUFER):
            params.append(rng.randint(0, spread))
        else:
            params.append(rng.choice([d for d in range(1, atom.param + 1) if atom.param % d == 0]))
    return CompactOpenChoice(expr, tuple(params))


def random_rational(rng: random.Random, bound: int = 30) -> Fraction:
    return Fraction(rng.randint(1, bound), rng.randint(1, bound))


def random_positive_real(rng: random.Random, symbolic: bool = False) -> PositiveReal:
    x = PositiveReal.of(random_rational(rng))
    if symbolic:
        x = x * PositiveReal(symbols=((rng.choice(SYMBOLS), rng.choice((-2, -1, 1, 2))),))
    return x


def random_torsor(rng: random.Random) -> TorsorElement:
    base = rng.choice((Base.RATIONAL, Base.REAL))
    return TorsorElement(base, random_positive_real(rng, symbolic=base is Base.REAL and rng.random() < 0.5))


def _sign(rng: random.Random) -> int:
    return rng.choice((1, -1))


def _unit_for(rng: random.Random, atom: Atom) -> Fraction:
    """A scalar that is an automorphism of the atom."""
    k = atom.kind
    if k is Kind.LOCAL_FIELD:
        p = atom.param
        if atom.q_is_prime:
            base = Fraction(p) ** rng.randint(-3, 3)
            u = Fraction(rng.choice([n for n in range(1, 12) if n % p]), rng.choice([n for n in range(1, 12) if n % p]))
            return _sign(rng) * base * u
        return Fraction(_sign(rng))
    if k in (Kind.INTEGER_RING, Kind.PRUFER):
        p = atom.prime
        return _sign(rng) * Fraction(rng.choice([n for n in range(1, 20) if n % p]), rng.choice([n for n in range(1, 20) if n % p]))
    if k is Kind.CYCLIC:
        n = atom.param
        return Fraction(rng.choice([u for u in range(1, n + 1) if _gcd(u, n) == 1]))
    if k is Kind.REAL_LINE:
        return _sign(rng) * random_rational(rng, 9)
    return Fraction(_sign(rng))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _unimodular(rng: random.Random, size: int, steps: int = 4) -> tuple[tuple[Fraction, ...], ...]:
    m = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for _ in range(steps):
        i, j = rng.sample(range(size), 2)
        c = rng.randint(-2, 2)
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    return tuple(tuple(r) for r in m)


def _random_matrix(rng: random.Random, atom: Atom, size: int):
    k = atom.kind
    if k in (Kind.Z_DISCRETE, Kind.CIRCLE, Kind.DISCRETE_BLACKBOX):
        return _unimodular(rng, size)
    if k is Kind.CYCLIC:
        n = atom.param
        return tuple(tuple(Fraction(rng.randrange(n)) for _ in range(size)) for _ in range(size))
    if k in (Kind.INTEGER_RING, Kind.PRUFER):
        return tuple(tuple(Fraction(rng.randint(-4, 4)) for _ in range(size)) for _ in range(size))
    return tuple(
        tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(size)) for _ in range(size)
    )


def _random_payload(rng: random.Random, atom: Atom, size: int, allow_symbols: bool):
    for _ in range(50):
        options = ["id", "scalar"]
        if size > 1:
            options += ["perm", "matrix"]
        if atom.kind is Kind.LOCAL_FIELD and not atom.q_is_prime:
            options = ["id", "scalar", "val"]
        choice = rng.choice(options)
        if choice == "id":
            return Identity()
        if choice == "val":
            return ScalarMulValuation(rng.randint(-3, 3))
        if choice == "perm":
            perm = list(range(size))
            rng.shuffle(perm)
            return Permutation(tuple(perm))
        if choice == "scalar":
            symbols = ()
            if allow_symbols and atom.kind is Kind.REAL_LINE and rng.random() < 0.5:
                symbols = ((rng.choice(SYMBOLS), rng.choice((-1, 1, 2))),)
            return ScalarMul(_unit_for(rng, atom), symbols)
        block = MatrixBlock(_random_matrix(rng, atom, size))
        probe = Morphism.build(GroupExpr.of((atom, size)), {atom: block})
        if validate_automorphism(probe) is None:
            return block
    return Identity()


def random_automorphism(rng: random.Random, expr: GroupExpr, allow_symbols: bool = False) -> Morphism:
    payloads = {atom: _random_payload(rng, atom, k, allow_symbols) for atom, k in expr.terms}
    f = Morphism.build(expr, payloads)
    violation = validate_automorphism(f)
    if violation is not None:  # pragma: no cover - generators only emit units
        raise AssertionError(f"generator produced a non-automorphism: {violation}")
    return f
