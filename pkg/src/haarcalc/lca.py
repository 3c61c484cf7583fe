"""Skeletal model of LCA groups as finite direct sums of catalog atoms.

Atoms:

========================  =============================================
``REAL_LINE``             R
``LOCAL_FIELD(q)``        Q_p (q = p) or F_q((t)); only the valuation matters
``INTEGER_RING(q)``       its ring of integers, compact open
``PRUFER(q)``             the discrete quotient K/O (Q_p/Z_p for q = p)
``Z_DISCRETE``            Z
``CIRCLE``                T = R/Z
``CYCLIC(n)``             Z/n
``DISCRETE_BLACKBOX(l)``  an opaque discrete group such as R with the discrete topology
========================  =============================================

Compact open subgroups are chosen per atom occurrence:

* ``LOCAL_FIELD``: an integer ``a`` selecting the fractional ideal m^a,
* ``INTEGER_RING``: ``a >= 0`` selecting m^a,
* ``PRUFER``: ``a >= 0`` selecting the finite subgroup of order q^a,
* ``CYCLIC(n)``: a divisor ``d`` of ``n`` selecting the subgroup of order d,
* ``Z_DISCRETE``/``DISCRETE_BLACKBOX``: always {0}; ``CIRCLE``: always T.
  These carry ``None``.

The canonical choice is a = 0, d = n (whole group), {0} and T respectively.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from sympy import factorint, isprime

from .errors import DomainError, UnsupportedError
from .scalars import PrimeExponentVector, factorize


class Kind(enum.IntEnum):
    REAL_LINE = 0
    LOCAL_FIELD = 1
    INTEGER_RING = 2
    PRUFER = 3
    Z_DISCRETE = 4
    CIRCLE = 5
    CYCLIC = 6
    DISCRETE_BLACKBOX = 7


Q_KINDS = frozenset({Kind.LOCAL_FIELD, Kind.INTEGER_RING, Kind.PRUFER})
FIXED_KINDS = frozenset({Kind.Z_DISCRETE, Kind.CIRCLE, Kind.DISCRETE_BLACKBOX})
COMPACT_KINDS = frozenset({Kind.INTEGER_RING, Kind.CIRCLE, Kind.CYCLIC})
DISCRETE_KINDS = frozenset({Kind.Z_DISCRETE, Kind.PRUFER, Kind.CYCLIC, Kind.DISCRETE_BLACKBOX})


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, f) with q = p**f, or raise DomainError."""
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        raise DomainError(f"{q!r} is not a prime power >= 2")
    fac = factorint(q)
    if len(fac) != 1:
        raise DomainError(f"{q} is not a prime power")
    ((p, f),) = fac.items()
    return p, f


@dataclass(frozen=True)
class Atom:
    kind: Kind
    param: int | None = None
    label: str | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in Q_KINDS:
            prime_power(self.param)
        elif kind is Kind.CYCLIC:
            if not isinstance(self.param, int) or self.param < 1:
                raise DomainError(f"Z/n needs n >= 1, got {self.param!r}")
        elif self.param is not None:
            raise DomainError(f"{kind.name} takes no parameter")
        if kind is Kind.DISCRETE_BLACKBOX:
            if not self.label or not all(c.isalnum() or c == "_" for c in self.label):
                raise DomainError(f"blackbox label must be alphanumeric, got {self.label!r}")
        elif self.label is not None:
            raise DomainError(f"{kind.name} takes no label")

    @property
    def prime(self) -> int:
        if self.kind in Q_KINDS:
            return prime_power(self.param)[0]
        raise DomainError(f"{self} has no residue prime")

    @property
    def q_is_prime(self) -> bool:
        return self.kind in Q_KINDS and isprime(self.param)

    def sort_key(self) -> tuple:
        return (int(self.kind), self.param or 0, self.label or "")

    def is_trivial(self) -> bool:
        return self.kind is Kind.CYCLIC and self.param == 1

    def __str__(self) -> str:
        k = self.kind
        if k is Kind.REAL_LINE:
            return "R"
        if k is Kind.LOCAL_FIELD:
            return f"Qp({self.param})" if isprime(self.param) else f"K({self.param})"
        if k is Kind.INTEGER_RING:
            return f"Zp({self.param})" if isprime(self.param) else f"O({self.param})"
        if k is Kind.PRUFER:
            return f"Prufer({self.param})"
        if k is Kind.Z_DISCRETE:
            return "Z"
        if k is Kind.CIRCLE:
            return "T"
        if k is Kind.CYCLIC:
            return f"Z/{self.param}"
        return f"D({self.label})"


R = Atom(Kind.REAL_LINE)
Z = Atom(Kind.Z_DISCRETE)
T = Atom(Kind.CIRCLE)


def local_field(q: int) -> Atom:
    return Atom(Kind.LOCAL_FIELD, q)


def integer_ring(q: int) -> Atom:
    return Atom(Kind.INTEGER_RING, q)


def prufer(q: int) -> Atom:
    return Atom(Kind.PRUFER, q)


def cyclic(n: int) -> Atom:
    return Atom(Kind.CYCLIC, n)


def blackbox(label: str) -> Atom:
    return Atom(Kind.DISCRETE_BLACKBOX, label=label)


@dataclass(frozen=True)
class GroupExpr:
    """A formal direct sum of atoms with multiplicities.

    Build instances with :meth:`of` (or ``+``), which always yields the
    normalized form; the raw constructor is kept for :func:`normalize`.
    """

    terms: tuple[tuple[Atom, int], ...] = ()

    @classmethod
    def of(cls, *items: Atom | tuple[Atom, int] | GroupExpr) -> GroupExpr:
        terms: list[tuple[Atom, int]] = []
        for item in items:
            if isinstance(item, GroupExpr):
                terms.extend(item.terms)
            elif isinstance(item, Atom):
                terms.append((item, 1))
            else:
                terms.append(tuple(item))
        return normalize(cls(tuple(terms)))

    def occurrences(self) -> list[Atom]:
        return [atom for atom, k in self.terms for _ in range(k)]

    def multiplicity(self, atom: Atom) -> int:
        return sum(k for a, k in self.terms if a == atom)

    @property
    def real_rank(self) -> int:
        return self.multiplicity(R)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def nonreal(self) -> GroupExpr:
        return GroupExpr(tuple((a, k) for a, k in self.terms if a.kind is not Kind.REAL_LINE))

    def __add__(self, other: GroupExpr) -> GroupExpr:
        if not isinstance(other, GroupExpr):
            return NotImplemented
        return GroupExpr.of(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(a) if k == 1 else f"{a}^{k}" for a, k in self.terms)


ZERO = GroupExpr()


def normalize(expr: GroupExpr) -> GroupExpr:
    """Canonical form: atoms sorted by (kind, parameter), multiplicities merged,
    trivial Z/1 summands dropped."""
    counts: dict[Atom, int] = {}
    for atom, k in expr.terms:
        if not isinstance(k, int) or k < 1:
            raise DomainError(f"multiplicity must be a positive integer, got {k!r}")
        if atom.is_trivial():
            continue
        counts[atom] = counts.get(atom, 0) + k
    return GroupExpr(tuple(sorted(counts.items(), key=lambda t: t[0].sort_key())))


@dataclass(frozen=True)
class Classification:
    vector_free: bool
    compact: bool
    discrete: bool

    def to_json(self) -> dict[str, bool]:
        return {"vector_free": self.vector_free, "compact": self.compact, "discrete": self.discrete}


def classify(expr: GroupExpr) -> Classification:
    kinds = {a.kind for a, _ in expr.terms}
    return Classification(
        vector_free=Kind.REAL_LINE not in kinds,
        compact=kinds <= COMPACT_KINDS,
        discrete=kinds <= DISCRETE_KINDS,
    )


def is_vector_free(expr: GroupExpr) -> bool:
    return classify(expr).vector_free


# -- compact open choices -------------------------------------------------


def _check_param(atom: Atom, value) -> None:
    k = atom.kind
    if k is Kind.REAL_LINE:
        raise UnsupportedError("R has no compact open subgroup")
    if k in FIXED_KINDS:
        if value is not None:
            raise DomainError(f"{atom} admits only its fixed compact open, got {value!r}")
        return
    if not isinstance(value, int) or isinstance(value, bool):
        raise DomainError(f"{atom} needs an integer parameter, got {value!r}")
    if k in (Kind.INTEGER_RING, Kind.PRUFER) and value < 0:
        raise DomainError(f"{atom} needs a parameter >= 0, got {value}")
    if k is Kind.CYCLIC and (value < 1 or atom.param % value):
        raise DomainError(f"{value} is not a divisor of {atom.param}")


def canonical_param(atom: Atom) -> int | None:
    if atom.kind is Kind.REAL_LINE:
        raise UnsupportedError("R has no compact open subgroup")
    if atom.kind is Kind.CYCLIC:
        return atom.param
    if atom.kind in Q_KINDS:
        return 0
    return None


@dataclass(frozen=True)
class CompactOpenChoice:
    """One compact open subgroup per atom occurrence of a vector-free expr."""

    expr: GroupExpr
    params: tuple[int | None, ...]

    def __post_init__(self):
        occ = self.expr.occurrences()
        object.__setattr__(self, "params", tuple(self.params))
        if len(occ) != len(self.params):
            raise DomainError(
                f"choice has {len(self.params)} parameters for {len(occ)} atom occurrences"
            )
        for atom, value in zip(occ, self.params):
            _check_param(atom, value)

    @classmethod
    def canonical(cls, expr: GroupExpr) -> CompactOpenChoice:
        return cls(expr, tuple(canonical_param(a) for a in expr.occurrences()))

    @classmethod
    def from_free(cls, expr: GroupExpr, values: Sequence[int]) -> CompactOpenChoice:
        """Fill the non-fixed occurrences, in order, from ``values``."""
        values = list(values)
        params: list[int | None] = []
        for atom in expr.occurrences():
            if atom.kind in FIXED_KINDS:
                params.append(None)
            elif not values:
                raise DomainError(f"not enough choice parameters for {expr}")
            else:
                params.append(values.pop(0))
        if values:
            raise DomainError(f"too many choice parameters for {expr}")
        return cls(expr, tuple(params))

    def pairs(self) -> list[tuple[Atom, int | None]]:
        return list(zip(self.expr.occurrences(), self.params))

    def free_params(self) -> list[int]:
        return [v for a, v in self.pairs() if a.kind not in FIXED_KINDS]

    def to_json(self) -> dict:
        return {"expr": str(self.expr), "params": list(self.params)}


def _require_choice_target(expr: GroupExpr) -> None:
    if not is_vector_free(expr):
        raise UnsupportedError(f"{expr} contains R, which has no compact open subgroup")


# Subgroup / quotient tables.  For an occurrence with chosen subgroup C
# (parameter c) and a second compact open C2 (parameter c2) they return the
# atom of C (resp. X/C) and the parameter of C2 n C (resp. image of C2) in
# that atom's own coordinates.


def sub_atom(atom: Atom, c) -> Atom | None:
    k = atom.kind
    if k in (Kind.LOCAL_FIELD, Kind.INTEGER_RING):
        return integer_ring(atom.param)
    if k is Kind.PRUFER:
        return cyclic(atom.param**c)
    if k is Kind.CYCLIC:
        return cyclic(c)
    if k is Kind.CIRCLE:
        return T
    return None


def sub_param(atom: Atom, c, c2):
    k = atom.kind
    if k in (Kind.LOCAL_FIELD, Kind.INTEGER_RING):
        return max(c, c2) - c
    if k is Kind.PRUFER:
        return atom.param ** min(c, c2)
    if k is Kind.CYCLIC:
        return math.gcd(c, c2)
    return None


def quot_atom(atom: Atom, c) -> Atom | None:
    k = atom.kind
    if k in (Kind.LOCAL_FIELD, Kind.PRUFER):
        return prufer(atom.param)
    if k is Kind.INTEGER_RING:
        return cyclic(atom.param**c)
    if k is Kind.CYCLIC:
        return cyclic(atom.param // c)
    if k in (Kind.Z_DISCRETE, Kind.DISCRETE_BLACKBOX):
        return atom
    return None


def quot_param(atom: Atom, c, c2):
    k = atom.kind
    if k is Kind.LOCAL_FIELD:
        return max(c - c2, 0)
    if k is Kind.INTEGER_RING:
        return atom.param ** max(c - c2, 0)
    if k is Kind.PRUFER:
        return max(c2 - c, 0)
    if k is Kind.CYCLIC:
        return c2 // math.gcd(c, c2)
    return None


def assemble(pairs: Iterable[tuple[Atom | None, int | None]]) -> CompactOpenChoice:
    """Build a normalized expr together with an aligned choice from
    per-occurrence (atom, parameter) pairs.  ``None`` atoms and Z/1 vanish."""
    kept = [(a, v) for a, v in pairs if a is not None and not a.is_trivial()]
    kept.sort(key=lambda t: t[0].sort_key())
    expr = GroupExpr.of(*(a for a, _ in kept))
    return CompactOpenChoice(expr, tuple(v for _, v in kept))


def subgroup_of(choice: CompactOpenChoice) -> GroupExpr:
    """The compact open subgroup itself, as a group expression."""
    return GroupExpr.of(*(a for a in (sub_atom(x, c) for x, c in choice.pairs()) if a))


def quotient_by(expr: GroupExpr, choice: CompactOpenChoice) -> GroupExpr:
    """The discrete quotient expr / C."""
    _require_choice_target(expr)
    if choice.expr != normalize(expr):
        raise DomainError(f"choice was made on {choice.expr}, not on {expr}")
    return GroupExpr.of(*(a for a in (quot_atom(x, c) for x, c in choice.pairs()) if a))


@dataclass(frozen=True)
class Decomposition:
    real_rank: int
    choice: CompactOpenChoice
    discrete: GroupExpr

    @property
    def compact(self) -> GroupExpr:
        return subgroup_of(self.choice)


def structure_decompose(expr: GroupExpr) -> Decomposition:
    """expr = R^n + (extension of a discrete group D by a compact open C),
    with C the canonical choice on the non-real part."""
    expr = normalize(expr)
    rest = expr.nonreal()
    choice = CompactOpenChoice.canonical(rest)
    return Decomposition(expr.real_rank, choice, quotient_by(rest, choice))


def _occurrence_index(atom: Atom, c, c2) -> PrimeExponentVector:
    k = atom.kind
    if k in (Kind.LOCAL_FIELD, Kind.INTEGER_RING):
        return factorize(atom.param).scaled(c2 - c)
    if k is Kind.PRUFER:
        return factorize(atom.param).scaled(c - c2)
    if k is Kind.CYCLIC:
        return factorize(c, c2)
    return PrimeExponentVector()


def generalized_index(c1: CompactOpenChoice, c2: CompactOpenChoice) -> PrimeExponentVector:
    """[C1 : C1 n C2] / [C2 : C1 n C2], i.e. vol(C1)/vol(C2) for any Haar measure."""
    if c1.expr != c2.expr:
        raise DomainError(f"choices live on different groups: {c1.expr} vs {c2.expr}")
    total = PrimeExponentVector()
    for atom, a, b in zip(c1.expr.occurrences(), c1.params, c2.params):
        total = total + _occurrence_index(atom, a, b)
    return total


def index_to_canonical(choice: CompactOpenChoice) -> PrimeExponentVector:
    return generalized_index(choice, CompactOpenChoice.canonical(choice.expr))


def contains(outer: CompactOpenChoice, inner: CompactOpenChoice) -> bool:
    """Whether inner is contained in outer, occurrence by occurrence."""
    if outer.expr != inner.expr:
        return False
    for atom, o, i in zip(outer.expr.occurrences(), outer.params, inner.params):
        k = atom.kind
        if k in (Kind.LOCAL_FIELD, Kind.INTEGER_RING) and i < o:
            return False
        if k is Kind.PRUFER and i > o:
            return False
        if k is Kind.CYCLIC and o % i:
            return False
    return True
