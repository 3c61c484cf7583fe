"""Catalog of short exact sequences and their Fubini defects.

Each sequence ``sub -> total -> quot`` carries enough structure to transport a
compact open subgroup of the total group to the sub and quotient groups.  The
defect is then read off from any adapted compact open C of the total group:

    d = [C : C_can(total)] / ([C n sub : C_can(sub)] * [image(C) : C_can(quot)])

where [.:.] is the generalized index.  The value does not depend on C; the
tests exercise that by sweeping C.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import prod
from typing import Iterator

from .errors import DomainError, InvariantError, UnsupportedError
from .lca import (
    FIXED_KINDS,
    Atom,
    CompactOpenChoice,
    GroupExpr,
    Kind,
    R,
    T,
    Z,
    assemble,
    contains,
    cyclic,
    index_to_canonical,
    integer_ring,
    is_vector_free,
    local_field,
    normalize,
    prufer,
    quot_atom,
    quot_param,
    quotient_by,
    sub_atom,
    sub_param,
    subgroup_of,
)
from .morphisms import Morphism, mod_of, validate_automorphism
from .scalars import ONE, PositiveReal


class SeqKind(enum.Enum):
    COMPACT_OPEN = "COMPACT_OPEN"
    UNIFORMIZER = "UNIFORMIZER"
    IDEAL_FILTRATION = "IDEAL_FILTRATION"
    MULT_N_Z = "MULT_N_Z"
    MULT_N_T = "MULT_N_T"
    MULT_UNIF_PRUFER = "MULT_UNIF_PRUFER"
    SUM_SPLIT = "SUM_SPLIT"
    ISO_LEFT = "ISO_LEFT"
    ISO_RIGHT = "ISO_RIGHT"
    LATTICE_REAL = "LATTICE_REAL"


# kinds whose defect comes from a compact open choice on the total group
_CHOICE_KINDS = frozenset(
    {SeqKind.COMPACT_OPEN, SeqKind.UNIFORMIZER, SeqKind.IDEAL_FILTRATION, SeqKind.MULT_UNIF_PRUFER}
)


@dataclass(frozen=True)
class ExactSequence:
    kind: SeqKind
    sub: GroupExpr
    total: GroupExpr
    quot: GroupExpr
    params: tuple = ()
    choice: CompactOpenChoice | None = None  # the subgroup, for choice kinds
    morphism: Morphism | None = field(default=None, compare=False)
    parts: tuple[GroupExpr, GroupExpr] | None = None  # SUM_SPLIT summands

    @property
    def involves_real(self) -> bool:
        return not is_vector_free(self.total)

    def label(self) -> str:
        if self.kind is SeqKind.COMPACT_OPEN:
            return f"COMPACT_OPEN({self.total}; {list(self.choice.params)})"
        if self.kind is SeqKind.SUM_SPLIT:
            return f"SUM_SPLIT({self.parts[0]}, {self.parts[1]})"
        if self.kind in (SeqKind.ISO_LEFT, SeqKind.ISO_RIGHT):
            return f"{self.kind.value}({self.total if self.kind is SeqKind.ISO_LEFT else self.sub})"
        if self.kind is SeqKind.LATTICE_REAL:
            return "LATTICE_REAL"
        return f"{self.kind.value}({', '.join(map(str, self.params))})"

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "label": self.label(),
            "sub": str(self.sub),
            "total": str(self.total),
            "quot": str(self.quot),
        }
        if self.involves_real:
            out["real_convention"] = REAL_CONVENTION
        return out


REAL_CONVENTION = "Lebesgue measure on R with vol([0,1)) = 1"


def finite_order(expr: GroupExpr) -> int | None:
    """Order of a finite group expression, None if it is infinite."""
    if any(a.kind is not Kind.CYCLIC for a, _ in expr.terms):
        return None
    return prod(a.param**k for a, k in expr.terms)


def _check_orders(seq: ExactSequence) -> ExactSequence:
    orders = [finite_order(g) for g in (seq.sub, seq.total, seq.quot)]
    if None not in orders and orders[1] != orders[0] * orders[2]:
        raise InvariantError(f"{seq.label()}: |total| = {orders[1]} but |sub|*|quot| = {orders[0] * orders[2]}")
    return seq


# -- constructors ----------------------------------------------------------


def compact_open(total: GroupExpr, choice: CompactOpenChoice, kind: SeqKind = SeqKind.COMPACT_OPEN, params=()) -> ExactSequence:
    """C -> X -> X/C for a compact open C of a vector-free X."""
    total = normalize(total)
    if not is_vector_free(total):
        raise DomainError(f"{total} contains R and has no compact open subgroup")
    if choice.expr != total:
        raise DomainError(f"choice was made on {choice.expr}, not on {total}")
    seq = ExactSequence(kind, subgroup_of(choice), total, quotient_by(total, choice), tuple(params), choice)
    return _check_orders(seq)


def uniformizer(q: int) -> ExactSequence:
    """O -> K -> K/O."""
    K = GroupExpr.of(local_field(q))
    return compact_open(K, CompactOpenChoice(K, (0,)), SeqKind.UNIFORMIZER, (q,))


def ideal_filtration(q: int, a: int, b: int) -> ExactSequence:
    """m^a -> m^b -> m^b/m^a, written in the coordinates of m^b = O."""
    if not (isinstance(a, int) and isinstance(b, int)) or a < b:
        raise DomainError(f"IDEAL_FILTRATION needs integers a >= b, got a={a}, b={b}")
    O = GroupExpr.of(integer_ring(q))
    return compact_open(O, CompactOpenChoice(O, (a - b,)), SeqKind.IDEAL_FILTRATION, (q, a, b))


def mult_unif_prufer(q: int) -> ExactSequence:
    """Z/q -> Prufer(q) -> Prufer(q), the second map multiplication by a uniformizer."""
    P = GroupExpr.of(prufer(q))
    return compact_open(P, CompactOpenChoice(P, (1,)), SeqKind.MULT_UNIF_PRUFER, (q,))


def _positive(n, what: str) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"{what} needs a positive integer, got {n!r}")
    return n


def mult_n_z(n: int) -> ExactSequence:
    """Z --n--> Z -> Z/n."""
    n = _positive(n, "MULT_N_Z")
    return ExactSequence(SeqKind.MULT_N_Z, GroupExpr.of(Z), GroupExpr.of(Z), GroupExpr.of(cyclic(n)), (n,))


def mult_n_t(n: int) -> ExactSequence:
    """Z/n -> T --n--> T."""
    n = _positive(n, "MULT_N_T")
    return ExactSequence(SeqKind.MULT_N_T, GroupExpr.of(cyclic(n)), GroupExpr.of(T), GroupExpr.of(T), (n,))


def lattice_real() -> ExactSequence:
    """Z -> R -> T, the one catalog sequence with a non vector-free middle term."""
    return ExactSequence(SeqKind.LATTICE_REAL, GroupExpr.of(Z), GroupExpr.of(R), GroupExpr.of(T))


def sum_split(first: GroupExpr, second: GroupExpr) -> ExactSequence:
    """X' -> X' + X'' -> X''."""
    first, second = normalize(first), normalize(second)
    return ExactSequence(
        SeqKind.SUM_SPLIT, first, first + second, second, parts=(first, second)
    )


def iso_left(f: Morphism) -> ExactSequence:
    """0 -> G -> G' with the second map f."""
    _require_iso(f)
    return ExactSequence(SeqKind.ISO_LEFT, GroupExpr(), f.source, f.target, morphism=f)


def iso_right(f: Morphism) -> ExactSequence:
    """G -> G' -> 0 with the first map f."""
    _require_iso(f)
    return ExactSequence(SeqKind.ISO_RIGHT, f.source, f.target, GroupExpr(), morphism=f)


def _require_iso(f: Morphism) -> None:
    violation = validate_automorphism(f)
    if violation is not None:
        raise DomainError(f"ISO sequences need an isomorphism: {violation}")


def make_sequence(kind: SeqKind | str, *args) -> ExactSequence:
    """Dispatch on the kind name, e.g. ``make_sequence("MULT_N_Z", 3)``."""
    kind = SeqKind(kind) if isinstance(kind, str) else kind
    builders = {
        SeqKind.COMPACT_OPEN: compact_open,
        SeqKind.UNIFORMIZER: uniformizer,
        SeqKind.IDEAL_FILTRATION: ideal_filtration,
        SeqKind.MULT_N_Z: mult_n_z,
        SeqKind.MULT_N_T: mult_n_t,
        SeqKind.MULT_UNIF_PRUFER: mult_unif_prufer,
        SeqKind.SUM_SPLIT: sum_split,
        SeqKind.ISO_LEFT: iso_left,
        SeqKind.ISO_RIGHT: iso_right,
        SeqKind.LATTICE_REAL: lattice_real,
    }
    try:
        return builders[kind](*args)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {kind.value}: {exc}") from exc


# -- adapted compact opens -------------------------------------------------


@dataclass(frozen=True)
class AdaptedTriple:
    """A compact open C of the total group with C n sub and image(C)."""

    total: CompactOpenChoice
    sub: CompactOpenChoice
    quot: CompactOpenChoice


def _split_summands(seq: ExactSequence, c: CompactOpenChoice) -> tuple[CompactOpenChoice, CompactOpenChoice]:
    """Distribute the per-occurrence parameters of the total group onto the
    summands: for every atom the first k' copies belong to X'."""
    first, second = seq.parts
    taken: dict[Atom, int] = {}
    p1, p2 = [], []
    for atom, value in c.pairs():
        i = taken.get(atom, 0)
        taken[atom] = i + 1
        (p1 if i < first.multiplicity(atom) else p2).append((atom, value))
    return assemble(p1), assemble(p2)


def adapted_triple(seq: ExactSequence, c: CompactOpenChoice | None = None) -> AdaptedTriple:
    """Transport a compact open of ``seq.total`` (default: canonical)."""
    kind = seq.kind
    if kind in (SeqKind.ISO_LEFT, SeqKind.ISO_RIGHT, SeqKind.LATTICE_REAL):
        raise UnsupportedError(f"{kind.value} has no adapted compact open bookkeeping")
    total = seq.total.nonreal() if kind is SeqKind.SUM_SPLIT else seq.total
    if c is None:
        c = CompactOpenChoice.canonical(total)
    if c.expr != total:
        raise DomainError(f"adapted choice lives on {c.expr}, expected {total}")
    if kind in _CHOICE_KINDS:
        pairs = list(zip(c.expr.occurrences(), seq.choice.params, c.params))
        sub = assemble((sub_atom(x, s), sub_param(x, s, v)) for x, s, v in pairs)
        quot = assemble((quot_atom(x, s), quot_param(x, s, v)) for x, s, v in pairs)
    elif kind is SeqKind.SUM_SPLIT:
        sub, quot = _split_summands(seq, c)
    elif kind is SeqKind.MULT_N_Z:
        # the only compact open of Z is {0}; its image in Z/n is trivial
        sub = CompactOpenChoice.canonical(seq.sub)
        quot = CompactOpenChoice(seq.quot, (1,) * len(seq.quot.occurrences()))
    elif kind is SeqKind.MULT_N_T:
        # T meets Z/n in all of Z/n and maps onto T
        sub = CompactOpenChoice.canonical(seq.sub)
        quot = CompactOpenChoice.canonical(seq.quot)
    else:
        raise InvariantError(f"no adapted bookkeeping for {kind}")
    expected_sub = seq.sub.nonreal() if kind is SeqKind.SUM_SPLIT else seq.sub
    expected_quot = seq.quot.nonreal() if kind is SeqKind.SUM_SPLIT else seq.quot
    if sub.expr != expected_sub or quot.expr != expected_quot:
        raise InvariantError(f"{seq.label()}: adapted pieces landed on {sub.expr} / {quot.expr}")
    return AdaptedTriple(c, sub, quot)


def adapted_choices(seq: ExactSequence, spread: int = 2) -> Iterator[CompactOpenChoice]:
    """A handful of compact opens of the total group, for independence checks."""
    total = seq.total.nonreal() if seq.kind is SeqKind.SUM_SPLIT else seq.total
    if seq.kind in (SeqKind.ISO_LEFT, SeqKind.ISO_RIGHT, SeqKind.LATTICE_REAL):
        return
    yield CompactOpenChoice.canonical(total)
    occ = total.occurrences()
    for shift in range(-spread, spread + 1):
        params = []
        for atom in occ:
            k = atom.kind
            if k in FIXED_KINDS:
                params.append(None)
            elif k is Kind.LOCAL_FIELD:
                params.append(shift)
            elif k in (Kind.INTEGER_RING, Kind.PRUFER):
                params.append(abs(shift))
            else:
                divisors = [d for d in range(1, atom.param + 1) if atom.param % d == 0]
                params.append(divisors[shift % len(divisors)])
        yield CompactOpenChoice(total, tuple(params))


# -- defects ---------------------------------------------------------------


def defect(seq: ExactSequence, adapted: CompactOpenChoice | None = None) -> PositiveReal:
    """Scalar d with Ha(seq)(root_total) = d * (root_sub (x) root_quot)."""
    if seq.kind is SeqKind.ISO_LEFT:
        return mod_of(seq.morphism)
    if seq.kind is SeqKind.ISO_RIGHT:
        return mod_of(seq.morphism).inverse()
    if seq.kind is SeqKind.LATTICE_REAL:
        return ONE
    tri = adapted_triple(seq, adapted)
    top = index_to_canonical(tri.total)
    bottom = index_to_canonical(tri.sub) + index_to_canonical(tri.quot)
    return PositiveReal(top - bottom)


def defect_spread(seq: ExactSequence, spread: int = 2) -> set[PositiveReal]:
    """Defects over several adapted choices; a singleton when well defined."""
    if seq.kind in (SeqKind.ISO_LEFT, SeqKind.ISO_RIGHT, SeqKind.LATTICE_REAL):
        return {defect(seq)}
    return {defect(seq, c) for c in adapted_choices(seq, spread)}


def tower_sequences(total: GroupExpr, inner: CompactOpenChoice, outer: CompactOpenChoice):
    """The four sequences of the filtration inner <= outer <= total:

    inner -> total -> total/inner, outer/inner -> total/inner -> total/outer,
    outer -> total -> total/outer, inner -> outer -> outer/inner.
    """
    if not contains(outer, inner):
        raise DomainError("tower needs the inner compact open inside the outer one")
    pairs = list(zip(total.occurrences(), inner.params, outer.params))
    s13 = compact_open(total, inner)
    s23 = compact_open(total, outer)
    inner_in_outer = assemble((sub_atom(x, o), sub_param(x, o, i)) for x, i, o in pairs)
    s12 = compact_open(inner_in_outer.expr, inner_in_outer)
    outer_mod_inner = assemble((quot_atom(x, i), quot_param(x, i, o)) for x, i, o in pairs)
    sq = compact_open(outer_mod_inner.expr, outer_mod_inner)
    if sq.quot != s23.quot or s12.quot != sq.sub or s12.total != s23.sub or s12.sub != s13.sub:
        raise InvariantError(f"tower on {total} does not close up")
    return s13, sq, s23, s12


__all__ = [
    "SeqKind",
    "ExactSequence",
    "AdaptedTriple",
    "REAL_CONVENTION",
    "adapted_choices",
    "adapted_triple",
    "compact_open",
    "defect",
    "defect_spread",
    "finite_order",
    "ideal_filtration",
    "iso_left",
    "iso_right",
    "lattice_real",
    "make_sequence",
    "mult_n_t",
    "mult_n_z",
    "mult_unif_prufer",
    "sum_split",
    "tower_sequences",
    "uniformizer",
]
