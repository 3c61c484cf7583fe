"""The Haar determinant functor in trivialized coordinates.

A Haar measure on X is stored as ``scale * mu_can(X)``, where mu_can gives the
canonical compact open (see :mod:`haarcalc.lca`) volume 1, R-summands carry
Lebesgue measure with vol([0,1)) = 1 and discrete summands count points.
Every map of Haar torsors is then multiplication by a :class:`PositiveReal`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from . import sequences as sq
from .errors import BaseMismatchError, DomainError, UnsupportedError
from .lca import (
    FIXED_KINDS,
    CompactOpenChoice,
    GroupExpr,
    Kind,
    contains,
    cyclic,
    generalized_index,
    integer_ring,
    is_vector_free,
    local_field,
    normalize,
    prufer,
)
from .morphisms import Morphism, Permutation, mod_of
from .scalars import ONE, PositiveReal


@dataclass(frozen=True)
class HaarElement:
    group: GroupExpr
    scale: PositiveReal = ONE

    def __post_init__(self):
        object.__setattr__(self, "group", normalize(self.group))
        object.__setattr__(self, "scale", PositiveReal.of(self.scale))

    def act(self, a) -> HaarElement:
        return HaarElement(self.group, PositiveReal.of(a) * self.scale)

    def to_json(self) -> dict:
        out = {"group": str(self.group), "scale": self.scale.to_json()}
        if not is_vector_free(self.group):
            out["real_convention"] = sq.REAL_CONVENTION
        return out


def canonical_measure(X: GroupExpr) -> HaarElement:
    return HaarElement(X, ONE)


def root_measure(X: GroupExpr, C: CompactOpenChoice) -> HaarElement:
    """The Haar measure giving C volume 1.

    Its scale is vol_can(C_can) / vol_can(C) = [C_can : C]; e.g. C = pZ_p in
    Q_p gives scale p.
    """
    X = normalize(X)
    if not is_vector_free(X):
        raise UnsupportedError(f"{X} contains R, which has no compact open subgroup")
    if C.expr != X:
        raise DomainError(f"choice was made on {C.expr}, not on {X}")
    return HaarElement(X, PositiveReal(generalized_index(CompactOpenChoice.canonical(X), C)))


def pushforward(f: Morphism, mu: HaarElement) -> HaarElement:
    if mu.group != f.source:
        raise BaseMismatchError(f"measure lives on {mu.group}, morphism starts at {f.source}")
    return HaarElement(f.target, mu.scale * mod_of(f))


@dataclass(frozen=True)
class Split:
    sub: HaarElement
    quot: HaarElement
    r: PositiveReal

    def to_json(self) -> dict:
        return {"sub": self.sub.to_json(), "quot": self.quot.to_json(), "r": self.r.to_json()}


def split(seq: sq.ExactSequence, mu: HaarElement) -> Split:
    """Ha(seq) applied to mu; the whole factor r is put on the sub side."""
    if mu.group != seq.total:
        raise BaseMismatchError(f"measure lives on {mu.group}, sequence total is {seq.total}")
    r = mu.scale * sq.defect(seq)
    return Split(HaarElement(seq.sub, r), HaarElement(seq.quot, ONE), r)


def glue(seq: sq.ExactSequence, sub: HaarElement, quot: HaarElement) -> HaarElement:
    """Inverse of :func:`split`."""
    if sub.group != seq.sub or quot.group != seq.quot:
        raise BaseMismatchError(f"measures on {sub.group} and {quot.group} do not fit {seq.label()}")
    return HaarElement(seq.total, sub.scale * quot.scale / sq.defect(seq))


def haq_membership(mu: HaarElement) -> bool:
    """Whether mu is a rational multiple of a root measure."""
    if not is_vector_free(mu.group):
        raise DomainError(f"Ha^Q is only defined on vector-free groups, not {mu.group}")
    return mu.scale.is_rational


# -- axiom checks ------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    case: str
    lhs: PositiveReal
    rhs: PositiveReal

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "case": self.case,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "pass": self.passed,
        }


def check_axiom3(f: Morphism) -> list[AxiomResult]:
    """Splitting along 0 -> G -> G' (resp. G -> G' -> 0) recovers Ha(f)."""
    mu = canonical_measure(f.source)
    expected = pushforward(f, mu).scale
    left = split(sq.iso_left(f), mu)
    via_left = left.sub.scale * left.quot.scale  # Ha(0) is trivial
    right_seq = sq.iso_right(f)
    # Ha(G') -> Ha(G) (x) Ha(0) inverted: glue mu as the sub measure
    via_right = glue(right_seq, mu, canonical_measure(right_seq.quot)).scale
    case = f"f on {f.source}"
    return [AxiomResult("AXIOM3", case + " via left", via_left, expected),
            AxiomResult("AXIOM3", case + " via right", via_right, expected)]


@dataclass(frozen=True)
class Filtration:
    """G1 <= G2 <= G3 given by its four sequences."""

    name: str
    s13: sq.ExactSequence
    squot: sq.ExactSequence
    s23: sq.ExactSequence
    s12: sq.ExactSequence

    def closes_up(self) -> bool:
        return (
            self.s13.total == self.s23.total
            and self.s13.quot == self.squot.total
            and self.squot.sub == self.s12.quot
            and self.squot.quot == self.s23.quot
            and self.s12.total == self.s23.sub
            and self.s12.sub == self.s13.sub
        )


def check_axiom4(filt: Filtration) -> AxiomResult:
    """d(G1 -> G3) d(G2/G1 -> G3/G1) = d(G2 -> G3) d(G1 -> G2)."""
    if not filt.closes_up():
        raise DomainError(f"filtration {filt.name} has mismatched groups")
    lhs = sq.defect(filt.s13) * sq.defect(filt.squot)
    rhs = sq.defect(filt.s23) * sq.defect(filt.s12)
    return AxiomResult("AXIOM4", filt.name, lhs, rhs)


def swap_morphism(first: GroupExpr, second: GroupExpr) -> Morphism:
    """The flip first + second -> second + first as a block permutation."""
    total = normalize(first + second)
    payloads = {}
    for atom, k in total.terms:
        k1 = first.multiplicity(atom)
        perm = tuple(list(range(k - k1, k)) + list(range(k - k1)))
        if k1 and k1 != k:
            payloads[atom] = Permutation(perm)
    return Morphism.build(total, payloads)


def check_axiom5(first: GroupExpr, second: GroupExpr, adapted: CompactOpenChoice | None = None) -> AxiomResult:
    """Splitting along X' -> X'+X'' -> X'' agrees with the swapped splitting
    transported by the flip of summands."""
    s1 = sq.sum_split(first, second)
    s2 = sq.sum_split(second, first)
    lhs = sq.defect(s1, adapted)
    rhs = sq.defect(s2) * mod_of(swap_morphism(first, second))
    return AxiomResult("AXIOM5", f"({first}, {second})", lhs, rhs)


# filtrations of the catalog ------------------------------------------------


def _tower(name: str, X: GroupExpr, inner: CompactOpenChoice, outer: CompactOpenChoice) -> Filtration:
    return Filtration(name, *sq.tower_sequences(X, inner, outer))


def ideal_chains(q: int, bound: int = 3) -> Iterator[Filtration]:
    """m^a <= m^b <= K and m^a <= m^b <= O, built from the named sequence kinds."""
    K = GroupExpr.of(local_field(q))
    O = GroupExpr.of(integer_ring(q))
    for b in range(-bound, bound + 1):
        for a in range(b, bound + 1):
            s13 = sq.uniformizer(q) if a == 0 else sq.compact_open(K, CompactOpenChoice(K, (a,)))
            s23 = sq.uniformizer(q) if b == 0 else sq.compact_open(K, CompactOpenChoice(K, (b,)))
            P = GroupExpr.of(prufer(q))
            squot = sq.mult_unif_prufer(q) if a - b == 1 else sq.compact_open(P, CompactOpenChoice(P, (a - b,)))
            yield Filtration(f"ideal m^{a} <= m^{b} <= K({q})", s13, squot, s23, sq.ideal_filtration(q, a, b))
    for b in range(0, bound + 1):
        for a in range(b, bound + 1):
            inner, outer = CompactOpenChoice(O, (a,)), CompactOpenChoice(O, (b,))
            yield _tower(f"ideal m^{a} <= m^{b} <= O({q})", O, inner, outer)


def divisor_chains(n: int) -> Iterator[Filtration]:
    """Subgroups of orders d'' | d' inside Z/n."""
    X = GroupExpr.of(cyclic(n))
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    for d1 in divisors:
        for d2 in divisors:
            if d2 % d1 == 0:
                yield _tower(f"cyclic {d1} | {d2} | {n}", X, CompactOpenChoice(X, (d1,)), CompactOpenChoice(X, (d2,)))


def _cyclic_sub(n: int, d: int) -> sq.ExactSequence:
    """Z/d -> Z/n -> Z/(n/d); for n = 1 every term is the zero group."""
    X = GroupExpr.of(cyclic(n))
    return sq.compact_open(X, CompactOpenChoice(X, (d,) if n > 1 else ()))


def lattice_chains(bound: int = 3) -> Iterator[Filtration]:
    """nmZ <= nZ <= Z."""
    for n in range(1, bound + 1):
        for m in range(1, bound + 1):
            squot = _cyclic_sub(n * m, m)
            yield Filtration(
                f"lattice {n * m}Z <= {n}Z <= Z", sq.mult_n_z(n * m), squot, sq.mult_n_z(n), sq.mult_n_z(m)
            )


def circle_chains(bound: int = 3) -> Iterator[Filtration]:
    """Z/n <= Z/nm <= T."""
    for n in range(1, bound + 1):
        for m in range(1, bound + 1):
            s12 = _cyclic_sub(n * m, n)
            yield Filtration(
                f"circle Z/{n} <= Z/{n * m} <= T", sq.mult_n_t(n), sq.mult_n_t(m), sq.mult_n_t(n * m), s12
            )


def _param_range(atom, bound: int) -> list:
    k = atom.kind
    if k in FIXED_KINDS:
        return [None]
    if k is Kind.LOCAL_FIELD:
        return list(range(-1, bound + 1))
    if k in (Kind.INTEGER_RING, Kind.PRUFER):
        return list(range(0, bound + 1))
    return [d for d in range(1, atom.param + 1) if atom.param % d == 0]


TOWER_GROUPS = (
    "Qp(2)",
    "Zp(3)^2",
    "Prufer(2) + Z/4",
    "Qp(3) + Z/6",
    "K(4) + Zp(5)",
    "O(9) + T + Z",
    "Qp(2) + Prufer(3) + D(x)",
)


def compact_open_towers(exprs: Iterable[GroupExpr], bound: int = 3, limit: int = 400) -> Iterator[Filtration]:
    """All nested pairs C1 <= C2 of compact opens with parameters in range."""
    for X in exprs:
        occ = X.occurrences()
        choices = [CompactOpenChoice(X, p) for p in product(*(_param_range(a, bound) for a in occ))]
        count = 0
        for inner in choices:
            for outer in choices:
                if contains(outer, inner) and count < limit:
                    count += 1
                    yield _tower(f"tower {list(inner.params)} <= {list(outer.params)} on {X}", X, inner, outer)


def catalog_filtrations(bound: int = 3) -> Iterator[Filtration]:
    from .parsing import parse_expr

    for q in (2, 3, 4, 5, 9):
        yield from ideal_chains(q, bound)
    for n in range(2, 37):
        yield from divisor_chains(n)
    yield from lattice_chains(bound)
    yield from circle_chains(bound)
    yield from compact_open_towers([parse_expr(t) for t in TOWER_GROUPS], bound)


# -- diagrams and holonomy ---------------------------------------------------


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    morphism: Morphism


@dataclass(frozen=True)
class Diagram:
    vertices: tuple[GroupExpr, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(normalize(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        for i, e in enumerate(self.edges):
            if not (0 <= e.source < len(self.vertices) and 0 <= e.target < len(self.vertices)):
                raise DomainError(f"edge {i} points outside the vertex list")
            if e.morphism.source != self.vertices[e.source] or e.morphism.target != self.vertices[e.target]:
                raise BaseMismatchError(
                    f"edge {i}: morphism {e.morphism.source} -> {e.morphism.target} does not join "
                    f"{self.vertices[e.source]} -> {self.vertices[e.target]}"
                )
            mod_of(e.morphism)  # raises on non-isomorphisms

    @property
    def vector_free(self) -> bool:
        return all(is_vector_free(v) for v in self.vertices)


Walk = Sequence[tuple[int, int]]  # (edge index, +1 forward / -1 backward)


def holonomy(d: Diagram, cycle: Walk) -> PositiveReal:
    """Product of mod_of(edge)^(+-1) along a closed walk."""
    if not cycle:
        return ONE
    position = None
    start = None
    result = ONE
    for step, (idx, orient) in enumerate(cycle):
        if not 0 <= idx < len(d.edges):
            raise DomainError(f"step {step}: no edge {idx}")
        if orient not in (1, -1):
            raise DomainError(f"step {step}: orientation must be +1 or -1, got {orient}")
        e = d.edges[idx]
        tail, head = (e.source, e.target) if orient == 1 else (e.target, e.source)
        if position is None:
            start = tail
        elif position != tail:
            raise DomainError(f"step {step}: walk is at vertex {position} but edge {idx} leaves {tail}")
        position = head
        m = mod_of(e.morphism)
        result = result * (m if orient == 1 else m.inverse())
    if position != start:
        raise DomainError(f"walk is not closed: starts at {start}, ends at {position}")
    return result


def fundamental_cycles(d: Diagram) -> list[list[tuple[int, int]]]:
    """One closed walk per edge outside a BFS spanning forest; that edge is
    traversed backwards, so parallel edges e0, e1 give [(e0, +1), (e1, -1)]."""
    n = len(d.vertices)
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for i, e in enumerate(d.edges):
        adj[e.source].append((e.target, i, 1))
        adj[e.target].append((e.source, i, -1))
    parent: list[tuple[int, int, int] | None] = [None] * n
    seen = [False] * n
    tree: set[int] = set()
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, i, orient in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = (v, i, orient)
                    tree.add(i)
                    queue.append(w)

    def path_to_root(v: int) -> list[tuple[int, int]]:
        # walk from v up to its root, as steps leaving v
        steps = []
        while parent[v] is not None:
            u, i, orient = parent[v]
            steps.append((i, -orient))
            v = u
        return steps

    cycles = []
    for i, e in enumerate(d.edges):
        if i in tree:
            continue
        # out along the tree to the head of edge i, back along i, home again
        down = [(j, -o) for j, o in reversed(path_to_root(e.target))]
        up = path_to_root(e.source)
        cycles.append(down + [(i, -1)] + up)
    return cycles


__all__ = [
    "AxiomResult",
    "Diagram",
    "Edge",
    "Filtration",
    "HaarElement",
    "Split",
    "canonical_measure",
    "catalog_filtrations",
    "check_axiom3",
    "check_axiom4",
    "check_axiom5",
    "fundamental_cycles",
    "glue",
    "haq_membership",
    "holonomy",
    "pushforward",
    "root_measure",
    "split",
    "swap_morphism",
]
