"""Brute-force 1-skeleton of the Gillet-Grayson model for finite p-groups.

The category is the skeletal, truncated category of finite abelian p-groups
P = sum_i Z/p^{l_i} with composition length sum(l) <= N.  A homomorphism
P -> Q is a matrix m with m[j][i] in Z/p^min(l_i, m_j); the i-th generator
goes to m[j][i] * p^max(m_j - l_i, 0) in the j-th summand of Q.

Vertices are pairs (P, P'); an edge is a pair of short exact sequences
P0 -> P1 -> Q, P0' -> P1' -> Q with the same cokernel object Q, running from
(P0, P0') to (P1, P1').  Edges are stored as classes keyed by
(P0, P1, P0', P1', Q) with multiplicities, since the count grows like the
square of the number of sequences.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

from sympy import isprime
from sympy.utilities.iterables import partitions

from .errors import DomainError, GuardError

MAX_LENGTH = 3
MAX_MATRICES = 2_000_000

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class FinitePGroup:
    p: int
    partition: tuple[int, ...]

    def __post_init__(self):
        if not isprime(self.p):
            raise DomainError(f"{self.p} is not prime")
        lam = tuple(sorted((int(x) for x in self.partition), reverse=True))
        if any(x < 1 for x in lam):
            raise DomainError(f"partition parts must be positive, got {self.partition}")
        object.__setattr__(self, "partition", lam)

    @property
    def length(self) -> int:
        return sum(self.partition)

    @property
    def order(self) -> int:
        return self.p**self.length

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**x for x in self.partition)

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*(range(m) for m in self.moduli)))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.partition)

    def __str__(self) -> str:
        if not self.partition:
            return "0"
        return " + ".join(f"Z/{self.p}^{x}" if x > 1 else f"Z/{self.p}" for x in self.partition)


def objects(p: int, N: int) -> list[FinitePGroup]:
    """One group per partition of total size <= N, ordered by length."""
    out = [FinitePGroup(p, ())]
    for n in range(1, N + 1):
        found = []
        for part in partitions(n):
            lam = tuple(sorted((k for k, mult in part.items() for _ in range(mult)), reverse=True))
            found.append(FinitePGroup(p, lam))
        out.extend(sorted(found, key=lambda g: g.partition, reverse=True))
    return out


def hom_shape(P: FinitePGroup, Q: FinitePGroup) -> list[list[int]]:
    """Entry ranges p^min(l_i, m_j), indexed [j][i]."""
    return [[P.p ** min(li, mj) for li in P.partition] for mj in Q.partition]


def hom_count(P: FinitePGroup, Q: FinitePGroup) -> int:
    n = 1
    for row in hom_shape(P, Q):
        for r in row:
            n *= r
    return n


def homs(P: FinitePGroup, Q: FinitePGroup) -> Iterator[Matrix]:
    shape = hom_shape(P, Q)
    flat = [r for row in shape for r in row]
    width = len(P.partition)
    for values in product(*(range(r) for r in flat)):
        yield tuple(tuple(values[j * width:(j + 1) * width]) for j in range(len(Q.partition)))


def _coefficients(P: FinitePGroup, Q: FinitePGroup, m: Matrix) -> list[list[int]]:
    p = P.p
    return [
        [m[j][i] * p ** max(mj - li, 0) for i, li in enumerate(P.partition)]
        for j, mj in enumerate(Q.partition)
    ]


def apply(P: FinitePGroup, Q: FinitePGroup, m: Matrix, x) -> tuple[int, ...]:
    coeffs = _coefficients(P, Q, m)
    return tuple(
        sum(c * xi for c, xi in zip(row, x)) % mod for row, mod in zip(coeffs, Q.moduli)
    )


def image_map(P: FinitePGroup, Q: FinitePGroup, m: Matrix) -> list[tuple[int, ...]]:
    """Values of m on P.elements(), in order."""
    coeffs = _coefficients(P, Q, m)
    mods = Q.moduli
    return [
        tuple(sum(c * xi for c, xi in zip(row, x)) % mod for row, mod in zip(coeffs, mods))
        for x in P.elements()
    ]


def identity_matrix(P: FinitePGroup) -> Matrix:
    n = len(P.partition)
    return tuple(tuple(int(i == j) for i in range(n)) for j in range(n))


@dataclass(frozen=True)
class ShortExact:
    sub: FinitePGroup
    total: FinitePGroup
    quot: FinitePGroup
    mono: Matrix
    epi: Matrix

    def to_json(self) -> dict:
        return {
            "sub": str(self.sub),
            "total": str(self.total),
            "quot": str(self.quot),
            "mono": [list(r) for r in self.mono],
            "epi": [list(r) for r in self.epi],
        }


def _is_hom(P: FinitePGroup, Q: FinitePGroup, values: dict) -> bool:
    elems = list(values)
    return all(values[P.add(x, y)] == Q.add(values[x], values[y]) for x in elems for y in elems)


def exactness_violation(s: ShortExact) -> str | None:
    """Elementwise check that sub -> total -> quot is short exact."""
    P0, P1, Q = s.sub, s.total, s.quot
    if P1.order != P0.order * Q.order:
        return f"|{P1}| != |{P0}| * |{Q}|"
    f = dict(zip(P0.elements(), image_map(P0, P1, s.mono)))
    g = dict(zip(P1.elements(), image_map(P1, Q, s.epi)))
    if not _is_hom(P0, P1, f) or not _is_hom(P1, Q, g):
        return "matrix does not define a homomorphism"
    image = set(f.values())
    if len(image) != P0.order:
        return "first map is not injective"
    if set(g.values()) != set(Q.elements()):
        return "second map is not surjective"
    kernel = {x for x, y in g.items() if y == Q.zero}
    if image != kernel:
        return "image of the first map differs from the kernel of the second"
    return None


@dataclass
class GGComplex:
    p: int
    N: int
    objects: list[FinitePGroup]
    sequences: dict[FinitePGroup, list[ShortExact]]  # keyed by cokernel
    invalid: list[tuple[ShortExact, str]] = field(default_factory=list)

    @property
    def vertices(self) -> list[tuple[FinitePGroup, FinitePGroup]]:
        return [(a, b) for a in self.objects for b in self.objects]

    def edge_classes(self) -> dict[tuple, int]:
        """(P0, P1, P0', P1', Q) -> number of edges."""
        out: dict[tuple, int] = {}
        for Q, seqs in self.sequences.items():
            counts: dict[tuple, int] = defaultdict(int)
            for s in seqs:
                counts[(s.sub, s.total)] += 1
            for (a0, a1), n in counts.items():
                for (b0, b1), m in counts.items():
                    out[(a0, a1, b0, b1, Q)] = n * m
        return out

    @property
    def sequence_count(self) -> int:
        return sum(len(v) for v in self.sequences.values())

    @property
    def edge_count(self) -> int:
        return sum(len(v) ** 2 for v in self.sequences.values())


def _guard(p: int, N: int) -> None:
    if not isinstance(N, int) or not 0 <= N <= MAX_LENGTH:
        raise GuardError(f"max length must lie in 0..{MAX_LENGTH}, got {N}")
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    worst = p ** (N * N)
    if worst > MAX_MATRICES:
        raise GuardError(f"enumeration at p={p}, N={N} needs up to {worst} matrices (cap {MAX_MATRICES})")


def gg_build(p: int, N: int) -> GGComplex:
    _guard(p, N)
    objs = objects(p, N)
    elems = {P: P.elements() for P in objs}
    # monos grouped by image, epis grouped by kernel
    monos: dict[tuple, list[Matrix]] = defaultdict(list)
    epis: dict[tuple, list[Matrix]] = defaultdict(list)
    for P0 in objs:
        for P1 in objs:
            if P0.length > P1.length:
                continue
            for m in homs(P0, P1):
                img = image_map(P0, P1, m)
                if len(set(img)) == P0.order:
                    monos[(P0, P1, frozenset(img))].append(m)
    for P1 in objs:
        for Q in objs:
            if Q.length > P1.length:
                continue
            target = set(elems[Q])
            for m in homs(P1, Q):
                img = image_map(P1, Q, m)
                if set(img) == target:
                    kernel = frozenset(x for x, y in zip(elems[P1], img) if y == Q.zero)
                    epis[(P1, Q, kernel)].append(m)
    by_image: dict[tuple, list[tuple[FinitePGroup, frozenset]]] = defaultdict(list)
    for P0, P1, img in monos:
        by_image[(P1, img)].append((P0, img))
    sequences: dict[FinitePGroup, list[ShortExact]] = {Q: [] for Q in objs}
    for (P1, Q, kernel), es in epis.items():
        for P0, img in by_image.get((P1, kernel), []):
            if P0.length + Q.length != P1.length:
                continue
            for mono in monos[(P0, P1, img)]:
                for epi in es:
                    sequences[Q].append(ShortExact(P0, P1, Q, mono, epi))
    cx = GGComplex(p, N, objs, sequences)
    for seqs in sequences.values():
        for s in seqs:
            reason = exactness_violation(s)
            if reason:
                cx.invalid.append((s, reason))
    return cx


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _vertex_name(v) -> str:
    return f"({v[0]}, {v[1]})"


def gg_pi0(cx: GGComplex) -> dict:
    """Connected components of the 1-skeleton with the invariant checks."""
    index = {v: i for i, v in enumerate(cx.vertices)}
    uf = _UnionFind(range(len(index)))
    classes = cx.edge_classes()
    bad_edges = 0
    for (a0, a1, b0, b1, _q), mult in classes.items():
        if b1.length - a1.length != b0.length - a0.length:
            bad_edges += mult
        uf.union(index[(a0, b0)], index[(a1, b1)])
    comps: dict[int, list[int]] = defaultdict(list)
    for v, i in index.items():
        comps[uf.find(i)].append(i)
    vertices = cx.vertices
    constant = True
    per_difference: dict[int, int] = defaultdict(int)
    components = []
    for root in sorted(comps):
        members = comps[root]
        diffs = {vertices[i][1].length - vertices[i][0].length for i in members}
        constant = constant and len(diffs) == 1
        d = min(diffs)
        per_difference[d] += 1
        components.append({"difference": d, "size": len(members), "vertices": [_vertex_name(vertices[i]) for i in members]})
    zero = cx.objects[0]
    nu_ok = {}
    for P in cx.objects:
        ident = ShortExact(zero, P, P, _zero_mono(P), identity_matrix(P))
        present = ident in cx.sequences[P] and exactness_violation(ident) is None
        joined = uf.find(index[(zero, zero)]) == uf.find(index[(P, P)])
        nu_ok[str(P)] = present and joined
    unmerged = sorted(d for d, n in per_difference.items() if n > 1)
    return {
        "prime": cx.p,
        "max_length": cx.N,
        "objects": [str(P) for P in cx.objects],
        "vertex_count": len(vertices),
        "sequence_count": cx.sequence_count,
        "edge_count": cx.edge_count,
        "edge_class_count": len(classes),
        "invalid_sequences": len(cx.invalid),
        "edges_changing_difference": bad_edges,
        "component_count": len(components),
        "components_per_difference": {str(d): n for d, n in sorted(per_difference.items())},
        "components": components,
        "difference_constant": constant and bad_edges == 0,
        "basepoint_joins_diagonal": nu_ok,
        "note": (
            f"length differences {unmerged} split into several components inside the truncation"
            if unmerged
            else "each length difference forms a single component"
        ),
    }


def _zero_mono(P: FinitePGroup) -> Matrix:
    # Hom(0, P) has one element: the matrix with len(P) empty rows
    return tuple(() for _ in P.partition)


def is_automorphism(P: FinitePGroup, m: Matrix) -> bool:
    try:
        img = image_map(P, P, m)
    except (IndexError, TypeError):
        return False
    return len(set(img)) == P.order


def _check_matrix(P: FinitePGroup, m) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in m)
    shape = hom_shape(P, P)
    if len(m) != len(shape) or any(len(r) != len(s) for r, s in zip(m, shape)):
        raise DomainError(f"matrix shape does not match {P}")
    return tuple(tuple(x % r for x, r in zip(row, srow)) for row, srow in zip(m, shape))


def gg_loop(P: FinitePGroup, f: Sequence[Sequence[int]]) -> dict:
    """The 1-simplices nu(P) and xi_f, both running from (0,0) to (P,P)."""
    f = _check_matrix(P, f)
    if not is_automorphism(P, f):
        raise DomainError(f"matrix {f} is not an automorphism of {P}")
    zero = FinitePGroup(P.p, ())
    ident = ShortExact(zero, P, P, _zero_mono(P), identity_matrix(P))
    twisted = ShortExact(zero, P, P, _zero_mono(P), f)
    nu, xi = (ident, ident), (twisted, ident)
    checks = {
        "nu_exact": all(exactness_violation(s) is None for s in nu),
        "xi_exact": all(exactness_violation(s) is None for s in xi),
        "common_cokernel": all(a.quot == b.quot for a, b in (nu, xi)),
        "endpoints": all(
            (a.sub, b.sub) == (zero, zero) and (a.total, b.total) == (P, P) for a, b in (nu, xi)
        ),
    }
    return {
        "group": str(P),
        "nu": [s.to_json() for s in nu],
        "xi": [s.to_json() for s in xi],
        "path": ["nu", "xi^-1"],
        "degenerate": f == identity_matrix(P),
        "checks": checks,
        "valid": all(checks.values()),
    }
