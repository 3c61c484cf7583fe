"""K_0 and K_1 classes as prime exponent vectors.

K_1 of a vector-free automorphism is the factorization of its module; K_0 of a
finite abelian group is the vector of p-lengths (number of composition factors
Z/p), i.e. the devissage to the residue fields.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, InvariantError
from .lca import GroupExpr, Kind, is_vector_free
from .morphisms import Morphism, mod_of
from .scalars import Base, PrimeExponentVector, PositiveReal, TorsorElement, basechange, factorize


@dataclass(frozen=True)
class KClass:
    vector: PrimeExponentVector

    def __add__(self, other: KClass) -> KClass:
        return KClass(self.vector + other.vector)

    def __neg__(self) -> KClass:
        return KClass(-self.vector)

    def as_scalar(self) -> PositiveReal:
        """The element of Q>0 under sum_p Z = Q>0."""
        return PositiveReal(self.vector)

    def to_json(self) -> dict[str, int]:
        return self.vector.to_json()


def k1_class(f: Morphism) -> KClass:
    if not is_vector_free(f.source):
        raise DomainError(f"K_1 classes are computed on vector-free groups, {f.source} is not")
    m = mod_of(f)
    if not m.is_rational:
        raise InvariantError(f"automorphism of vector-free {f.source} has irrational module {m}")
    return KClass(m.rational)


def k1_torsor_action(f: Morphism) -> TorsorElement:
    """k1_class(f) read in Q>0 and pushed to R>0."""
    return basechange(TorsorElement(Base.RATIONAL, k1_class(f).as_scalar()))


def k0_class(G: GroupExpr) -> KClass:
    total = PrimeExponentVector()
    for atom, k in G.terms:
        if atom.kind is not Kind.CYCLIC:
            raise DomainError(f"K_0 classes are computed for finite groups, {atom} is not finite")
        total = total + factorize(atom.param).scaled(k)
    return KClass(total)
