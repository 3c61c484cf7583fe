"""Exact positive scalars and trivialized torsors over them.

Positive rationals are stored by their prime exponent vectors, which is the
additive group (direct sum over primes of Z) that K_1 of vector-free LCA
groups is identified with.  Positive reals that may be irrational are modeled
as a rational part times a monomial in free symbols; equality is syntactic on
the normalized form, so a nonempty symbolic part witnesses a value that the
library cannot prove rational.

Torsors over Q_{>0} and R_{>0} are kept in trivialized coordinates: an element
is its scale relative to a fixed base point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from sympy import factorint, isprime

from .errors import BaseMismatchError, DomainError

RationalLike = Union[int, Fraction]


def _as_fraction(value: RationalLike | str) -> Fraction:
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational number: {value!r}") from exc
    raise DomainError(f"expected an exact rational, got {type(value).__name__}")


class PrimeExponentVector:
    """A finitely supported map prime -> integer exponent.

    Read multiplicatively it is the positive rational prod p**e.  Addition of
    vectors corresponds to multiplication of the rationals.
    """

    __slots__ = ("_items",)

    def __init__(self, exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        pairs = exponents.items() if isinstance(exponents, Mapping) else exponents
        merged: dict[int, int] = {}
        for p, e in pairs:
            p, e = int(p), int(e)
            if not isprime(p):
                raise DomainError(f"exponent key {p} is not prime")
            merged[p] = merged.get(p, 0) + e
        self._items = tuple(sorted((p, e) for p, e in merged.items() if e != 0))

    @classmethod
    def _trusted(cls, items: Iterable[tuple[int, int]]) -> PrimeExponentVector:
        obj = object.__new__(cls)
        obj._items = tuple(sorted((p, e) for p, e in items if e != 0))
        return obj

    @classmethod
    def from_rational(cls, value: RationalLike | str) -> PrimeExponentVector:
        q = _as_fraction(value)
        return factorize(q.numerator, q.denominator)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def __iter__(self) -> Iterator[int]:
        return (p for p, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, p: int) -> int:
        for q, e in self._items:
            if q == p:
                return e
        return 0

    def is_zero(self) -> bool:
        return not self._items

    def __add__(self, other: PrimeExponentVector) -> PrimeExponentVector:
        if not isinstance(other, PrimeExponentVector):
            return NotImplemented
        merged = dict(self._items)
        for p, e in other._items:
            merged[p] = merged.get(p, 0) + e
        return PrimeExponentVector._trusted(merged.items())

    def __neg__(self) -> PrimeExponentVector:
        return PrimeExponentVector._trusted((p, -e) for p, e in self._items)

    def __sub__(self, other: PrimeExponentVector) -> PrimeExponentVector:
        if not isinstance(other, PrimeExponentVector):
            return NotImplemented
        return self + (-other)

    def scaled(self, k: int) -> PrimeExponentVector:
        return PrimeExponentVector._trusted((p, e * k) for p, e in self._items)

    @property
    def value(self) -> Fraction:
        num = den = 1
        for p, e in self._items:
            if e > 0:
                num *= p**e
            else:
                den *= p ** (-e)
        return Fraction(num, den)

    def to_json(self) -> dict[str, int]:
        return {str(p): e for p, e in self._items}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PrimeExponentVector):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == PrimeExponentVector(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("pev", self._items))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}: {e}" for p, e in self._items)
        return f"PrimeExponentVector({{{inner}}})"


def factorize(numerator: int | Fraction, denominator: int = 1) -> PrimeExponentVector:
    """Prime exponent vector of the positive rational numerator/denominator.

    >>> factorize(360, 7).to_json()
    {'2': 3, '3': 2, '5': 1, '7': -1}
    """
    q = Fraction(numerator) / Fraction(denominator) if denominator else None
    if q is None or q <= 0:
        raise DomainError(f"factorize needs a positive rational, got {numerator}/{denominator}")
    exps: dict[int, int] = {}
    for p, e in factorint(q.numerator).items():
        exps[p] = exps.get(p, 0) + e
    for p, e in factorint(q.denominator).items():
        exps[p] = exps.get(p, 0) - e
    return PrimeExponentVector._trusted(exps.items())


def _normalize_symbols(pairs: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    merged: dict[str, int] = {}
    for name, e in pairs:
        if not isinstance(name, str) or not name:
            raise DomainError(f"symbol names must be nonempty strings, got {name!r}")
        merged[name] = merged.get(name, 0) + int(e)
    return tuple(sorted((s, e) for s, e in merged.items() if e != 0))


@dataclass(frozen=True)
class PositiveReal:
    """rational * prod(symbol**exponent) with every symbol a positive real.

    ``hints`` carries optional float approximations of the symbols; they feed
    :meth:`approx` only and never take part in equality or rationality.
    """

    rational: PrimeExponentVector = field(default_factory=PrimeExponentVector)
    symbols: tuple[tuple[str, int], ...] = ()
    hints: tuple[tuple[str, float], ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", _normalize_symbols(self.symbols))
        object.__setattr__(self, "hints", tuple(sorted(dict(self.hints).items())))

    @classmethod
    def of(cls, value: RationalLike | str | PositiveReal) -> PositiveReal:
        if isinstance(value, PositiveReal):
            return value
        return cls(PrimeExponentVector.from_rational(value))

    @classmethod
    def symbol(cls, name: str, exponent: int = 1, hint: float | None = None) -> PositiveReal:
        hints = ((name, float(hint)),) if hint is not None else ()
        return cls(PrimeExponentVector(), ((name, exponent),), hints)

    @property
    def is_rational(self) -> bool:
        return not self.symbols

    def to_fraction(self) -> Fraction:
        if self.symbols:
            raise DomainError(f"{self} has a symbolic part and is not known to be rational")
        return self.rational.value

    def _merged_hints(self, other: PositiveReal) -> tuple[tuple[str, float], ...]:
        if not other.hints:
            return self.hints
        return tuple({**dict(self.hints), **dict(other.hints)}.items())

    def __mul__(self, other: PositiveReal | RationalLike) -> PositiveReal:
        if not isinstance(other, PositiveReal):
            other = PositiveReal.of(other)
        return PositiveReal(
            self.rational + other.rational,
            self.symbols + other.symbols,
            self._merged_hints(other),
        )

    __rmul__ = __mul__

    def inverse(self) -> PositiveReal:
        return PositiveReal(-self.rational, tuple((s, -e) for s, e in self.symbols), self.hints)

    def __truediv__(self, other: PositiveReal | RationalLike) -> PositiveReal:
        if not isinstance(other, PositiveReal):
            other = PositiveReal.of(other)
        return self * other.inverse()

    def __rtruediv__(self, other: RationalLike) -> PositiveReal:
        return PositiveReal.of(other) * self.inverse()

    def __pow__(self, k: int) -> PositiveReal:
        return PositiveReal(
            self.rational.scaled(k), tuple((s, e * k) for s, e in self.symbols), self.hints
        )

    def approx(self) -> float | None:
        """Floating value from the hints, or None if some symbol has no hint."""
        hints = dict(self.hints)
        logv = sum(e * math.log(p) for p, e in self.rational.items())
        for s, e in self.symbols:
            if s not in hints:
                return None
            logv += e * math.log(hints[s])
        return math.exp(logv)

    def to_json(self) -> dict[str, dict[str, int]]:
        return {"rational": self.rational.to_json(), "symbols": dict(self.symbols)}

    def __str__(self) -> str:
        parts = []
        q = self.rational.value
        if q != 1 or not self.symbols:
            parts.append(str(q))
        for s, e in self.symbols:
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts)


ONE = PositiveReal()


class Combine(enum.Enum):
    MULTIPLY = "multiply"
    DIVIDE = "divide"


def scalar_combine(a: PositiveReal, b: PositiveReal, mode: Combine = Combine.MULTIPLY) -> PositiveReal:
    if mode is Combine.MULTIPLY:
        return a * b
    if mode is Combine.DIVIDE:
        return a / b
    raise DomainError(f"unknown combine mode {mode!r}")


class Base(enum.Enum):
    RATIONAL = "Q>0"
    REAL = "R>0"


@dataclass(frozen=True)
class TorsorElement:
    """An element of Tors(Q_{>0}) or Tors(R_{>0}) given by its coordinate."""

    base: Base
    scale: PositiveReal = ONE

    def __post_init__(self):
        if not isinstance(self.scale, PositiveReal):
            object.__setattr__(self, "scale", PositiveReal.of(self.scale))
        if self.base is Base.RATIONAL and not self.scale.is_rational:
            raise DomainError("a Q>0-torsor element cannot carry a symbolic scale")

    def act(self, a: PositiveReal | RationalLike) -> TorsorElement:
        """The left action a . x."""
        return TorsorElement(self.base, PositiveReal.of(a) * self.scale)

    def to_json(self) -> dict:
        return {"base": self.base.value, "scale": self.scale.to_json()}


def torsor_unit(base: Base) -> TorsorElement:
    return TorsorElement(base, ONE)


def _same_base(x: TorsorElement, y: TorsorElement, what: str) -> None:
    if x.base is not y.base:
        raise BaseMismatchError(f"{what}: bases differ ({x.base.value} vs {y.base.value})")


def torsor_tensor(x: TorsorElement, y: TorsorElement) -> TorsorElement:
    _same_base(x, y, "tensor")
    return TorsorElement(x.base, x.scale * y.scale)


def torsor_contract(xprime: TorsorElement, x: TorsorElement) -> PositiveReal:
    """The unique a with a . x = xprime."""
    _same_base(xprime, x, "contract")
    return xprime.scale / x.scale


def basechange(x: TorsorElement) -> TorsorElement:
    """Push a Q>0-torsor element along Q>0 -> R>0."""
    if x.base is not Base.RATIONAL:
        raise DomainError("basechange is only defined on Q>0-torsor elements")
    return TorsorElement(Base.REAL, x.scale)


def signature_check(x: TorsorElement) -> PositiveReal:
    """The signature of x: swap the factors of x (x) x, then contract against
    the unswapped product.  Always 1 for torsor groupoids."""
    pair = (x, x)
    swapped = pair[::-1]
    return torsor_contract(torsor_tensor(*swapped), torsor_tensor(*pair))
