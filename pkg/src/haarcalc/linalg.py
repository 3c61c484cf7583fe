"""Small exact matrix routines.

Entries are ``Fraction`` in the common case.  Blocks on real lines may carry
symbolic entries; those are sympy expressions over positive symbols and go
through sympy, everything else stays in pure Fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

import sympy

from .errors import DomainError, UnsupportedError
from .scalars import PositiveReal, factorize

Entry = Union[Fraction, sympy.Expr]
Matrix = tuple[tuple[Entry, ...], ...]


def sym(name: str) -> sympy.Symbol:
    return sympy.Symbol(name, positive=True)


def is_exact(entry) -> bool:
    return isinstance(entry, Fraction)


def coerce_entry(entry) -> Entry:
    """Turn ints, Fractions and rational sympy numbers into Fraction; keep
    genuinely symbolic sympy expressions."""
    if isinstance(entry, bool):
        raise DomainError("booleans are not matrix entries")
    if isinstance(entry, (int, Fraction)):
        return Fraction(entry)
    if isinstance(entry, sympy.Expr):
        entry = sympy.nsimplify(entry) if entry.is_Float else entry
        if entry.is_Rational:
            return Fraction(int(entry.p), int(entry.q))
        if entry.free_symbols:
            return sympy.expand(entry)
    raise DomainError(f"unsupported matrix entry {entry!r}")


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = tuple(tuple(coerce_entry(x) for x in row) for row in rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise DomainError("matrix blocks must be square")
    return m


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def all_exact(m: Matrix) -> bool:
    return all(is_exact(x) for row in m for x in row)


def _to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) if is_exact(x) else x for x in row] for row in m]
    )


def _from_sympy(m: sympy.Matrix) -> Matrix:
    return tuple(tuple(coerce_entry(sympy.expand(m[i, j])) for j in range(m.cols)) for i in range(m.rows))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a) != len(b):
        raise DomainError("matrix sizes differ")
    if all_exact(a) and all_exact(b):
        n = len(a)
        return tuple(
            tuple(sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n))
            for i in range(n)
        )
    return _from_sympy(_to_sympy(a) * _to_sympy(b))


def det(m: Matrix) -> Entry:
    if not all_exact(m):
        return coerce_entry(sympy.expand(_to_sympy(m).det())) if m else Fraction(1)
    work = [list(row) for row in m]
    n = len(work)
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            result = -result
        p = work[col][col]
        result *= p
        for r in range(col + 1, n):
            factor = work[r][col] / p
            if factor:
                for c in range(col, n):
                    work[r][c] -= factor * work[col][c]
    return result


def inverse(m: Matrix) -> Matrix:
    if not all_exact(m):
        sm = _to_sympy(m)
        if sympy.simplify(sm.det()) == 0:
            raise DomainError("singular matrix")
        return _from_sympy(sm.inv())
    n = len(m)
    work = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise DomainError("singular matrix")
        work[col], work[pivot] = work[pivot], work[col]
        p = work[col][col]
        work[col] = [x / p for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def is_zero(entry: Entry) -> bool:
    if is_exact(entry):
        return entry == 0
    return sympy.simplify(entry) == 0


def abs_monomial(entry: Entry) -> PositiveReal:
    """|entry| as a PositiveReal; the entry must be a signed monomial
    rational * prod(symbol**e)."""
    if is_exact(entry):
        if entry == 0:
            raise DomainError("zero has no absolute monomial")
        return PositiveReal(factorize(abs(entry)))
    coeff, rest = sympy.factor(entry).as_coeff_Mul()
    symbols: list[tuple[str, int]] = []
    for factor in sympy.Mul.make_args(rest):
        base, exp = factor.as_base_exp()
        if not (isinstance(base, sympy.Symbol) and exp.is_Integer):
            raise UnsupportedError(f"determinant {entry} is not a monomial in the symbols")
        symbols.append((base.name, int(exp)))
    if not coeff.is_Rational or coeff == 0:
        raise UnsupportedError(f"determinant {entry} has a non-rational coefficient")
    return PositiveReal(factorize(abs(Fraction(int(coeff.p), int(coeff.q)))), tuple(symbols))


def valuation(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if x == 0:
        raise DomainError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def reduce_mod(x: Fraction, n: int) -> Fraction:
    """x as an element of Z/n, when its denominator is invertible mod n."""
    den = x.denominator
    try:
        inv = pow(den, -1, n)
    except ValueError:
        return x
    return Fraction((x.numerator * inv) % n)


def entry_to_json(entry: Entry):
    if is_exact(entry):
        return entry.numerator if entry.denominator == 1 else str(entry)
    return str(entry)
