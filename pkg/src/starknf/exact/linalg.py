"""Exact linear algebra over Q, used for basis expansions."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polynomial import Polynomial

__all__ = ["solve_exact", "linear_combination", "NotInSpanError"]


class NotInSpanError(ValueError):
    pass


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve ``A x = b`` exactly; free variables are set to zero.

    Returns ``None`` if the system is inconsistent.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = aug[i][n]
    return x


def linear_combination(target: Polynomial, basis: Sequence[Polynomial]) -> list[Fraction]:
    """Rational coefficients ``c`` with ``target == sum c_j basis_j`` exactly.

    Raises :class:`NotInSpanError` when no such combination exists.
    """
    monos = sorted(set(target.raw_terms()).union(*(b.raw_terms() for b in basis)))
    rows = [[b.raw_terms().get(m, Fraction(0)) for b in basis] for m in monos]
    rhs = [target.raw_terms().get(m, Fraction(0)) for m in monos]
    x = solve_exact(rows, rhs) if monos else [Fraction(0)] * len(basis)
    if x is None:
        raise NotInSpanError("target is not in the span of the basis")
    return x
