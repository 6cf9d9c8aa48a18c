"""Exact rational points on Xi = 0 (optionally also on H2 = h).

Used as a randomized identity-testing oracle: every identity asserted by
ideal reduction is also evaluated at such points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .coefficient import as_fraction

__all__ = ["ExactPoint", "sample_variety_point", "variety_points", "DegenerateSampleError"]

_RETRIES = 64


class DegenerateSampleError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactPoint:
    q: tuple[Fraction, ...]
    p: tuple[Fraction, ...]

    def as_dict(self) -> dict[str, Fraction]:
        d = {f"q{i + 1}": v for i, v in enumerate(self.q)}
        d.update({f"p{i + 1}": v for i, v in enumerate(self.p)})
        return d

    def as_floats(self) -> list[float]:
        return [float(v) for v in self.q + self.p]

    @property
    def xi(self) -> Fraction:
        q, p = self.q, self.p
        return q[0] * p[1] - q[1] * p[0] + q[2] * p[3] - q[3] * p[2]

    @property
    def h2(self) -> Fraction:
        return sum(v * v for v in self.q + self.p) / 2


def _rand(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 6))


def _four_squares(n: int, rng: random.Random) -> tuple[int, int, int, int]:
    """Integers a, b, c, d with a^2 + b^2 + c^2 + d^2 = n (n >= 1)."""
    sols = []
    for a in range(isqrt(n), -1, -1):
        ra = n - a * a
        for b in range(min(a, isqrt(ra)), -1, -1):
            rb = ra - b * b
            for c in range(min(b, isqrt(rb)), -1, -1):
                rc = rb - c * c
                d = isqrt(rc)
                if d * d == rc and d <= c:
                    sols.append((a, b, c, d))
                    if len(sols) >= 8:
                        break
            if len(sols) >= 8:
                break
        if len(sols) >= 8:
            break
    sol = list(rng.choice(sols))
    rng.shuffle(sol)
    return tuple(v if rng.random() < 0.5 else -v for v in sol)


def _rotate(q, p, t: Fraction):
    """Rational point of the H2 flow: cos = (1-t^2)/(1+t^2), sin = 2t/(1+t^2)."""
    c = (1 - t * t) / (1 + t * t)
    s = 2 * t / (1 + t * t)
    return (tuple(a * c + b * s for a, b in zip(q, p)),
            tuple(-a * s + b * c for a, b in zip(q, p)))


def _omega_row(a):
    """Coefficients of p in Xi's polarization: q1 p2 - q2 p1 + q3 p4 - q4 p3."""
    return (-a[1], a[0], -a[3], a[2])


def _on_xi(rng: random.Random) -> ExactPoint:
    for _ in range(_RETRIES):
        q = [_rand(rng) for _ in range(4)]
        p1, p3, p4 = (_rand(rng) for _ in range(3))
        if q[0] == 0:
            continue
        p2 = (q[1] * p1 - q[2] * p4 + q[3] * p3) / q[0]
        return ExactPoint(tuple(q), (p1, p2, p3, p4))
    raise DegenerateSampleError("could not draw a nondegenerate point on Xi = 0")


def _on_level(rng: random.Random, h: Fraction) -> ExactPoint:
    # base point q* with |q*|^2 = 2h, p* = 0
    two_h = 2 * h
    num, den = two_h.numerator, two_h.denominator
    a = _four_squares(num * den, rng)
    qs = tuple(Fraction(v, den) for v in a)
    for _ in range(_RETRIES):
        qx = [_rand(rng) for _ in range(4)]
        # omega(qx, p) = 0 and omega(q*, p) = 0: two linear equations in p
        rows = (_omega_row(qx), _omega_row(qs))
        pivots = [(i, j) for i in range(4) for j in range(i + 1, 4)
                  if rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i] != 0]
        if not pivots:
            continue
        i, j = rng.choice(pivots)
        p = [_rand(rng) for _ in range(4)]
        r = [-sum(row[k] * p[k] for k in range(4) if k not in (i, j)) for row in rows]
        det = rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i]
        p[i] = (r[0] * rows[1][j] - rows[0][j] * r[1]) / det
        p[j] = (rows[0][i] * r[1] - r[0] * rows[1][i]) / det
        px = tuple(p)
        A = sum(v * v for v in qx + list(px)) / 2
        B = sum(x * y for x, y in zip(qs, qx))
        m = _rand(rng)
        denom = h + m * B + m * m * A
        if m == 0 or denom == 0:
            continue
        u = -(2 * h + m * B) / denom
        if u == 0:
            continue
        ca, cb = 1 + u, m * u
        q = tuple(ca * s + cb * x for s, x in zip(qs, qx))
        p = tuple(cb * x for x in px)
        q, p = _rotate(q, p, _rand(rng))
        pt = ExactPoint(q, p)
        if pt.xi != 0 or pt.h2 != h:
            raise AssertionError("level sampler produced an off-variety point")
        return pt
    raise DegenerateSampleError(f"could not draw a nondegenerate point on H2 = {h}")


def sample_variety_point(seed: int, level=None) -> ExactPoint:
    """Exact rational ``(q, p)`` with ``Xi = 0``, and ``H2 = level`` if given.

    Without a level, random rationals are drawn and ``Xi = 0`` is solved
    linearly for ``p2``.  With a level ``h > 0`` a rational base point on the
    sphere is combined with a random ``Xi``-orthogonal direction and the
    second intersection of the resulting secant with ``H2 = h`` is taken,
    followed by a random rational turn of the ``H2`` flow.
    """
    rng = random.Random(seed)
    if level is None:
        return _on_xi(rng)
    h = as_fraction(level)
    if h <= 0:
        raise ValueError("level h must be positive")
    return _on_level(rng, h)


def variety_points(n: int, level=None, seed: int = 0) -> list[ExactPoint]:
    return [sample_variety_point(seed * 100_003 + i, level) for i in range(n)]
