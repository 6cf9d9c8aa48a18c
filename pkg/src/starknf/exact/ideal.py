"""Reduction modulo the two ideals the construction needs.

``<Xi>`` and ``<Xi, H2 - h>`` (h formal) are completed to reduced Groebner
bases under graded-lex order by a small Buchberger loop; reduction against
the basis then gives a canonical normal form and an ideal-membership test.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache

from .polynomial import Polynomial, divides, layout, mdegree, _MASK
from .space import CANONICAL, SpaceMismatchError

__all__ = [
    "IdealSpec",
    "UnsupportedIdealError",
    "groebner_basis",
    "reduce_raw",
    "xi_ideal",
    "level_ideal",
    "reduce_mod",
]


class UnsupportedIdealError(ValueError):
    pass


def _key(m: int):
    return (mdegree(m), m)


def _lead(p: dict[int, Fraction]) -> int:
    return max(p, key=_key)


def reduce_raw(f: dict[int, Fraction], basis, guard: int) -> dict[int, Fraction]:
    """Full reduction of ``f`` by ``basis = [(lm, lc, terms), ...]``."""
    p = dict(f)
    heap = [(-mdegree(m), -m) for m in p]
    heapq.heapify(heap)
    queued = set(p)
    rem: dict[int, Fraction] = {}
    while heap:
        _, negm = heapq.heappop(heap)
        m = -negm
        queued.discard(m)
        c = p.pop(m, None)
        if not c:
            continue
        for lm, lc, g in basis:
            if divides(lm, m, guard):
                factor = c / lc
                shift = m - lm
                for gm, gc in g.items():
                    mm = gm + shift
                    if mm == m:
                        continue
                    v = p.get(mm, 0) - factor * gc
                    if v:
                        p[mm] = v
                        if mm not in queued:
                            queued.add(mm)
                            heapq.heappush(heap, (-mdegree(mm), -mm))
                    else:
                        p.pop(mm, None)
                break
        else:
            rem[m] = c
    return rem


def _lcm(a: int, b: int, nfields: int) -> int:
    out = 0
    for i in range(nfields):
        sh = 8 * i
        out |= max((a >> sh) & _MASK, (b >> sh) & _MASK) << sh
    return out


def groebner_basis(generators: list[Polynomial]) -> list[Polynomial]:
    """Reduced Groebner basis (grlex) of the ideal spanned by ``generators``."""
    if not generators:
        return []
    space = generators[0].space
    nfields, _, guard = layout(space)
    polys = [g.raw_terms() for g in generators if not g.is_zero()]
    basis = []
    for t in polys:
        lm = _lead(t)
        basis.append((lm, t[lm], t))
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        i, j = pairs.pop()
        lmi, lci, gi = basis[i]
        lmj, lcj, gj = basis[j]
        l = _lcm(lmi, lmj, nfields)
        if l == lmi + lmj:
            continue  # coprime leading monomials: S-polynomial reduces to 0
        s: dict[int, Fraction] = {}
        for m, c in gi.items():
            mm = m + (l - lmi)
            s[mm] = s.get(mm, 0) + c / lci
        for m, c in gj.items():
            mm = m + (l - lmj)
            s[mm] = s.get(mm, 0) - c / lcj
        s = {m: c for m, c in s.items() if c}
        r = reduce_raw(s, basis, guard)
        if r:
            lm = _lead(r)
            basis.append((lm, r[lm], r))
            k = len(basis) - 1
            pairs.extend((k, t) for t in range(k))
    # minimalize
    lms = [b[0] for b in basis]
    keep = []
    for i, (lm, lc, g) in enumerate(basis):
        redundant = any(
            divides(lms[j], lm, guard) and (lms[j] != lm or j < i)
            for j in range(len(basis)) if j != i
        )
        if not redundant:
            keep.append((lm, lc, {m: c / lc for m, c in g.items()}))
    # interreduce tails
    reduced = []
    for i, (lm, _, g) in enumerate(keep):
        others = [(l2, Fraction(1), g2) for j, (l2, _, g2) in enumerate(keep) if j != i]
        tail = {m: c for m, c in g.items() if m != lm}
        tail = reduce_raw(tail, others, guard)
        tail[lm] = Fraction(1)
        reduced.append(Polynomial._from(space, tail))
    reduced.sort(key=lambda p: _key(_lead(p.raw_terms())), reverse=True)
    return reduced


class IdealSpec:
    """One of the supported ideals, with its precomputed reduction basis."""

    SUPPORTED = ("xi", "xi_level")

    def __init__(self, kind: str):
        if kind not in self.SUPPORTED:
            raise UnsupportedIdealError(f"unsupported ideal {kind!r}; expected one of {self.SUPPORTED}")
        from ..invariants import canonical_generators

        g = canonical_generators()
        if kind == "xi":
            self.generators = (g["Xi"],)
            self.label = "<Xi>"
        else:
            h = Polynomial.variable(CANONICAL, "h")
            self.generators = (g["Xi"], g["H2"] - h)
            self.label = "<Xi, H2 - h>"
        self.kind = kind
        self.space = CANONICAL
        self.basis = tuple(groebner_basis(list(self.generators)))
        _, _, self._guard = layout(CANONICAL)
        self._raw = []
        for b in self.basis:
            t = b.raw_terms()
            lm = _lead(t)
            self._raw.append((lm, t[lm], t))

    def reduce(self, f: Polynomial) -> Polynomial:
        if f.space != self.space:
            raise SpaceMismatchError(f.space, self.space, "reduce")
        return Polynomial._from(self.space, reduce_raw(f.raw_terms(), self._raw, self._guard))

    def contains(self, f: Polynomial) -> bool:
        return self.reduce(f).is_zero()

    def __repr__(self):
        return f"IdealSpec({self.label})"


@lru_cache(maxsize=None)
def xi_ideal() -> IdealSpec:
    return IdealSpec("xi")


@lru_cache(maxsize=None)
def level_ideal() -> IdealSpec:
    return IdealSpec("xi_level")


def reduce_mod(f: Polynomial, ideal: IdealSpec) -> Polynomial:
    return ideal.reduce(f)
