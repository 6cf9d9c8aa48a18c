"""Polynomials with finite Fourier-series coefficients, and linear periodic flows.

A :class:`TrigPolynomial` stores ``sum_k P_k^c cos(k w t) + P_k^s sin(k w t)``
where each ``P`` is an exact polynomial and ``w`` is the base frequency of the
flow that produced it.  Products are re-expanded with product-to-sum rules,
so every pullback of a polynomial along a linear periodic flow lands in this
form exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from ..exact.coefficient import PI, ExactCoefficient
from ..exact.polynomial import Polynomial
from ..exact.space import CANONICAL, INVARIANT, SpaceMismatchError, VariableSpace

__all__ = [
    "TrigPolynomial",
    "FlowSpec",
    "flow_pullback",
    "average",
    "time_weighted_average",
    "FlowSpecError",
]


class FlowSpecError(ValueError):
    pass


class TrigPolynomial:
    """Exact trigonometric polynomial in ``t`` with polynomial coefficients.

    Parameters
    ----------
    space : VariableSpace
        Space of the coefficient polynomials.
    omega : Fraction
        Base angular frequency; mode ``k`` oscillates as ``cos(k*omega*t)``.
    modes : mapping
        ``{(k, "c" | "s"): Polynomial}``; mode 0 only has a cosine part.
    """

    __slots__ = ("space", "omega", "modes")

    def __init__(self, space: VariableSpace, omega, modes: Mapping[tuple[int, str], Polynomial] | None = None):
        self.space = space
        self.omega = Fraction(omega)
        clean = {}
        for key, p in (modes or {}).items():
            k, kind = key
            if k < 0 or kind not in ("c", "s") or (k == 0 and kind == "s"):
                raise ValueError(f"bad Fourier mode {key}")
            if p.space != space:
                raise SpaceMismatchError(p.space, space, "build trig polynomial over")
            if not p.is_zero():
                clean[key] = p
        self.modes = clean

    @classmethod
    def constant(cls, p: Polynomial, omega) -> "TrigPolynomial":
        return cls(p.space, omega, {(0, "c"): p})

    def _same(self, other: "TrigPolynomial"):
        if other.space != self.space:
            raise SpaceMismatchError(self.space, other.space, "combine trig polynomials over")
        if other.omega != self.omega:
            raise FlowSpecError("trig polynomials with different base frequencies")

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        self._same(other)
        out = dict(self.modes)
        for key, p in other.modes.items():
            out[key] = out[key] + p if key in out else p
        return TrigPolynomial(self.space, self.omega, out)

    def __neg__(self):
        return TrigPolynomial(self.space, self.omega, {k: -p for k, p in self.modes.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TrigPolynomial":
        return TrigPolynomial(self.space, self.omega, {k: p.scale(c) for k, p in self.modes.items()})

    def __mul__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        if isinstance(other, Polynomial):
            return TrigPolynomial(self.space, self.omega, {k: p * other for k, p in self.modes.items()})
        self._same(other)
        half = Fraction(1, 2)
        acc: dict[tuple[int, str], Polynomial] = {}

        def put(k: int, kind: str, p: Polynomial):
            if k < 0:
                k = -k
                if kind == "s":
                    p = -p
            if k == 0 and kind == "s":
                return
            key = (k, kind)
            acc[key] = acc[key] + p if key in acc else p

        for (a, ka), pa in self.modes.items():
            for (b, kb), pb in other.modes.items():
                prod = pa * pb
                if a == 0 or b == 0:
                    # a constant times a pure mode
                    if a == 0 and b == 0:
                        put(0, "c", prod)
                    elif a == 0:
                        put(b, kb, prod)
                    else:
                        put(a, ka, prod)
                    continue
                hp = prod.scale(half)
                if ka == "c" and kb == "c":
                    put(a - b, "c", hp)
                    put(a + b, "c", hp)
                elif ka == "s" and kb == "s":
                    put(a - b, "c", hp)
                    put(a + b, "c", -hp)
                elif ka == "s" and kb == "c":
                    put(a + b, "s", hp)
                    put(a - b, "s", hp)
                else:  # cos a * sin b
                    put(a + b, "s", hp)
                    put(b - a, "s", hp)
        return TrigPolynomial(self.space, self.omega, acc)

    def __pow__(self, n: int) -> "TrigPolynomial":
        out = TrigPolynomial.constant(Polynomial.constant(self.space, 1), self.omega)
        for _ in range(n):
            out = out * self
        return out

    # -- inspection -------------------------------------------------------
    def mean(self) -> Polynomial:
        """Average over one period: the constant Fourier component."""
        return self.modes.get((0, "c"), Polynomial.zero(self.space))

    def max_mode(self) -> int:
        return max((k for k, _ in self.modes), default=0)

    def derivative(self) -> "TrigPolynomial":
        out = {}
        for (k, kind), p in self.modes.items():
            if k == 0:
                continue
            f = k * self.omega
            if kind == "c":
                out[(k, "s")] = p.scale(-f)
            else:
                out[(k, "c")] = p.scale(f)
        return TrigPolynomial(self.space, self.omega, out)

    def at_zero(self) -> Polynomial:
        """Value at ``t = 0``: the sum of all cosine parts."""
        out = Polynomial.zero(self.space)
        for (k, kind), p in self.modes.items():
            if kind == "c":
                out = out + p
        return out

    def at(self, c, s) -> Polynomial:
        """Value at the ``t`` where ``cos(omega t) = c`` and ``sin(omega t) = s``.

        ``(c, s)`` must lie on the unit circle; exact rational points such as
        ``((1 - u^2)/(1 + u^2), 2u/(1 + u^2))`` keep the result exact.
        """
        c, s = Fraction(c), Fraction(s)
        if c * c + s * s != 1:
            raise ValueError("(c, s) is not on the unit circle")
        kmax = self.max_mode()
        cs = [(Fraction(1), Fraction(0))]
        for _ in range(kmax):
            a, b = cs[-1]
            cs.append((a * c - b * s, b * c + a * s))
        out = Polynomial.zero(self.space)
        for (k, kind), p in self.modes.items():
            out = out + p.scale(cs[k][0] if kind == "c" else cs[k][1])
        return out

    def time_weighted(self) -> Polynomial:
        """``(1/T) * integral_0^T t * f(t) dt`` with ``T = 2 pi / omega``.

        Cosine modes contribute 0, ``sin(k w t)`` contributes ``-1/(k w)``
        and the constant part contributes ``T/2 = pi/w``; the result has
        coefficients in Q[pi].
        """
        out = Polynomial.zero(self.space)
        for (k, kind), p in self.modes.items():
            if k == 0:
                out = out + p.scale(PI * Fraction(1) / self.omega)
            elif kind == "s":
                out = out + p.scale(Fraction(-1) / (k * self.omega))
        return out

    def mode_solution(self) -> Polynomial:
        """``-sum_k b_k / (k w)``: the zero-mean solution read off mode by mode."""
        out = Polynomial.zero(self.space)
        for (k, kind), p in self.modes.items():
            if kind == "s":
                out = out + p.scale(Fraction(-1) / (k * self.omega))
        return out

    def __eq__(self, other):
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        return self.space == other.space and self.omega == other.omega and self.modes == other.modes

    def __repr__(self):
        parts = []
        for (k, kind), p in sorted(self.modes.items()):
            tag = "1" if k == 0 else f"{'cos' if kind == 'c' else 'sin'}({k * self.omega}t)"
            parts.append(f"[{p}]*{tag}")
        return " + ".join(parts) or "0"


def _matmul(a, b, names):
    out = {}
    for i in names:
        row = {}
        for k, aik in a[i].items():
            for j, bkj in b[k].items():
                row[j] = row.get(j, 0) + aik * bkj
        out[i] = {j: v for j, v in row.items() if v}
    return out


@dataclass(frozen=True)
class FlowSpec:
    """A linear flow ``x' = M x`` with ``M^3 = -omega^2 M`` (hence periodic).

    ``matrix[x_i] = {x_j: M_ij}`` gives the derivation ``x_i -> {x_i, G}``.
    The period is ``2 pi / omega``.
    """

    generator: str
    space: VariableSpace
    omega: Fraction
    matrix: tuple[tuple[str, tuple[tuple[str, Fraction], ...]], ...]

    @property
    def period(self) -> ExactCoefficient:
        return PI * (2 / self.omega)

    @property
    def rows(self) -> dict[str, dict[str, Fraction]]:
        return {i: dict(r) for i, r in self.matrix}

    @staticmethod
    def from_matrix(generator: str, space: VariableSpace, rows: Mapping[str, Mapping[str, Fraction]]) -> "FlowSpec":
        names = space.variables
        m = {i: {j: Fraction(v) for j, v in rows.get(i, {}).items() if v} for i in names}
        m2 = _matmul(m, m, names)
        m3 = _matmul(m2, m, names)
        # read omega^2 from any nonzero entry, then require M^3 = -omega^2 M
        w2 = None
        for i in names:
            for j, v in m[i].items():
                w2 = -m3[i].get(j, 0) / v
                break
            if w2 is not None:
                break
        if w2 is None or w2 <= 0:
            raise FlowSpecError(f"flow of {generator} is not a nontrivial rotation")
        for i in names:
            keys = set(m[i]) | set(m3[i])
            if any(m3[i].get(j, 0) != -w2 * m[i].get(j, 0) for j in keys):
                raise FlowSpecError(f"flow of {generator} does not satisfy M^3 = -w^2 M")
        num, den = w2.numerator, w2.denominator
        from math import isqrt

        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            raise FlowSpecError(f"frequency of {generator} is irrational")
        mat = tuple((i, tuple(sorted(m[i].items()))) for i in names if m[i])
        return FlowSpec(generator, space, Fraction(rn, rd), mat)

    @staticmethod
    @lru_cache(maxsize=None)
    def invariant(generator: str) -> "FlowSpec":
        """Flow of ``Y_G`` on the invariant space (from the bracket table)."""
        from ..invariants import build_bracket_structure

        bs = build_bracket_structure()
        return FlowSpec.from_matrix(generator, INVARIANT, bs.matrix(generator))

    @staticmethod
    @lru_cache(maxsize=None)
    def canonical(generator: str) -> "FlowSpec":
        """Flow of ``X_G`` on (q, p) for a quadratic generator ``G``."""
        from ..exact.poisson import poisson_bracket
        from ..invariants import canonical_generators

        G = canonical_generators()[generator]
        rows = {}
        for n in CANONICAL.variables:
            img = poisson_bracket(Polynomial.variable(CANONICAL, n), G)
            row = {}
            for exps, c in img.terms.items():
                if sum(exps) != 1 or not c.is_rational():
                    raise FlowSpecError(f"{generator} is not quadratic")
                j = next(CANONICAL.names[i] for i, e in enumerate(exps) if e)
                row[j] = c.rational()
            rows[n] = row
        return FlowSpec.from_matrix(generator, CANONICAL, rows)

    def images(self) -> dict[str, TrigPolynomial]:
        """``x_i(t) = x + sin(wt)/w M x + (1 - cos(wt))/w^2 M^2 x``."""
        names = self.space.variables
        m = self.rows
        m = {i: m.get(i, {}) for i in names}
        m2 = _matmul(m, m, names)
        w, w2 = self.omega, self.omega * self.omega

        def lin(row, f):
            out = Polynomial.zero(self.space)
            for j, v in row.items():
                out = out + Polynomial.variable(self.space, j).scale(v * f)
            return out

        out = {}
        for i in names:
            if not m[i]:
                continue
            x = Polynomial.variable(self.space, i)
            out[i] = TrigPolynomial(self.space, w, {
                (0, "c"): x + lin(m2[i], 1 / w2),
                (1, "c"): lin(m2[i], -1 / w2),
                (1, "s"): lin(m[i], 1 / w),
            })
        return out

    def point_images(self, c, s) -> dict[str, Polynomial]:
        """Linear images at a fixed time given ``(cos wt, sin wt)``."""
        return {n: tp.at(c, s) for n, tp in self.images().items()}


def flow_pullback(f: Polynomial, spec: FlowSpec) -> TrigPolynomial:
    """``f(phi_t(x))`` as an exact trigonometric polynomial in ``t``."""
    if f.space != spec.space:
        raise SpaceMismatchError(f.space, spec.space, "pull back along flow on")
    imgs = spec.images()
    w = spec.omega
    powers: dict[tuple[str, int], TrigPolynomial] = {}

    def power(n: str, e: int) -> TrigPolynomial:
        key = (n, e)
        if key not in powers:
            powers[key] = imgs[n] if e == 1 else power(n, e - 1) * imgs[n]
        return powers[key]

    names = spec.space.names
    acc: dict[tuple[int, str], Polynomial] = {}
    for exps, coeff in f.terms.items():
        # factors fixed by the flow stay in the static monomial
        moving = [(names[i], e) for i, e in enumerate(exps) if e and names[i] in imgs]
        st_exps = list(exps)
        for n, _ in moving:
            st_exps[spec.space.index[n]] = 0
        term = TrigPolynomial.constant(Polynomial(spec.space, {tuple(st_exps): coeff}), w)
        for n, e in moving:
            term = term * power(n, e)
        for key, p in term.modes.items():
            acc[key] = acc[key] + p if key in acc else p
    return TrigPolynomial(spec.space, w, acc)


def average(f: Polynomial, spec: FlowSpec) -> Polynomial:
    """Mean of ``f`` over one period of the flow."""
    return flow_pullback(f, spec).mean()


def time_weighted_average(f: Polynomial, spec: FlowSpec) -> Polynomial:
    """``(1/T) int_0^T t * (phi_t^* f) dt``."""
    return flow_pullback(f, spec).time_weighted()
