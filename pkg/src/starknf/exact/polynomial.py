"""Sparse multivariate polynomials with exact coefficients in Q[pi].

Monomials are packed into Python integers, one 8-bit field per variable
(variable 0 in the most significant field) plus a final field holding the
power of the formal constant pi.  With this layout monomial multiplication
is integer addition and integer comparison is lexicographic order, which
keeps the pure-Python arithmetic fast enough for the normal-form pipeline.
Exponents are limited to 127 per variable (a guard bit is reserved for the
divisibility test).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .coefficient import ExactCoefficient, as_fraction
from .space import SpaceMismatchError, VariableSpace

__all__ = ["Polynomial", "var", "const", "gens", "parse", "ParseError"]

_W = 8
_MASK = (1 << _W) - 1
_MAXEXP = 127


class ParseError(ValueError):
    pass


def _layout(space: VariableSpace):
    n = space.nvars + 1
    offsets = tuple(_W * (n - 1 - i) for i in range(space.nvars))
    guard = 0
    for i in range(n):
        guard |= 0x80 << (_W * i)
    return n, offsets, guard


_LAYOUTS: dict[VariableSpace, tuple] = {}


def layout(space: VariableSpace):
    try:
        return _LAYOUTS[space]
    except KeyError:
        _LAYOUTS[space] = out = _layout(space)
        return out


def pack(space: VariableSpace, exps: Iterable[int], pi: int = 0) -> int:
    _, offsets, _ = layout(space)
    m = pi
    for off, e in zip(offsets, exps):
        if e < 0 or e > _MAXEXP:
            raise ValueError(f"exponent {e} out of range")
        m |= e << off
    return m


def unpack(space: VariableSpace, m: int) -> tuple[tuple[int, ...], int]:
    _, offsets, _ = layout(space)
    return tuple((m >> off) & _MASK for off in offsets), m & _MASK


def mdegree(m: int) -> int:
    """Total degree of a packed monomial, including the pi field."""
    return m % 255


def grlex_key(m: int) -> tuple[int, int]:
    return (m % 255, m)


def divides(a: int, b: int, guard: int) -> bool:
    """True iff monomial ``a`` divides monomial ``b`` (fieldwise a <= b)."""
    return ((b | guard) - a) & guard == guard


class Polynomial:
    """Immutable sparse polynomial over a :class:`VariableSpace`.

    Coefficients live in Q[pi].  Internally terms are ``{packed monomial:
    Fraction}`` with pi folded into the monomial; :attr:`terms` exposes the
    grouped view ``{exponent tuple: ExactCoefficient}``.
    """

    __slots__ = ("space", "_t", "_hash")

    def __init__(self, space: VariableSpace, terms: Mapping | None = None, *, _raw: dict | None = None):
        self.space = space
        self._hash = None
        if _raw is not None:
            self._t = _raw
            return
        t: dict[int, Fraction] = {}
        for exps, c in (terms or {}).items():
            if isinstance(exps, int):
                raise TypeError("use tuple exponent vectors for public construction")
            if len(exps) != space.nvars:
                raise ValueError(f"exponent vector length {len(exps)} != {space.nvars}")
            coeff = c if isinstance(c, ExactCoefficient) else ExactCoefficient(c)
            base = pack(space, exps)
            for k, v in coeff.terms.items():
                key = base + k
                t[key] = t.get(key, 0) + v
        self._t = {m: c for m, c in t.items() if c != 0}

    # -- constructors -----------------------------------------------------
    @classmethod
    def _from(cls, space, raw: dict) -> "Polynomial":
        return cls(space, _raw=raw)

    @classmethod
    def variable(cls, space: VariableSpace, name: str) -> "Polynomial":
        if name not in space.index:
            raise KeyError(f"{name!r} is not a variable of space {space.name!r}")
        _, offsets, _ = layout(space)
        return cls._from(space, {1 << offsets[space.index[name]]: Fraction(1)})

    @classmethod
    def constant(cls, space: VariableSpace, c=1) -> "Polynomial":
        coeff = c if isinstance(c, ExactCoefficient) else ExactCoefficient(c)
        return cls._from(space, {k: v for k, v in coeff.terms.items()})

    @classmethod
    def zero(cls, space: VariableSpace) -> "Polynomial":
        return cls._from(space, {})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], ExactCoefficient]:
        grouped: dict[tuple, dict[int, Fraction]] = {}
        for m, c in self._t.items():
            exps, k = unpack(self.space, m)
            grouped.setdefault(exps, {})[k] = c
        return {e: ExactCoefficient(d) for e, d in grouped.items()}

    def raw_terms(self) -> dict[int, Fraction]:
        return dict(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return all((m >> _W) == 0 for m in self._t)

    def constant_term(self) -> ExactCoefficient:
        return ExactCoefficient({m: c for m, c in self._t.items() if (m >> _W) == 0})

    def coefficient(self, exps) -> ExactCoefficient:
        if isinstance(exps, str):
            exps = Polynomial.variable(self.space, exps).monomials()[0]
        base = pack(self.space, exps)
        return ExactCoefficient({m - base: c for m, c in self._t.items() if (m >> _W) == (base >> _W)})

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted({unpack(self.space, m)[0] for m in self._t})

    @property
    def pi_degree(self) -> int:
        return max((m & _MASK for m in self._t), default=-1)

    def degree(self, names: Iterable[str] | None = None) -> int:
        """Total degree in ``names`` (default: all variables and parameters)."""
        if self.is_zero():
            return -1
        _, offsets, _ = layout(self.space)
        idx = range(self.space.nvars) if names is None else [self.space.index[n] for n in names]
        return max(sum((m >> offsets[i]) & _MASK for i in idx) for m in self._t)

    def free_symbols(self) -> set[str]:
        _, offsets, _ = layout(self.space)
        out = set()
        for m in self._t:
            for i, off in enumerate(offsets):
                if (m >> off) & _MASK:
                    out.add(self.space.names[i])
        return out

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Polynomial", op: str):
        if other.space != self.space:
            raise SpaceMismatchError(self.space, other.space, op)

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, ExactCoefficient)):
            return Polynomial.constant(self.space, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        self._check(other, "add")
        out = dict(self._t)
        for m, c in other._t.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._from(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from(self.space, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        self._check(other, "subtract")
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Polynomial":
        if isinstance(c, ExactCoefficient):
            return self * Polynomial.constant(self.space, c)
        c = as_fraction(c)
        if c == 0:
            return Polynomial.zero(self.space)
        return Polynomial._from(self.space, {m: v * c for m, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        self._check(other, "multiply")
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Fraction] = {}
        get = out.get
        items_b = list(b.items())
        for m1, c1 in a.items():
            for m2, c2 in items_b:
                m = m1 + m2
                v = get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._from(self.space, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.space, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, name: str) -> "Polynomial":
        """Partial derivative with respect to ``name`` (termwise)."""
        i = self.space.index[name]
        _, offsets, _ = layout(self.space)
        off = offsets[i]
        one = 1 << off
        out = {}
        for m, c in self._t.items():
            e = (m >> off) & _MASK
            if e:
                out[m - one] = c * e
        return Polynomial._from(self.space, out)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExactCoefficient)):
            other = Polynomial.constant(self.space, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space.name, frozenset(self._t.items())))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    # -- substitution / evaluation ---------------------------------------
    def compose(self, images: Mapping[str, "Polynomial"], target: VariableSpace | None = None) -> "Polynomial":
        """Ring homomorphism sending each variable to ``images[name]``.

        Names missing from ``images`` must exist in ``target`` and are
        mapped to the variable of the same name there.  pi maps to pi.
        """
        target = target or self.space
        _, offsets, _ = layout(self.space)
        gens_ = []
        for name in self.space.names:
            img = images.get(name)
            if img is None:
                img = Polynomial.variable(target, name)
            elif not isinstance(img, Polynomial):
                img = Polynomial.constant(target, img)
            if img.space != target:
                raise SpaceMismatchError(img.space, target, "compose into")
            gens_.append(img)
        powers: list[dict[int, Polynomial]] = [dict() for _ in gens_]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                cache[e] = gens_[i] ** e if e < 2 or (e - 1) not in cache else cache[e - 1] * gens_[i]
            return cache[e]

        acc: dict[int, Fraction] = {}
        for m, c in self._t.items():
            term = Polynomial._from(target, {m & _MASK: c})
            for i, off in enumerate(offsets):
                e = (m >> off) & _MASK
                if e:
                    term = term * power(i, e)
            for k, v in term._t.items():
                acc[k] = acc.get(k, 0) + v
        return Polynomial._from(target, {m: c for m, c in acc.items() if c})

    def subs(self, values: Mapping[str, object]) -> "Polynomial":
        """Substitute numbers or polynomials (same space) for some variables."""
        return self.compose({k: v for k, v in values.items()}, self.space)

    def evaluate(self, values: Mapping[str, object], pi=None):
        """Exact evaluation.

        Every variable occurring in the polynomial must be bound.  With
        ``pi=None`` the result is an :class:`ExactCoefficient` (pi kept
        formal); otherwise pi is replaced by the given value.
        """
        _, offsets, _ = layout(self.space)
        missing = self.free_symbols() - set(values)
        if missing:
            raise KeyError(f"unbound variables: {sorted(missing)}")
        vals = [values.get(n, 0) for n in self.space.names]
        vals = [as_fraction(v) if isinstance(v, (int, Fraction, str)) else v for v in vals]
        acc: dict[int, object] = {}
        for m in sorted(self._t):
            c = self._t[m]
            x = c
            for i, off in enumerate(offsets):
                e = (m >> off) & _MASK
                if e:
                    x = x * vals[i] ** e
            k = m & _MASK
            acc[k] = acc.get(k, 0) + x
        if pi is None:
            return ExactCoefficient(acc) if all(isinstance(v, (int, Fraction)) for v in acc.values()) else acc
        total = 0
        for k in sorted(acc):
            total = total + acc[k] * pi ** k
        return total

    def embed(self, target: VariableSpace) -> "Polynomial":
        """Re-express over ``target``, which must contain every used name."""
        if target == self.space:
            return self
        extra = sorted(self.free_symbols() - set(target.names))
        if extra:
            raise SpaceMismatchError(self.space, target, f"embed (names {extra} missing)")
        zero = Polynomial.zero(target)
        return self.compose({n: zero for n in self.space.names if n not in target.names}, target)

    def pi_part(self, k: int) -> "Polynomial":
        """Coefficient polynomial of pi**k."""
        return Polynomial._from(self.space, {m - k: c for m, c in self._t.items() if m & _MASK == k})

    def drop_pi(self) -> "Polynomial":
        return self.pi_part(0)

    # -- printing ---------------------------------------------------------
    def sorted_raw(self) -> list[tuple[int, Fraction]]:
        def key(item):
            m = item[0]
            base = m >> _W
            return (base % 255, -base, m & _MASK)

        return sorted(self._t.items(), key=key)

    def to_text(self) -> str:
        if not self._t:
            return "0"
        _, offsets, _ = layout(self.space)
        out = []
        for m, c in self.sorted_raw():
            factors = []
            k = m & _MASK
            if k == 1:
                factors.append("pi")
            elif k > 1:
                factors.append(f"pi^{k}")
            for i, off in enumerate(offsets):
                e = (m >> off) & _MASK
                if e == 1:
                    factors.append(self.space.names[i])
                elif e > 1:
                    factors.append(f"{self.space.names[i]}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
            else:
                body = str(mag)
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    __str__ = to_text

    def __repr__(self):
        return f"Polynomial[{self.space.name}]({self.to_text()})"


def var(space: VariableSpace, name: str) -> Polynomial:
    return Polynomial.variable(space, name)


def const(space: VariableSpace, c=1) -> Polynomial:
    return Polynomial.constant(space, c)


def gens(space: VariableSpace) -> dict[str, Polynomial]:
    return {n: Polynomial.variable(space, n) for n in space.names}


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")


def parse(text: str, space: VariableSpace) -> Polynomial:
    """Parse the plain-text polynomial grammar.

    A signed sum of terms ``c * v1^e1 * ... * vk^ek``; ``c`` is a rational
    ``n/d`` and may be accompanied by ``pi`` or ``pi^k``.  Whitespace is
    ignored.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = mt.lastindex
        tokens.append((kind, mt.group(kind)))
        pos = mt.end()
    if not tokens:
        raise ParseError("empty polynomial text")

    _, offsets, _ = layout(space)
    acc: dict[int, Fraction] = {}
    i = 0
    n = len(tokens)

    def expect_factor(j):
        if j >= n or tokens[j][0] not in (1, 2):
            raise ParseError(f"expected a factor at token {j}")

    first = True
    while i < n:
        sign = 1
        if tokens[i][0] == 5:
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' at token {i}")
        first = False
        coeff = Fraction(sign)
        mono = 0
        expect_factor(i)
        while True:
            kind, val = tokens[i]
            i += 1
            if kind == 1:
                coeff *= Fraction(val)
            else:
                e = 1
                if i < n and tokens[i][0] == 3:
                    if i + 1 >= n or tokens[i + 1][0] != 1 or "/" in tokens[i + 1][1]:
                        raise ParseError("exponent must be a nonnegative integer")
                    e = int(tokens[i + 1][1])
                    i += 2
                if val == "pi":
                    mono += e
                elif val in space.index:
                    mono += e << offsets[space.index[val]]
                else:
                    raise ParseError(f"unknown variable {val!r} for space {space.name!r}")
            if i < n and tokens[i][0] == 4:
                i += 1
                expect_factor(i)
                continue
            break
        acc[mono] = acc.get(mono, 0) + coeff
    return Polynomial._from(space, {m: c for m, c in acc.items() if c})
