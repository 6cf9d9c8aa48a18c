"""Elements of Q[pi]: rational polynomials in a formal constant pi."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["ExactCoefficient", "PI", "as_fraction"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class ExactCoefficient:
    """Element of Q[pi], stored as a tuple of Fractions indexed by pi-power.

    Trailing zeros are stripped, so equal elements have equal tuples.
    ``pi`` is formal: it is never replaced by a float unless ``to_float``
    is called explicitly.
    """

    __slots__ = ("_c",)

    def __init__(self, terms=None):
        if terms is None:
            c = ()
        elif isinstance(terms, ExactCoefficient):
            c = terms._c
        elif isinstance(terms, dict):
            n = max(terms, default=-1) + 1
            c = [Fraction(0)] * n
            for k, v in terms.items():
                if k < 0:
                    raise ValueError("negative pi exponent")
                c[k] = as_fraction(v)
        elif isinstance(terms, (tuple, list)):
            c = [as_fraction(v) for v in terms]
        else:
            c = (as_fraction(terms),)
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def _raw(cls, c: tuple) -> "ExactCoefficient":
        obj = cls.__new__(cls)
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        obj._c = tuple(c)
        return obj

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return {k: v for k, v in enumerate(self._c) if v != 0}

    @property
    def pi_degree(self) -> int:
        """Highest pi power present; -1 for zero."""
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return len(self._c) <= 1

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not pi-free")
        return self._c[0] if self._c else Fraction(0)

    def coefficient(self, k: int) -> Fraction:
        return self._c[k] if k < len(self._c) else Fraction(0)

    def to_float(self, pi: float = math.pi) -> float:
        acc = 0.0
        for v in reversed(self._c):
            acc = acc * pi + float(v)
        return acc

    # -- ring operations --------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactCoefficient):
            return other
        try:
            return ExactCoefficient._raw((as_fraction(other),))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return ExactCoefficient._raw(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        return ExactCoefficient._raw(tuple(-v for v in self._c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._c, other._c
        if not a or not b:
            return ExactCoefficient._raw(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return ExactCoefficient._raw(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a nonzero rational is meaningful in Q[pi]
        d = as_fraction(other.rational() if isinstance(other, ExactCoefficient) else other)
        if d == 0:
            raise ZeroDivisionError("division by zero coefficient")
        return ExactCoefficient._raw(tuple(v / d for v in self._c))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = ExactCoefficient(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._c == other._c

    def __hash__(self):
        if len(self._c) <= 1:
            return hash(self._c[0] if self._c else 0)
        return hash(self._c)

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"ExactCoefficient({str(self)!r})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k, v in enumerate(self._c):
            if v == 0:
                continue
            s = str(v)
            if k == 1:
                s += "*pi"
            elif k > 1:
                s += f"*pi^{k}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")


PI = ExactCoefficient((0, 1))
