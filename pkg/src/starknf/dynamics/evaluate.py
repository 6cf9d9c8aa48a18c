"""Floating-point evaluation of exact polynomials.

A polynomial is turned into straight-line Python source in nested Horner
form and compiled once.  The same source is generated for the same input,
so repeated evaluations are bit-identical.  The compiled functions accept
floats or numpy arrays (broadcasting elementwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ..exact.polynomial import Polynomial
from .constants import PI

__all__ = ["CompiledPolynomial", "compile_polynomial", "compile_vector", "eval_expression", "UnboundVariableError"]


class UnboundVariableError(KeyError):
    pass


def _float_terms(p: Polynomial, args: Sequence[str], fixed: Mapping[str, float]) -> dict[tuple[int, ...], float]:
    names = p.space.names
    idx = [names.index(a) for a in args]
    used = p.free_symbols()
    missing = used - set(args) - set(fixed)
    if missing:
        raise UnboundVariableError(f"unbound variables: {sorted(missing)}")
    out: dict[tuple[int, ...], float] = {}
    for exps, c in sorted(p.terms.items()):
        v = c.to_float(PI)
        for n, e in zip(names, exps):
            if e and n not in args:
                v *= float(fixed[n]) ** e
        key = tuple(exps[i] for i in idx)
        out[key] = out.get(key, 0.0) + v
    return {k: v for k, v in out.items() if v != 0.0}


def _horner(terms: dict[tuple[int, ...], float], args: Sequence[str], pos: int = 0) -> str:
    if not terms:
        return "0.0"
    if pos == len(args):
        return repr(sum(terms.values()))
    groups: dict[int, dict[tuple[int, ...], float]] = {}
    for k, v in terms.items():
        groups.setdefault(k[pos], {})[k] = v
    if list(groups) == [0]:
        return _horner(groups[0], args, pos + 1)
    v = args[pos]
    top = max(groups)
    acc = _horner(groups[top], args, pos + 1)
    for e in range(top - 1, -1, -1):
        acc = f"({acc})*{v}"
        if e in groups:
            acc = f"{acc} + ({_horner(groups[e], args, pos + 1)})"
    return acc


@dataclass(frozen=True)
class CompiledPolynomial:
    args: tuple[str, ...]
    source: str
    fn: Callable

    def __call__(self, *values):
        return self.fn(*values)


def _safe(n: str) -> str:
    return f"a_{n}"


def compile_polynomial(p: Polynomial, args: Sequence[str] | None = None,
                       fixed: Mapping[str, float] | None = None) -> CompiledPolynomial:
    """Compile ``p`` into a function of ``args`` (positional, in order).

    Names in ``fixed`` are folded into the coefficients.  ``args`` defaults
    to the variables of the space.
    """
    args = tuple(args if args is not None else p.space.variables)
    fixed = dict(fixed or {})
    terms = _float_terms(p, args, fixed)
    body = _horner(terms, [_safe(a) for a in args])
    src = f"def _f({', '.join(_safe(a) for a in args)}):\n    return {body}\n"
    ns: dict = {}
    exec(compile(src, "<starknf-poly>", "exec"), ns)
    return CompiledPolynomial(args, src, ns["_f"])


def compile_vector(ps: Sequence[Polynomial], args: Sequence[str], fixed: Mapping[str, float] | None = None):
    """Compile several polynomials into one function returning a numpy array."""
    args = tuple(args)
    fixed = dict(fixed or {})
    bodies = [_horner(_float_terms(p, args, fixed), [_safe(a) for a in args]) for p in ps]
    # _z broadcasts constant components to the argument shape
    lines = [
        f"def _g({', '.join(_safe(a) for a in args)}):",
        f"    _z = 0.0 * {_safe(args[0])}",
        "    return _np.array([" + ", ".join(f"({b}) + _z" for b in bodies) + "])",
    ]
    ns: dict = {"_np": np}
    exec(compile("\n".join(lines) + "\n", "<starknf-vec>", "exec"), ns)
    return ns["_g"]


def eval_expression(e: Polynomial, point: Mapping[str, float]) -> float:
    """Evaluate ``e`` at a point given as a name -> value mapping (pi taken from the constants table)."""
    used = sorted(e.free_symbols(), key=e.space.names.index)
    missing = set(used) - set(point)
    if missing:
        raise UnboundVariableError(f"unbound variables: {sorted(missing)}")
    cp = compile_polynomial(e, used, {})
    return cp(*(float(point[n]) for n in used))
