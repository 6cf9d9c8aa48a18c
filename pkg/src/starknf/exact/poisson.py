"""Poisson brackets: canonical on paired spaces, and structure-table brackets."""

from __future__ import annotations

from typing import Mapping

from .polynomial import Polynomial
from .space import SpaceMismatchError, VariableSpace

__all__ = ["poisson_bracket", "derivation", "PoissonStructure", "NotCanonicalError"]


class NotCanonicalError(ValueError):
    pass


def poisson_bracket(f: Polynomial, g: Polynomial) -> Polynomial:
    """Canonical bracket ``{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``.

    With this sign the derivation ``f -> {f, G}`` is the Lie derivative along
    the Hamiltonian vector field of ``G`` (``dq/dt = dG/dp``).
    """
    if f.space != g.space:
        raise SpaceMismatchError(f.space, g.space, "bracket")
    if not f.space.is_canonical:
        raise NotCanonicalError(f"space {f.space.name!r} has no canonical pairing")
    out = Polynomial.zero(f.space)
    fs, gs = f.free_symbols(), g.free_symbols()
    for q, p in f.space.pairs:
        if q in fs and p in gs:
            out = out + f.diff(q) * g.diff(p)
        if p in fs and q in gs:
            out = out - f.diff(p) * g.diff(q)
    return out


def derivation(g: Polynomial):
    """The map ``f -> {f, g}`` for the canonical bracket."""
    return lambda f: poisson_bracket(f, g)


class PoissonStructure:
    """Bracket defined by a table ``{x_i, x_j}`` on the variables of a space.

    ``{f, g} = sum_{i,j} df/dx_i dg/dx_j {x_i, x_j}``; parameters are
    central.  Missing table entries are zero; antisymmetry is filled in.
    """

    def __init__(self, space: VariableSpace, table: Mapping[tuple[str, str], Polynomial]):
        self.space = space
        full: dict[tuple[str, str], Polynomial] = {}
        for (a, b), v in table.items():
            if a in space.parameters or b in space.parameters:
                raise ValueError("parameters must be central")
            if v.space != space:
                raise SpaceMismatchError(v.space, space, "use as structure constant in")
            if v.is_zero():
                continue
            full[(a, b)] = v
            if (b, a) in table and table[(b, a)] != -v:
                raise ValueError(f"table is not antisymmetric at ({a}, {b})")
            full[(b, a)] = -v
        self.table = full

    def of(self, a: str, b: str) -> Polynomial:
        return self.table.get((a, b), Polynomial.zero(self.space))

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        if f.space != self.space or g.space != self.space:
            raise SpaceMismatchError(f.space, self.space if g.space == self.space else g.space, "bracket")
        fs = sorted(f.free_symbols() - set(self.space.parameters), key=self.space.index.get)
        gs = sorted(g.free_symbols() - set(self.space.parameters), key=self.space.index.get)
        out = Polynomial.zero(self.space)
        gd = {b: g.diff(b) for b in gs}
        for a in fs:
            fa = None
            for b in gs:
                s = self.table.get((a, b))
                if s is None:
                    continue
                if fa is None:
                    fa = f.diff(a)
                out = out + fa * gd[b] * s
        return out

    def derivation(self, g: Polynomial):
        return lambda f: self.bracket(f, g)

    def vector_field(self, g: Polynomial) -> dict[str, Polynomial]:
        """Components ``x_i -> {x_i, g}`` (zero components omitted)."""
        out = {}
        for n in self.space.variables:
            v = self.bracket(Polynomial.variable(self.space, n), g)
            if not v.is_zero():
                out[n] = v
        return out
