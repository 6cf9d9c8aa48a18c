"""Variable spaces: ordered names, formal parameters and canonical pairings."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "VariableSpace",
    "SpaceMismatchError",
    "CANONICAL",
    "INVARIANT",
    "XIETA",
    "SIGMA",
    "INVARIANT_NAMES",
    "PARAMETERS",
]


class SpaceMismatchError(ValueError):
    """Raised when two polynomials over different spaces are combined."""

    def __init__(self, a: "VariableSpace", b: "VariableSpace", op: str = "combine"):
        super().__init__(f"cannot {op} polynomials over spaces {a.name!r} and {b.name!r}")
        self.spaces = (a, b)


@dataclass(frozen=True)
class VariableSpace:
    """An ordered set of polynomial variables.

    ``parameters`` are commuting formal symbols (h, eps, beta, ...) that are
    never differentiated by a Poisson bracket.  The full variable order is
    ``parameters + variables``; it fixes both the monomial order (graded
    lexicographic) and the order of factors when printing.  ``pairs`` lists
    ``(q_i, p_i)`` name pairs for canonical spaces.
    """

    name: str
    variables: tuple[str, ...]
    parameters: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    names: tuple[str, ...] = field(init=False, repr=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.parameters) + tuple(self.variables)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in space {self.name!r}")
        if "pi" in names:
            raise ValueError("'pi' is reserved for the formal constant")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "index", {n: i for i, n in enumerate(names)})
        seen: set[str] = set()
        for q, p in self.pairs:
            for v in (q, p):
                if v not in self.variables:
                    raise ValueError(f"paired name {v!r} is not a variable of {self.name!r}")
                if v in seen:
                    raise ValueError(f"{v!r} appears in more than one canonical pair")
                seen.add(v)
        if self.pairs and seen != set(self.variables):
            raise ValueError("canonical pairing must be a perfect matching of the variables")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def is_canonical(self) -> bool:
        return bool(self.pairs)

    def is_parameter(self, name: str) -> bool:
        return name in self.parameters

    def __contains__(self, name: str) -> bool:
        return name in self.index


PARAMETERS = ("h", "eps", "beta")

CANONICAL = VariableSpace(
    "canonical",
    variables=("q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4"),
    parameters=PARAMETERS,
    pairs=(("q1", "p1"), ("q2", "p2"), ("q3", "p3"), ("q4", "p4")),
)

# H2 leads so that products print as e.g. H2*K3.
INVARIANT_NAMES = (
    "H2", "Xi",
    "K1", "K2", "K3",
    "L1", "L2", "L3",
    "U1", "U2", "U3", "U4",
    "V1", "V2", "V3", "V4",
)

INVARIANT = VariableSpace("invariant", variables=INVARIANT_NAMES, parameters=PARAMETERS)

XIETA = VariableSpace(
    "xieta",
    variables=("xi1", "xi2", "xi3", "eta1", "eta2", "eta3"),
    parameters=("h", "k", "eps", "beta"),
)

SIGMA = VariableSpace(
    "sigma",
    variables=("sigma1", "sigma2", "sigma3", "sigma4", "sigma5", "sigma6"),
    parameters=("h", "k", "eps", "beta"),
)
