"""Golden files: canonical text dumps of the exact results.

Each golden is a plain-text file with a two-line header followed by
``name = polynomial`` lines in the polynomial grammar.  Polynomials are
printed in the canonical term order, so regeneration is byte-identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from .exact.polynomial import ParseError, Polynomial, parse
from .exact.space import CANONICAL, INVARIANT, SIGMA, VariableSpace

__all__ = ["GOLDENS", "GoldenResult", "render_golden", "emit_goldens", "check_goldens", "first_divergent_term"]

HEADER = "# starknf golden v1"
SPACES = {"canonical": CANONICAL, "invariant": INVARIANT, "sigma": SIGMA}


def _generators():
    from .exact.space import INVARIANT_NAMES
    from .invariants import canonical_generators

    g = canonical_generators()
    return "canonical", [(n, g[n]) for n in INVARIANT_NAMES]


def _relations():
    from .invariants import verify_orbit_relations

    # each relation as lhs - rhs; all vanish identically upstairs
    return "invariant", [(c.name.replace(" + ", "+").replace(" ", "_"), c.lhs - c.rhs) for c in verify_orbit_relations(True)]


def _generating_function():
    from .averaging.normalform import solve_F

    s = solve_F()
    return "invariant", [("F1", s.F1), ("F2", s.F2), ("F", s.F), ("F_on_Xi0", s.F_onshell)]


def _nf1():
    from .averaging.normalform import normalize_first_order

    return "invariant", [("normal_form", normalize_first_order().normal_form)]


def _nf2():
    from .averaging.normalform import normalize_second_order, second_order_term

    return "invariant", [("normal_form", normalize_second_order().normal_form),
                         ("eps2_average", second_order_term().average)]


def _second_stage():
    from .averaging.normalform import second_normalization

    r = second_normalization()
    return "invariant", [("rescaled", r.details["rescaled"]), ("T", r.details["T"]),
                         ("T_bar", r.details["T_bar"]), ("normal_form", r.normal_form)]


def _sphere():
    from .reduction import reduced_hamiltonian

    return "invariant", [("sphere_form", reduced_hamiltonian().sphere_form)]


def _reduced():
    from .reduction import COORDINATE, FLOW, reduced_hamiltonian

    out = []
    for c in (FLOW, COORDINATE):
        r = reduced_hamiltonian(c)
        out += [(f"{c.name}.sigma_form", r.sigma_form), (f"{c.name}.reduced", r.reduced),
                (f"{c.name}.dropped_constant", r.dropped_constant)]
    return "sigma", out


def _sigma_brackets():
    from .reduction import derive_sigma_poisson

    sp = derive_sigma_poisson()
    return "sigma", [(f"{{{a},{b}}}", sp.structure.of(a, b)) for a, b in sorted(sp.table_text)]


GOLDENS: dict[str, Callable[[], tuple[str, list[tuple[str, Polynomial]]]]] = {
    "generators": _generators,
    "relations": _relations,
    "generating_function": _generating_function,
    "normal_form_1": _nf1,
    "normal_form_2": _nf2,
    "second_normal_form": _second_stage,
    "sphere_form": _sphere,
    "reduced_hamiltonian": _reduced,
    "sigma_brackets": _sigma_brackets,
}


def render_golden(name: str) -> str:
    space, items = GOLDENS[name]()
    lines = [HEADER, f"# space: {space}"]
    lines += [f"{k} = {p.to_text()}" for k, p in items]
    return "\n".join(lines) + "\n"


@dataclass
class GoldenResult:
    name: str
    status: str  # "ok", "missing", "diff"
    detail: str = ""


def first_divergent_term(a: str, b: str, space: VariableSpace) -> str:
    """First monomial, in canonical order, whose coefficient differs between two polynomial texts."""
    try:
        pa, pb = parse(a, space), parse(b, space)
    except ParseError as exc:
        return f"unparsable: {exc}"
    d = pa - pb
    if d.is_zero():
        return "same polynomial, different text"
    m, _ = d.sorted_raw()[0]
    mono = Polynomial._from(space, {m: 1}).to_text()
    ca = dict(pa.sorted_raw()).get(m, 0)
    cb = dict(pb.sorted_raw()).get(m, 0)
    return f"term {mono}: expected {cb}, got {ca}"


def emit_goldens(path: str, names=None) -> list[str]:
    os.makedirs(path, exist_ok=True)
    written = []
    for name in names or GOLDENS:
        fn = os.path.join(path, f"{name}.golden")
        with open(fn, "w", newline="\n") as fh:
            fh.write(render_golden(name))
        written.append(fn)
    return written


def _diff(name: str, want: str, got: str) -> str:
    wl, gl = want.splitlines(), got.splitlines()
    space = SPACES.get(gl[1].split(":", 1)[1].strip(), INVARIANT) if len(gl) > 1 and ":" in gl[1] else INVARIANT
    for i, (w, g) in enumerate(zip(wl, gl)):
        if w == g:
            continue
        if " = " in w and " = " in g and w.split(" = ", 1)[0] == g.split(" = ", 1)[0]:
            key = w.split(" = ", 1)[0]
            return f"line {i + 1} ({key}): " + first_divergent_term(g.split(" = ", 1)[1], w.split(" = ", 1)[1], space)
        return f"line {i + 1}: expected {w!r}, got {g!r}"
    return f"line count differs: expected {len(wl)}, got {len(gl)}"


def check_goldens(path: str, names=None) -> list[GoldenResult]:
    out = []
    for name in names or GOLDENS:
        fn = os.path.join(path, f"{name}.golden")
        if not os.path.exists(fn):
            out.append(GoldenResult(name, "missing", fn))
            continue
        with open(fn, newline="") as fh:
            want = fh.read()
        got = render_golden(name)
        out.append(GoldenResult(name, "ok") if want == got else GoldenResult(name, "diff", _diff(name, want, got)))
    return out
