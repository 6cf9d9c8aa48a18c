"""Machine-readable verification report and the verification suites.

Every record has a unique ``check_id``, an ``anchor`` naming the object
being checked (or the tag ``plumbing`` for artifact-only checks) and a
status:

``pass``
    the check holds;
``fail``
    an artifact-internal requirement is violated, or a suite raised;
``discrepancy``
    the recomputed value differs from the printed reference value.  These
    document the printed displays and never fail the run.

Reports contain no timestamps, so the same inputs give byte-identical JSON.
"""

from __future__ import annotations

import json
import platform
import time
import traceback
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from . import __version__

__all__ = [
    "SCHEMA",
    "STATUSES",
    "PLUMBING",
    "CheckRecord",
    "VerificationReport",
    "SUITES",
    "SUITE_ORDER",
    "run_verify",
    "resolve_suites",
    "UnknownSuiteError",
]

SCHEMA = "starknf.verification-report/1"
STATUSES = ("pass", "fail", "discrepancy")
PLUMBING = "plumbing"


class UnknownSuiteError(ValueError):
    pass


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    anchor: str
    status: str
    artifact: str = ""
    reference: str | None = None
    notes: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if not self.anchor:
            raise ValueError("every record needs an anchor or the plumbing tag")


@dataclass
class VerificationReport:
    config: dict = field(default_factory=dict)
    records: list[CheckRecord] = field(default_factory=list)
    suites: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, check_id: str, anchor: str, status: str | bool, artifact="", reference=None, notes="") -> CheckRecord:
        if not isinstance(status, str):
            status = "pass" if bool(status) else "fail"
        if any(r.check_id == check_id for r in self.records):
            raise ValueError(f"duplicate check id {check_id!r}")
        rec = CheckRecord(check_id, anchor, status, str(artifact), None if reference is None else str(reference), notes)
        self.records.append(rec)
        return rec

    def compare(self, check_id: str, anchor: str, same: bool, artifact, reference, notes="") -> CheckRecord:
        """Record a comparison with a printed value: ``pass`` or ``discrepancy``."""
        return self.add(check_id, anchor, "pass" if bool(same) else "discrepancy", artifact, reference, notes)

    def by_status(self, status: str) -> list[CheckRecord]:
        return [r for r in self.records if r.status == status]

    def suite_records(self, suite: str) -> list[CheckRecord]:
        return [r for r in self.records if r.check_id.split(".", 1)[0] == suite]

    @property
    def failed(self) -> bool:
        return bool(self.by_status("fail"))

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def counts(self) -> dict[str, int]:
        return {s: len(self.by_status(s)) for s in STATUSES}

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "metadata": _metadata(),
            "config": self.config,
            "suites": list(self.suites),
            "summary": {**self.counts(), "status": "fail" if self.failed else "pass"},
            "records": [asdict(r) for r in self.records],
        }
        if include_timings:
            out["timings"] = dict(self.timings)
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"{SCHEMA}  starknf {__version__}", f"suites: {', '.join(self.suites)}"]
        for suite in self.suites:
            recs = self.suite_records(suite)
            c = {s: sum(r.status == s for r in recs) for s in STATUSES}
            lines.append("")
            lines.append(f"[{suite}] {c['pass']} pass, {c['discrepancy']} discrepancy, {c['fail']} fail")
            for r in recs:
                lines.append(f"  {r.status.upper():<12} {r.check_id}  ({r.anchor})")
                if r.status != "pass":
                    lines.append(f"      artifact:  {r.artifact}")
                    if r.reference is not None:
                        lines.append(f"      reference: {r.reference}")
                if r.notes:
                    lines.append(f"      note: {r.notes}")
        c = self.counts()
        lines.append("")
        lines.append(f"total: {c['pass']} pass, {c['discrepancy']} discrepancy, {c['fail']} fail"
                     f" -> {'FAIL' if self.failed else 'PASS'}")
        return "\n".join(lines) + "\n"


def _metadata() -> dict:
    import numpy
    import scipy

    return {"starknf": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "scipy": scipy.__version__}


# -- suites -----------------------------------------------------------------------


def _suite_invariants(rep: VerificationReport) -> None:
    from .exact.space import INVARIANT_NAMES
    from .invariants import build_bracket_structure, build_generators, compare_derivation, ks_map, ks_pullback_hamiltonian

    build_generators()
    rep.add("invariants.generators_commute_with_Xi", "quadratic invariants of the Xi action", True,
            f"{len(INVARIANT_NAMES)} generators")
    bs = build_bracket_structure()
    n = len(INVARIANT_NAMES)
    rep.add("invariants.bracket_closure", "bracket table of the invariants", True,
            f"{n * (n + 1) // 2} unordered pairs ({n * n} ordered) close linearly, zero residual")
    antisym = all(
        {k: -v for k, v in bs.coefficients[(a, b)].items()} == bs.coefficients[(b, a)]
        for a in INVARIANT_NAMES for b in INVARIANT_NAMES)
    rep.add("invariants.bracket_antisymmetric", PLUMBING, antisym)
    rep.add("invariants.Xi_central", "Xi Poisson-commutes with every invariant",
            all(not bs.coefficients[(a, "Xi")] for a in INVARIANT_NAMES))
    for gen in ("H2", "K3", "U4", "V1"):
        for c in compare_derivation(gen):
            cid = f"invariants.Y_{gen}.{c.variable}"
            while any(r.check_id == cid for r in rep.records):
                cid += "'"
            rep.compare(cid, f"vector field of {gen}, component {c.variable}", c.matches, c.computed, c.printed)
    checks = ks_map().check()
    for k, v in checks.items():
        rep.add(f"invariants.ks.{k}", "KS map in terms of the invariants", v)
    ks_pullback_hamiltonian()
    rep.add("invariants.ks_pullback", "regularized Hamiltonian as the KS pullback", True,
            "<q,q>*(H - Kpre o KS) lies in <Xi>")


def _suite_relations(rep: VerificationReport) -> None:
    from .invariants import ORBIT_RELATIONS, verify_orbit_inequalities, verify_orbit_relations

    n_main = len(ORBIT_RELATIONS)
    for i, r in enumerate(verify_orbit_relations(supplementary=True)):
        kind = "orbit-space relation" if i < n_main else "supplementary relation"
        rep.add(f"relations.{r.name}", kind, r.passed, f"{r.lhs} = {r.rhs} [{r.status}]")
    ineq = verify_orbit_inequalities()
    for r in ineq:
        rep.add(f"relations.{r.name}", "orbit-space sign condition", r.passed,
                f"{r.expression} = {r.certificate} [sum of squares]")
    rep.add("relations.count", PLUMBING, True, f"{n_main} equalities and {len(ineq)} sign conditions checked")


def _suite_nf1(rep: VerificationReport) -> None:
    from .averaging.normalform import normalize_first_order, solve_F, time_weighted_means
    from .reference import REFERENCE, reference

    res = normalize_first_order()
    for a in res.audit:
        rep.compare(f"normalform-1.{a.key}", a.description, a.matches, a.value, a.reference)
    ref = reference("nf1.normal_form")
    rep.compare("normalform-1.normal_form", REFERENCE["nf1.normal_form"].anchor, res.normal_form == ref,
                res.normal_form, ref)
    sol = solve_F()
    for k, v in sol.checks.items():
        internal = "matches" not in k
        rid = "normalform-1.F." + k.replace(" ", "_")
        if internal:
            rep.add(rid, "homological equation along the H2 flow", v)
        else:
            rep.compare(rid, "generating function", v, sol.F, reference("gen.F"))
    for k, v in time_weighted_means().items():
        rep.compare(f"normalform-1.{k}", REFERENCE[k].anchor, v == reference(k), v, reference(k))


def _suite_nf2(rep: VerificationReport) -> None:
    from .averaging.normalform import _canon, normalize_second_order, second_order_term
    from .reference import REFERENCE, reference

    term = second_order_term()
    for i, a in enumerate(term.audit):
        rep.compare(f"normalform-2.term_{'I II III IV V VI VII VIII'.split()[i]}", a.description, a.matches,
                    _canon(a.value), a.reference)
    res = normalize_second_order()
    rep.add("normalform-2.audit_adds_up", "sum of the eight averaged terms", res.checks["audit adds up"])
    rep.add("normalform-2.brute_force_agrees", "independent Lie series in (q, p)",
            res.checks["brute-force series agrees"])
    rep.compare("normalform-2.first_piece_average", REFERENCE["nf2.avg_first_piece"].anchor,
                res.checks["first piece averages to zero"], _canon(term.first_piece_average), "0")
    coords = res.details["bracket_total_printed_coordinates"]
    for name, mine, ref in zip(coords["names"], coords["artifact"], coords["reference"]):
        rep.compare(f"normalform-2.coefficient[{name}]", REFERENCE["nf2.bracket_total"].anchor, mine == ref,
                    mine, ref, notes="coefficient of the averaged double bracket")
    rep.compare("normalform-2.normal_form", REFERENCE["nf2.normal_form"].anchor,
                res.checks["normal form matches reference"], res.normal_form, reference("nf2.normal_form"))
    for d in res.discrepancies:
        if d.key.startswith("gen."):
            rep.compare(f"normalform-2.{d.key}", d.anchor, False, d.artifact, d.reference)


def _suite_stage2(rep: VerificationReport) -> None:
    from .averaging.normalform import second_normalization

    res = second_normalization()
    disc = {d.key: d for d in res.discrepancies}
    for k, v in res.checks.items():
        if k.endswith("matches reference"):
            key = k.split()[0]
            d = disc.get(key)
            rep.compare(f"second-stage.{key}", d.anchor if d else key, v,
                        d.artifact if d else "", d.reference if d else None)
        elif k == "printed T averages to printed T_bar":
            d = disc.get("stage2.T_bar.internal")
            rep.compare("second-stage.printed_internal_consistency", "K3-average of the printed term", v,
                        d.artifact if d else "", d.reference if d else None, d.note if d else "")
        else:
            rep.add("second-stage." + k.replace(" ", "_"), "averaging along the K3 flow", v)
    rep.add("second-stage.T_is_K3_invariant", "averaged term on the level set",
            bool(res.details["T_is_K3_invariant"]),
            notes="true means the K3 average leaves the term unchanged modulo <Xi, H2 - h>")
    rep.add("second-stage.normal_form", PLUMBING, True, res.normal_form)


def _suite_reduction(rep: VerificationReport) -> None:
    from fractions import Fraction

    from . import reduction as R

    for i, c in enumerate(R.verify_sphere_identities()):
        cid = f"reduction.sphere_identity.{c.source}.{i}"
        if c.source == "artifact":
            rep.add(cid, "identity on the level set", c.holds, f"{c.lhs} = {c.rhs}")
        else:
            rep.compare(cid, "printed identity on the level set", c.holds, f"residual {c.residual}",
                        f"{c.lhs} = {c.rhs}")
    R.sigma_chart()
    rep.add("reduction.sigma_chart", "K3-invariants on the product of spheres", True,
            "six invariants, relation sigma3^2 + sigma4^2 = sigma1*sigma2")
    for n, ok in R.printed_sigma_invariance().items():
        rep.compare(f"reduction.printed_{n}_invariant", "printed K3-invariant", ok,
                    str(R.sigma_chart().sigma[n]), None,
                    "" if ok else "not invariant under the K3 flow; the invariant pairing is used instead")
    for h, k in ((1, 0), (1, Fraction(1, 2)), (1, 1)):
        d = R.build_reduced_space(h, k)
        rep.add(f"reduction.space[h={h},k={k}]", "reduced space", True, f"{d.kind}: {d.polynomial} = 0, "
                f"|sigma6| <= {d.sigma6_bound}")
    for conv in (R.FLOW, R.COORDINATE):
        rep.add(f"reduction.induced_bracket[{conv.name}]", "bracket on the product of spheres", True,
                f"{R.induced_bracket_scale(conv)} x the two-sphere bracket")
    for conv in (R.FLOW, R.COORDINATE):
        rh = R.reduced_hamiltonian(conv)
        only_s6 = rh.reduced.free_symbols() - {"sigma6", "h", "k", "eps", "beta"} == set() and \
            not ({"sigma1", "sigma2", "sigma3", "sigma4"} & rh.reduced.free_symbols())
        rep.add(f"reduction.{conv.name}.function_of_sigma6", "reduced Hamiltonian", only_s6, rh.reduced)
        rep.compare(f"reduction.{conv.name}.reduced", "reduced Hamiltonian", rh.diff["reduced_matches"],
                    rh.reduced, rh.reference_reduced, json.dumps(rh.diff["reduced_coefficients"], sort_keys=True))
        rep.compare(f"reduction.{conv.name}.dropped_constant", "constant dropped from the reduced Hamiltonian",
                    rh.diff["constant_matches"], rh.dropped_constant, rh.reference_constant,
                    json.dumps(rh.diff["constant_coefficients"], sort_keys=True))
    via = R.reduced_hamiltonian().diff["printed_sphere_form_via"]
    for name, v in sorted(via.items()):
        rep.compare(f"reduction.printed_sphere_form.{name}", "printed sphere-level Hamiltonian, reduced",
                    v["reduced_matches_print"] and v["constant_matches_print"], f"{v['reduced']}; {v['constant']}",
                    None, f"reduced matches: {v['reduced_matches_print']}, constant matches: {v['constant_matches_print']}")
    rep.add("reduction.paper_form", "reduced Hamiltonian as printed", True,
            str(R.reduced_hamiltonian().reference_reduced), notes="emitted for comparison")
    sp = R.derive_sigma_poisson()
    for k, v in sp.checks.items():
        rep.add("reduction.sigma_bracket." + k.replace(" ", "_"), "bracket of the K3-invariants", v)
    eom = R.reduced_equations_of_motion()
    rep.add("reduction.equations_of_motion", "reduced equations of motion", True,
            "; ".join(f"{n}' = {e}" for n, e in eom.items()))
    z = R.verify_zk3_flow()
    for k, v in z.checks.items():
        if k.startswith("printed"):
            rep.compare("reduction.zk3." + k.replace(" ", "_"), "printed K3 flow", v, "" if v else "see flow", None)
        else:
            rep.add("reduction.zk3." + k.replace(" ", "_"), "K3 flow on the product of spheres", v)


def _suite_oracles(rep: VerificationReport) -> None:
    import numpy as np

    from .averaging.normalform import P, perturbation
    from .averaging.trig import FlowSpec
    from .dynamics.constants import CONSTANTS
    from .dynamics.evaluate import eval_expression
    from .dynamics.oracles import (compare_average, invariant_point, ks_identity_residual, numeric_average_oracle,
                                   verify_preregularization)
    from .exact.polynomial import Polynomial
    from .exact.sampling import variety_points
    from .exact.space import INVARIANT

    tol = CONSTANTS["oracle_agreement"]
    pts = variety_points(25, level=1, seed=7)
    ipts = [invariant_point(p, beta=1.0) for p in pts]
    H2 = FlowSpec.invariant("H2")
    K3 = FlowSpec.invariant("K3")
    cases = [
        ("U4*V1", P("U4*V1"), H2),
        ("U2*V2", P("U2*V2"), H2),
        ("perturbation", perturbation(), H2),
        ("constant", Polynomial.constant(INVARIANT, 3), H2),
        ("H2*U4", P("H2*U4"), H2),
        ("U1^2 along K3", P("U1^2"), K3),
        ("V4^2 along K3", P("V4^2"), K3),
    ]
    for label, f, spec in cases:
        worst = max(compare_average(f, spec, pt, label).error for pt in ipts)
        rep.add(f"numeric-oracles.average[{label}]", "quadrature along the closed-form flow", worst <= tol,
                f"max error {worst:.2e} over {len(ipts)} points", notes=f"tolerance {tol:g}")
    onshell = P("-1/2*H2*K3")
    worst = max(abs(numeric_average_oracle(P("U4*V1"), H2, pt) - eval_expression(onshell, pt)) for pt in ipts)
    rep.add("numeric-oracles.average[U4*V1]=-1/2*H2*K3", "first-order average of U4*V1 on Xi = 0", worst <= tol,
            f"max error {worst:.2e}")
    rng = np.random.default_rng(11)
    zs = [np.array(p.as_floats()) for p in variety_points(100, level=1, seed=3)]
    res = [abs(ks_identity_residual(z, float(e), 1.0)) for z, e in zip(zs, rng.uniform(0, 0.1, len(zs)))]
    rep.add("numeric-oracles.ks_identity", "preregularized Hamiltonian composed with KS",
            max(res) <= CONSTANTS["ks_identity"], f"max residual {max(res):.2e} at {len(zs)} points")
    lit = max(abs(ks_identity_residual(z, 0.0, 1.0, literal=True)) for z in zs[:10])
    rep.compare("numeric-oracles.ks_identity_literal", "printed form of the preregularized Hamiltonian",
                lit <= CONSTANTS["ks_identity"], f"max residual {lit:.2e}", "0",
                notes="read literally with '+|x|'; the '+1' reading satisfies the identity")
    for label, x, y, eps in (("circular", (0, 0, 1), (1, 0, 0), 0.0), ("tilted", (0.6, 0, 0.8), (0, 1, 0), 0.0),
                             ("field", (0.3, -0.2, 0.5), (0.4, 0.7, -0.1), 1e-3)):
        r = verify_preregularization(x, y, eps=eps)
        rep.add(f"numeric-oracles.preregularization[{label}]", "energy level to preregularized Hamiltonian",
                r.passed, json.dumps({k: round(v, 15) for k, v in r.values.items()}, sort_keys=True),
                notes="; ".join(k for k, v in r.checks.items() if not v))


def _suite_dynamics(rep: VerificationReport) -> None:
    from .dynamics.constants import CONSTANTS
    from .dynamics.experiments import compare_normalform
    from .dynamics.flows import Params, integrate_full, integrate_reduced, sample_initial_state, sample_sphere_point

    tr = integrate_full(Params(1e-3), sample_initial_state(0), 100.0)
    d = tr.drift("H", relative=True)
    rep.add("dynamics.full.energy_drift", "regularized flow", d <= CONSTANTS["full_energy_drift"], f"{d:.2e}")
    x = tr.max_abs("Xi")
    rep.add("dynamics.full.Xi_drift", "regularized flow", x <= CONSTANTS["full_xi_drift"], f"{x:.2e}")
    rr = integrate_reduced(Params(1e-2), sample_sphere_point(0), 100.0)
    worst = max(rr.drift(n) for n in ("Hhat", "xi2", "eta2", "K3"))
    rep.add("dynamics.reduced.conservation", "reduced flow", worst <= CONSTANTS["reduced_drift"], f"{worst:.2e}")
    rel = rr.max_abs("relation")
    rep.add("dynamics.reduced.relation", "reduced flow", rel <= CONSTANTS["reduced_drift"], f"{rel:.2e}")
    lad = compare_normalform()
    lo, hi = CONSTANTS["ratio_window"]
    rep.add("dynamics.normalform_ratio", "first-order normal form as slow-dynamics predictor",
            all(lo <= r <= hi for r in lad.ratios), ", ".join(f"{r:.3f}" for r in lad.ratios),
            notes=f"fitted order {lad.order:.3f}")


SUITES: dict[str, tuple[Callable[[VerificationReport], None], tuple[str, ...]]] = {
    "invariants": (_suite_invariants, ()),
    "relations": (_suite_relations, ("invariants",)),
    "normalform-1": (_suite_nf1, ("invariants",)),
    "normalform-2": (_suite_nf2, ("normalform-1",)),
    "second-stage": (_suite_stage2, ("normalform-2",)),
    "reduction": (_suite_reduction, ("second-stage",)),
    "numeric-oracles": (_suite_oracles, ("invariants",)),
    "dynamics": (_suite_dynamics, ("normalform-1",)),
}
SUITE_ORDER = tuple(SUITES)
DEFAULT_SUITES = tuple(s for s in SUITE_ORDER if s != "dynamics")


def resolve_suites(selection: Iterable[str] | None) -> list[str]:
    """Selected suites in dependency order (dependencies are computed, not reported)."""
    sel = list(selection or DEFAULT_SUITES)
    if "all" in sel:
        sel = list(SUITE_ORDER)
    bad = [s for s in sel if s not in SUITES]
    if bad:
        raise UnknownSuiteError(f"unknown suite(s) {bad}; choose from {list(SUITE_ORDER)}")
    return [s for s in SUITE_ORDER if s in sel]


def run_verify(selection: Iterable[str] | None = None, config: dict | None = None) -> VerificationReport:
    rep = VerificationReport(config=dict(config or {}))
    rep.suites = resolve_suites(selection)
    for name in rep.suites:
        fn, _ = SUITES[name]
        t0 = time.perf_counter()
        try:
            fn(rep)
        except Exception as exc:  # noqa: BLE001 - any hard error is a failed record
            tb = traceback.format_exception_only(type(exc), exc)[-1].strip()
            cid = f"{name}.error"
            while any(r.check_id == cid for r in rep.records):
                cid += "'"
            rep.add(cid, PLUMBING, "fail", tb)
        rep.timings[name] = time.perf_counter() - t0
    return rep
