"""Command-line interface.

    starknf verify [--suite NAME ...] [--json PATH] [--text PATH]
    starknf nf [--order 1|2] [--stage first|second] [--format text|json] [--audit]
    starknf reduce --h H --k K [--convention flow|coordinate] [--emit-space] [--emit-eom] [--format text|json]
    starknf simulate --eps E --beta B --h H --tmax T --method M --seed S [--reduced --k K] --out DIR
    starknf goldens {emit,check} DIR

Exit codes: 0 success (discrepancy records allowed), 1 a check failed,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .config import ConfigError, RunConfig, merge, read_config_file

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starknf", description="Exact normal forms of the regularized Stark problem.")
    p.add_argument("--config", help="key = value file; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites and write a report")
    v.add_argument("--suite", dest="suites", action="append", help="suite name (repeatable), or 'all'")
    v.add_argument("--json", dest="json_path", help="write the JSON report here")
    v.add_argument("--text", dest="text_path", help="write the text report here")
    v.add_argument("--quiet", action="store_true")

    n = sub.add_parser("nf", help="print normal forms")
    n.add_argument("--order", type=int, choices=(1, 2), default=2)
    n.add_argument("--stage", choices=("first", "second"), default="first",
                   help="second: also run the normalization along the K3 flow")
    n.add_argument("--stage2", action="store_const", const="second", dest="stage", help=argparse.SUPPRESS)
    n.add_argument("--format", choices=("text", "json"), default="text")
    n.add_argument("--audit", action="store_true", help="dump the term-by-term audit trail")

    r = sub.add_parser("reduce", help="reduced Hamiltonian, reduced space and equations of motion")
    r.add_argument("--h", type=_frac, default=None)
    r.add_argument("--k", type=_frac, default=None)
    r.add_argument("--convention", choices=("flow", "coordinate"), default="flow")
    r.add_argument("--emit-space", action="store_true")
    r.add_argument("--emit-eom", action="store_true")
    r.add_argument("--format", choices=("text", "json"), default="text")

    s = sub.add_parser("simulate", help="integrate the full or reduced flow")
    s.add_argument("--eps", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--h", type=float)
    s.add_argument("--k", type=float)
    s.add_argument("--tmax", type=float, default=100.0)
    s.add_argument("--method", choices=("dop853", "gauss"), default="dop853")
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--reduced", action="store_true")
    s.add_argument("--hamiltonian", choices=("computed", "printed"), default="computed")
    s.add_argument("--ladder", action="store_true", help="also run the eps-scaling comparison")
    s.add_argument("--out", dest="output", default=None)

    g = sub.add_parser("goldens", help="emit or check golden files")
    g.add_argument("action", choices=("emit", "check"))
    g.add_argument("path")
    return p


def _write(path: str | None, text: str) -> None:
    if path:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _cmd_verify(args, cfg: RunConfig) -> int:
    from .report import UnknownSuiteError, run_verify

    try:
        rep = run_verify(cfg.suites or None, cfg.echo())
    except UnknownSuiteError as exc:
        raise UsageError(str(exc)) from None
    _write(args.json_path, rep.to_json())
    _write(args.text_path, rep.to_text())
    if not args.quiet:
        sys.stdout.write(rep.to_text())
    return rep.exit_code


def _cmd_nf(args, cfg: RunConfig) -> int:
    from .averaging.normalform import normalize_first_order, normalize_second_order, second_normalization

    results = [("normal_form_1", normalize_first_order())]
    if args.order == 2:
        results.append(("normal_form_2", normalize_second_order()))
    if args.stage == "second":
        results.append(("second_normal_form", second_normalization()))
    out = {}
    for name, r in results:
        entry = {"normal_form": r.normal_form.to_text()}
        if args.audit:
            entry["audit"] = [{"key": a.key, "anchor": a.description, "value": a.value.to_text(),
                               "reference": a.reference.to_text(), "matches": a.matches} for a in r.audit]
            entry["discrepancies"] = [{"key": d.key, "artifact": d.artifact, "reference": d.reference}
                                      for d in r.discrepancies]
        out[name] = entry
    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    for name, entry in out.items():
        print(f"{name} = {entry['normal_form']}")
        for a in entry.get("audit", ()):
            print(f"  {a['key']}: {'match' if a['matches'] else 'MISMATCH'}  {a['anchor']}")
            print(f"    value = {a['value']}")
            if not a["matches"]:
                print(f"    reference = {a['reference']}")
        for d in entry.get("discrepancies", ()):
            print(f"  discrepancy {d['key']}: artifact {d['artifact']} vs reference {d['reference']}")
    return EXIT_OK


def _cmd_reduce(args, cfg: RunConfig) -> int:
    from .reduction import build_reduced_space, reduced_equations_of_motion, reduced_hamiltonian

    space = None
    if args.emit_space:
        if args.h is None or args.k is None:
            raise UsageError("--emit-space needs --h and --k")
        try:
            space = build_reduced_space(args.h, args.k)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rh = reduced_hamiltonian(args.convention)
    vals = {}
    if args.h is not None:
        vals["h"] = args.h
    if args.k is not None:
        vals["k"] = args.k
    out = {"convention": args.convention, "reduced": rh.reduced.subs(vals).to_text(),
           "dropped_constant": rh.dropped_constant.subs(vals).to_text(),
           "printed_reduced": rh.reference_reduced.to_text()}
    if space is not None:
        out["space"] = {"kind": space.kind, "equation": space.polynomial.to_text(),
                        "sigma6_bound": str(space.sigma6_bound),
                        "singular_points": [[str(c) for c in pt] for pt in space.singular_points]}
    if args.emit_eom:
        sv = {}
        if args.h is not None:
            sv["h"] = args.h
        if args.k is not None:
            sv["sigma5"] = args.k
        out["eom"] = {n: (e.subs(sv) if sv else e).to_text()
                      for n, e in reduced_equations_of_motion(args.convention).items()}
    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    for key in ("convention", "reduced", "dropped_constant", "printed_reduced"):
        print(f"{key} = {out[key]}")
    if "space" in out:
        d = out["space"]
        print(f"space.kind = {d['kind']}")
        print(f"space.equation = {d['equation']} = 0")
        print(f"space.sigma6_bound = {d['sigma6_bound']}")
        for pt in d["singular_points"]:
            print(f"space.singular_point = ({', '.join(pt)})")
    for n, e in out.get("eom", {}).items():
        print(f"d{n}/dt = {e}")
    return EXIT_OK


def _cmd_simulate(args, cfg: RunConfig) -> int:
    from .dynamics.experiments import compare_normalform
    from .dynamics.flows import Params, integrate_full, integrate_reduced, sample_initial_state, sample_sphere_point
    from .dynamics.integrators import IntegrationError, IntegratorConfig
    from .report import SCHEMA

    if not cfg.output:
        raise UsageError("simulate needs --out DIR (or output = DIR in the config file)")
    try:
        params = Params(cfg.eps, cfg.beta, cfg.h, cfg.k)
        icfg = IntegratorConfig(method=args.method, seed=cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    os.makedirs(cfg.output, exist_ok=True)
    try:
        if args.reduced:
            try:
                z0 = sample_sphere_point(cfg.seed, cfg.h, cfg.k)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            tr = integrate_reduced(params, z0, args.tmax, icfg, args.samples, hamiltonian=args.hamiltonian)
        else:
            tr = integrate_full(params, sample_initial_state(cfg.seed, cfg.h), args.tmax, icfg, args.samples)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    tr.write_csv(os.path.join(cfg.output, "trajectory.csv"))
    summary = tr.summary()
    summary["tolerances"] = "artifact-defined"
    if args.ladder:
        summary["ladder"] = compare_normalform(beta=cfg.beta, h=cfg.h, seed=cfg.seed, cfg=icfg).to_dict()
    manifest = {"schema": SCHEMA.replace("verification-report", "run-manifest"), "config": cfg.echo(),
                "files": ["trajectory.csv", "summary.json"]}
    _write(os.path.join(cfg.output, "summary.json"), json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write(os.path.join(cfg.output, "manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(json.dumps({"drift": summary["drift"]}, sort_keys=True))
    return EXIT_OK


def _cmd_goldens(args, cfg: RunConfig) -> int:
    from .goldens import check_goldens, emit_goldens

    if args.action == "emit":
        for fn in emit_goldens(args.path):
            print(f"wrote {fn}")
        return EXIT_OK
    bad = 0
    for r in check_goldens(args.path):
        print(f"{r.name}: {r.status}" + (f" ({r.detail})" if r.detail else ""))
        bad += r.status != "ok"
    return EXIT_FAIL if bad else EXIT_OK


COMMANDS = {"verify": _cmd_verify, "nf": _cmd_nf, "reduce": _cmd_reduce, "simulate": _cmd_simulate,
            "goldens": _cmd_goldens}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        file_values = read_config_file(args.config) if args.config else {}
        flags = {k: getattr(args, k, None) for k in ("eps", "beta", "h", "k", "seed", "output", "suites")}
        if args.command != "simulate":
            flags = {k: v for k, v in flags.items() if k in ("suites",)}
        cfg = merge(args.command, flags, file_values)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError, FileNotFoundError) as exc:
        print(f"starknf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
