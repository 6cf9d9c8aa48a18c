"""Command line, run configuration, golden files and the verification report."""

import json
import os
import shutil

import pytest
from hypothesis import given
from hypothesis import strategies as st

from starknf.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from starknf.config import ConfigError, RunConfig, merge, read_config_file
from starknf.goldens import GOLDENS, check_goldens, emit_goldens, render_golden
from starknf.report import (
    PLUMBING,
    SCHEMA,
    DEFAULT_SUITES,
    UnknownSuiteError,
    VerificationReport,
    resolve_suites,
    run_verify,
)


@pytest.fixture(scope="module")
def full_report():
    return run_verify(None, {"command": "verify"})


# -- report ----------------------------------------------------------------------------


def test_report_invariants(full_report):
    ids = [r.check_id for r in full_report.records]
    assert len(ids) == len(set(ids))
    assert all(r.anchor for r in full_report.records)
    assert full_report.exit_code == (1 if full_report.by_status("fail") else 0)
    assert full_report.suites == list(DEFAULT_SUITES)


def test_default_report_has_no_failures(full_report):
    assert not full_report.by_status("fail"), [r.check_id for r in full_report.by_status("fail")]
    assert full_report.by_status("discrepancy")


def test_report_json_schema(full_report):
    d = json.loads(full_report.to_json())
    assert d["schema"] == SCHEMA
    assert set(d["summary"]) == {"pass", "fail", "discrepancy", "status"}
    assert {"check_id", "anchor", "status", "artifact", "reference", "notes"} == set(d["records"][0])
    assert "timings" not in d


def test_report_is_byte_identical(full_report):
    again = run_verify(None, {"command": "verify"})
    assert again.to_json() == full_report.to_json()
    assert again.to_text() == full_report.to_text()


def test_report_status_rules():
    rep = VerificationReport()
    rep.add("a", PLUMBING, True)
    rep.compare("b", "some display", False, "1", "2")
    assert rep.exit_code == 0
    with pytest.raises(ValueError):
        rep.add("a", PLUMBING, True)
    with pytest.raises(ValueError):
        rep.add("c", "", True)
    with pytest.raises(ValueError):
        rep.add("d", PLUMBING, "maybe")
    rep.add("e", PLUMBING, False)
    assert rep.exit_code == 1


def test_relations_suite():
    rep = run_verify(["relations"])
    assert rep.suites == ["relations"]
    recs = rep.suite_records("relations")
    assert sum(r.status == "pass" for r in recs) >= 9
    assert not rep.by_status("fail")


def test_second_stage_suite_reports_discrepancies():
    rep = run_verify(["second-stage"])
    assert rep.exit_code == 0
    assert rep.by_status("discrepancy")


def test_suite_selection():
    assert resolve_suites(["reduction", "relations"]) == ["relations", "reduction"]
    assert "dynamics" in resolve_suites(["all"])
    with pytest.raises(UnknownSuiteError):
        resolve_suites(["nope"])


def test_hard_error_becomes_fail_record(monkeypatch):
    import starknf.report as report

    def boom(rep):
        raise RuntimeError("broken")

    monkeypatch.setitem(report.SUITES, "relations", (boom, ()))
    rep = run_verify(["relations"])
    assert rep.exit_code == 1
    assert rep.by_status("fail")[0].check_id == "relations.error"


# -- goldens ---------------------------------------------------------------------------


def test_checked_in_goldens_match(golden_dir):
    results = check_goldens(golden_dir)
    assert [r.name for r in results] == list(GOLDENS)
    assert all(r.status == "ok" for r in results), [(r.name, r.detail) for r in results if r.status != "ok"]


def test_golden_content_examples():
    assert "normal_form = H2 - 3/2*eps*beta*H2*K3\n" in render_golden("normal_form_1")
    assert render_golden("generators").startswith("# starknf golden v1\n# space: canonical\n")


def test_golden_regeneration_idempotent(tmp_path):
    a = emit_goldens(str(tmp_path / "a"))
    b = emit_goldens(str(tmp_path / "b"))
    for x, y in zip(a, b):
        assert open(x, "rb").read() == open(y, "rb").read()


def test_golden_diff_names_first_divergent_term(tmp_path, golden_dir):
    d = tmp_path / "g"
    shutil.copytree(golden_dir, d)
    fn = d / "normal_form_1.golden"
    fn.write_text(fn.read_text().replace("3/2*eps", "5/2*eps"))
    (d / "sphere_form.golden").unlink()
    res = {r.name: r for r in check_goldens(str(d))}
    assert res["normal_form_1"].status == "diff"
    assert "eps*beta*H2*K3" in res["normal_form_1"].detail
    assert res["sphere_form"].status == "missing"
    assert main(["goldens", "check", str(d)]) == EXIT_FAIL


# -- configuration ---------------------------------------------------------------------

_finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(_finite, _finite, _finite, _finite, st.lists(st.sampled_from(DEFAULT_SUITES), max_size=3),
       st.text(max_size=8), st.integers(0, 2**31))
def test_run_config_round_trip(eps, beta, h, k, suites, out, seed):
    c = RunConfig("simulate", eps, beta, h, k, tuple(suites), out, seed)
    assert RunConfig.from_canonical(c.canonical()) == c
    assert RunConfig.from_canonical(c.canonical()).canonical() == c.canonical()


def test_config_file_and_flag_precedence(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("eps = 0.002\nbeta = 3\nseed = 5\nsuites = relations, reduction\n")
    vals = read_config_file(str(p))
    assert vals == {"eps": 0.002, "beta": 3.0, "seed": 5, "suites": ("relations", "reduction")}
    cfg = merge("simulate", {"eps": 0.004, "beta": None}, vals)
    assert cfg.eps == 0.004 and cfg.beta == 3.0 and cfg.seed == 5
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))


def test_config_rejects_nonfinite():
    with pytest.raises(ConfigError):
        RunConfig("simulate", eps=float("inf"))


# -- command line ----------------------------------------------------------------------


def test_cli_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(["verify", "--suite", "nope", "--quiet"]) == EXIT_USAGE
    assert main(["reduce", "--h", "1", "--k", "2", "--emit-space"]) == EXIT_USAGE
    assert main(["reduce", "--h", "one"]) == EXIT_USAGE
    assert main(["simulate", "--eps", "-1", "--out", "x"]) == EXIT_USAGE
    assert main(["--config", "/nonexistent/file", "nf"]) == EXIT_USAGE
    capsys.readouterr()


def test_cli_verify_writes_reports(tmp_path, capsys):
    j, t = tmp_path / "r.json", tmp_path / "r.txt"
    assert main(["verify", "--suite", "relations", "--json", str(j), "--text", str(t), "--quiet"]) == EXIT_OK
    d = json.loads(j.read_text())
    assert d["schema"] == SCHEMA and d["config"]["suites"] == ["relations"]
    assert t.read_text().rstrip().endswith("-> PASS")
    assert capsys.readouterr().out == ""


def test_cli_nf(capsys):
    assert main(["nf", "--order", "1"]) == EXIT_OK
    assert capsys.readouterr().out == "normal_form_1 = H2 - 3/2*eps*beta*H2*K3\n"
    assert main(["nf", "--stage", "second", "--format", "json", "--audit"]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert set(d) == {"normal_form_1", "normal_form_2", "second_normal_form"}
    assert len(d["normal_form_2"]["audit"]) == 8


def test_cli_reduce(capsys):
    assert main(["reduce", "--h", "1", "--k", "0", "--emit-space", "--emit-eom"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "space.kind = singular-sphere" in out
    assert "printed_reduced = -13/12*eps*beta*sigma6^2" in out
    assert "dsigma3/dt" in out


def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "run"
    argv = ["simulate", "--eps", "1e-3", "--beta", "1", "--h", "1", "--tmax", "2", "--seed", "1",
            "--samples", "10", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert sorted(os.listdir(out)) == ["manifest.json", "summary.json", "trajectory.csv"]
    header = (out / "trajectory.csv").read_text().splitlines()[0].split(",")
    assert header[:9] == ["t", "q1", "q2", "q3", "q4", "p1", "p2", "p3", "p4"]
    assert {"H", "H2", "Xi", "K3", "L3"} <= set(header)
    first = (out / "trajectory.csv").read_bytes()
    assert main(argv) == EXIT_OK
    assert (out / "trajectory.csv").read_bytes() == first
    red = tmp_path / "red"
    assert main(["simulate", "--eps", "1e-3", "--h", "1", "--k", "0.5", "--reduced", "--tmax", "2",
                 "--samples", "4", "--out", str(red)]) == EXIT_OK
    s = json.loads((red / "summary.json").read_text())
    assert s["kind"] == "reduced" and s["drift"]["K3"] <= 1e-10
    capsys.readouterr()


def test_cli_simulate_config_file(tmp_path, capsys):
    cfgf = tmp_path / "c.cfg"
    cfgf.write_text(f"eps = 0.002\noutput = {tmp_path / 'o'}\n")
    assert main(["--config", str(cfgf), "simulate", "--tmax", "1", "--samples", "2"]) == EXIT_OK
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["config"]["eps"] == 0.002
    capsys.readouterr()
