from __future__ import annotations

import json

import jsonschema
import pytest

from etf_forge import cli
from etf_forge.errors import ConsistencyError
from etf_forge.reports import Report, report_schema

SCHEMA = report_schema()


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out
    data = json.loads(out) if out.strip() else None
    if data is not None:
        jsonschema.validate(data, SCHEMA)
        assert data["exit_code"] == code
    return code, data, out


def results(data):
    return {r["check"]: r for r in data["results"]}


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    paths = {
        "p7": d / "p7.json",
        "p19": d / "p19.json",
        "p27": d / "p27.json",
        "c7": d / "c7.json",
        "gs3": d / "gs3.json",
        "b7": d / "b7.json",
    }
    assert cli.main(["paley", "--q", "7", "--out", str(paths["p7"])]) == 0
    assert cli.main(["construct", "paley", "--q", "19", "--out", str(paths["p19"])]) == 0
    assert cli.main(["construct", "paley", "--q", "27", "--modulus", "1,2,0,1", "--out", str(paths["p27"])]) == 0
    assert cli.main(["construct", "conference", "--q", "7", "--out", str(paths["c7"])]) == 0
    assert cli.main(["construct", "gabor-steiner-tp", "--p", "3", "--out", str(paths["gs3"])]) == 0
    return paths


def test_field(capsys):
    code, data, _ = run(capsys, "field", "--p", 3, "--s", 3, "--modulus", "1,2,0,1")
    assert code == 0
    assert data["data"]["S"] == [[0, 0, 1], [0, 1, 0], [1, 0, 1]]
    assert data["data"]["normal_basis_residue"]["orbit"] == [[0, 0, 1], [1, 1, 1], [1, 2, 1]]
    assert data["data"]["field"] == {"p": 3, "s": 3, "modulus": [1, 2, 0, 1]}
    code, data, _ = run(capsys, "field", "--p", 5)
    assert code == 0 and results(data)["paley_admissible"]["value"] is False


def test_construct_commands(capsys, tmp_path):
    code, data, _ = run(capsys, "construct", "diffset", "--group", 7, "--set", "1,2,4")
    assert code == 0 and results(data)["parameters"]["value"] == [7, 3, 1]
    assert data["data"]["object"]["kind"] == "frame"
    code, data, _ = run(capsys, "construct", "diffset", "--group", "2,2", "--set", "[[0,1],[1,0],[1,1]]")
    assert code == 0 and results(data)["parameters"]["value"] == [4, 3, 2]
    code, data, _ = run(capsys, "construct", "diffset", "--group", 7, "--set", "1,2")
    assert code == 1 and data["status"] == "rejected"
    for kind, flag, val in (("simplex", "--n", 5), ("onb", "--n", 3)):
        code, data, _ = run(capsys, "construct", kind, flag, val)
        assert code == 0
    code, data, _ = run(capsys, "construct", "conference", "--q", 3)
    assert code == 0 and results(data)["d"]["value"] == 2


def test_analyze(capsys, files):
    code, data, _ = run(capsys, "analyze", "--in", files["p7"], "--checks", "equiangular,tight,3c,rank")
    r = results(data)
    assert code == 0
    assert r["equiangular:value"]["value"] == 2 and r["tight:value"]["value"] == 7 and r["rank"]["value"] == 3
    assert r["3c_uniform"]["value"] is False
    code, data, _ = run(capsys, "analyze", "--in", files["c7"], "--checks", "3c")
    assert results(data)["3c_uniform"]["value"] is True
    code, _, _ = run(capsys, "analyze", "--in", files["p7"], "--checks", "bogus")
    assert code == 1


def test_symmetry_and_homogeneity(capsys, files):
    code, data, _ = run(capsys, "symmetry", "--in", files["p27"], "--expect", "agl:27", "--modulus", "1,2,0,1")
    r = results(data)
    assert code == 0 and r["order"]["value"] == 1053 and r["equals_expected_group"]["passed"]
    assert r["2-homogeneous"]["value"] and not r["2-transitive"]["value"]
    code, data, _ = run(capsys, "symmetry", "--in", files["p7"], "--mode", "vectors", "--expect", "agl:7")
    assert code == 0 and results(data)["order"]["value"] == 21
    code, data, _ = run(capsys, "symmetry", "--in", files["gs3"], "--expect", "asp:3")
    assert code == 0 and results(data)["order"]["value"] == 216
    code, data, _ = run(capsys, "homogeneity", "--in", files["c7"], "--k", "3,4")
    r = results(data)
    assert r["3-homogeneous"]["value"] and not r["4-homogeneous"]["value"]
    # a deliberately wrong expectation is an assertion failure
    code, data, _ = run(capsys, "symmetry", "--in", files["p7"], "--expect", "sym")
    assert code == 2 and data["status"] == "assertion_failed"
    # triple tables have no vector group
    code, _, _ = run(capsys, "symmetry", "--in", files["gs3"], "--mode", "vectors")
    assert code == 1


def test_spark_bender_design(capsys, files, tmp_path):
    code, data, _ = run(capsys, "spark", "--in", files["p7"])
    assert code == 0 and results(data)["spark"]["value"] == 4
    out = tmp_path / "b7.json"
    code, data, _ = run(capsys, "bender", "--in", files["p7"], "--design-check", "--out", out)
    r = results(data)
    assert code == 0 and r["blocks"]["value"] == 35 and r["design_degree"]["value"] == 4
    stored = json.loads(out.read_text())
    assert stored["v"] == 7 and stored["k"] == 4 and len(stored["blocks"]) == 35
    code, data, _ = run(capsys, "design", "--in", out, "--t", 2)
    assert code == 0 and results(data)["lambda"]["value"] == 10


def test_switch_equiv(capsys, files):
    code, data, _ = run(capsys, "switch-equiv", "--a", files["p7"], "--b", files["p7"], "--search")
    r = results(data)
    assert code == 0 and r["aligned_equivalent"]["value"] and r["equivalent_up_to_permutation"]["value"]


def test_reports_are_byte_identical_and_jobs_invariant(capsys, files):
    outs = [run(capsys, "spark", "--in", files["p19"], "--jobs", j)[2] for j in (1, 1, 2)]
    assert outs[0] == outs[1] == outs[2]
    outs = [run(capsys, "paper-suite", "--q", "7,11", "--jobs", j)[2] for j in (1, 3)]
    assert outs[0] == outs[1]


def test_wall_time_is_opt_in(capsys, files):
    _, data, _ = run(capsys, "spark", "--in", files["p7"], "--wall-time")
    assert "wall_seconds" in data["timing"]
    _, data, _ = run(capsys, "spark", "--in", files["p7"])
    assert "wall_seconds" not in data["timing"]


def test_budget_env_var(capsys, files, monkeypatch):
    monkeypatch.setenv("ETF_FORGE_BUDGET", "50")
    code, data, _ = run(capsys, "spark", "--in", files["p19"])
    assert code == 3 and data["budget_report"]["budget"] == 50
    monkeypatch.delenv("ETF_FORGE_BUDGET")
    code, data, _ = run(capsys, "spark", "--in", files["p19"], "--budget", 50)
    assert code == 3


def test_suite_command_q7(capsys):
    code, data, _ = run(capsys, "paper-suite", "--q", "7")
    r = results(data)
    assert code == 0
    assert r["q=7:line_group_order"]["value"] == 21 and r["q=7:spark"]["value"] == 4
    assert r["q=7:bender_blocks"]["value"] == 35 and r["q=7:2-transitive"]["value"] is False
    assert all(x["passed"] is not False for x in data["results"])


def test_suite_command_rejections_and_refusals(capsys):
    code, data, _ = run(capsys, "paper-suite", "--q", "5")
    assert code == 1 and data["status"] == "rejected"
    code, data, _ = run(capsys, "paper-suite", "--q", "343")
    assert code == 3
    br = data["budget_report"]["q=343"]
    assert br["spark_lower_bound"] == 20 and br["estimated_nodes_at_bound"] > br["budget"]
    assert not any(k.startswith("q=343:") and k != "q=343:refused" for k in results(data))


def test_conference_prime_power_refused(capsys):
    code, data, _ = run(capsys, "construct", "conference", "--q", 27)
    assert code == 3 and data["budget_report"]["q"] == 27
    code, _, _ = run(capsys, "construct", "conference", "--q", 5)
    assert code == 1


def test_khom_suite(capsys):
    code, data, _ = run(capsys, "khom-suite")
    r = results(data)
    assert code == 0
    assert r["conference q=7:3-subset_orbit"]["value"] == 56
    assert r["conference q=3:3-subset_orbit"]["value"] == 4
    assert r["paley q=7:3-homogeneous"]["value"] is False
    assert r["gabor-steiner p=3:line_group_order"]["value"] == 216


@pytest.mark.parametrize("argv", [[], ["nope"], ["spark"], ["construct"], ["construct", "paley"], ["field", "--p", "x"]])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 1


def test_missing_input_file(capsys, tmp_path):
    assert cli.main(["spark", "--in", str(tmp_path / "missing.json")]) == 1


def test_internal_consistency_failure_exits_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise ConsistencyError("forced")

    monkeypatch.setattr(cli.cx, "paley_etf", boom)
    code, data, _ = run(capsys, "paley", "--q", 7)
    assert code == 2 and results(data)["internal_consistency"]["passed"] is False


def test_report_exit_code_priority():
    rep = Report("x", {})
    assert rep.exit_code == 0 and rep.status == "ok"
    rep.rejected = True
    assert rep.exit_code == 1
    rep.budget_report = {}
    assert rep.exit_code == 3
    rep.add("c", 1, 2)
    assert rep.exit_code == 2
    assert rep.add("info", 5) is None
    assert rep.add("forced", 5, 6, passed=None) is None
