import csv
import json

import numpy as np
import pytest

from metricsurgery.cli import main as cli
from metricsurgery.cli.suites import PAPER_MAP, SUITES, Ctx


def run(argv, capsys=None):
    code = cli.main(argv)
    return code


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], float)


# --- catalog ---------------------------------------------------------------------

def test_list_suites(capsys):
    assert run(["list-suites"]) == 0
    out = capsys.readouterr().out
    for anchor in ("2.51", "3.8", "3.22"):
        assert anchor in out
    assert len(SUITES) == 9


def test_every_assertion_has_an_anchor():
    assert set(PAPER_MAP["suites"]) == set(SUITES)
    for suite in SUITES.values():
        assert suite.assertions
        assert all(isinstance(a, str) and a for a in suite.assertions.values())


def test_list_suites_json(capsys):
    assert run(["list-suites", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc["suites"]) == set(SUITES)


# --- run -----------------------------------------------------------------------------

def test_dehn_fill_run(tmp_path):
    assert run(["run", "--suite", "dehn_fill", "--t0", "5", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "dehn_fill.report.json").read_text())
    by = {a["name"]: a for a in rep["assertions"]}
    assert float(by["s_min_value"]["measured"]) <= 1e-6
    assert float(by["volume_ratio"]["measured"]) < 0.928
    assert all(a["anchor"] for a in rep["assertions"])
    assert rep["passed"] and rep["error"] is None


def test_schwarzschild_run(tmp_path):
    assert run(["run", "--suite", "schwarzschild_identities", "--mass", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "schwarzschild_identities.report.json").read_text())
    gauss = next(a for a in rep["assertions"] if a["name"] == "horizon_gauss")
    assert float(gauss["measured"]) <= 1e-8


def test_collapse_run(tmp_path):
    assert run(["run", "--suite", "collapse", "--eps", "0.1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "collapse.report.json").read_text())
    by = {a["name"]: a for a in rep["assertions"]}
    assert by["volume_ratio"]["passed"] and by["curvature_bound"]["passed"]


def test_failing_tolerance_exits_1(tmp_path):
    code = run(["run", "--suite", "collapse", "--tolerance-scale", "1e-30", "--out", str(tmp_path)])
    assert code == 1
    rep = json.loads((tmp_path / "collapse.report.json").read_text())
    assert not rep["passed"] and rep["error"] is None


@pytest.mark.parametrize("argv", [
    ["run", "--suite", "no_such_suite"],
    ["run", "--suite", "collapse", "--bogus", "1"],
    ["run", "--suite", "collapse", "--eps", "-0.1"],
    ["run", "--suite", "collapse", "--tolerance-scale", "0"],
    ["run", "--suite", "dehn_fill", "--grid", "1.5"],
    ["run", "--suite", "dehn_fill", "--series", "nope"],
    ["run"],
    ["frobnicate"],
])
def test_bad_input_exits_2(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)] if argv[0] == "run" else argv) == 2
    assert not list(tmp_path.glob("*.json"))


def test_computation_error_exits_3(tmp_path):
    # Case II needs the mass normalised to 1/2
    assert run(["run", "--suite", "sphere_case_ii", "--mass", "1", "--out", str(tmp_path)]) == 3
    rep = json.loads((tmp_path / "sphere_case_ii.report.json").read_text())
    assert rep["error"]["type"] == "ValueError"
    assert not rep["passed"]


def test_reports_are_deterministic(tmp_path):
    docs = []
    for sub in ("a", "b"):
        assert run(["run", "--suite", "cusp_identities", "--out", str(tmp_path / sub)]) == 0
        doc = json.loads((tmp_path / sub / "cusp_identities.report.json").read_text())
        doc.pop("wall_time")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_grid_points_env(tmp_path, monkeypatch):
    monkeypatch.setenv("MSL_GRID_POINTS", "512")
    assert run(["run", "--suite", "collapse", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "collapse.report.json").read_text())
    assert rep["grid_points"] == 512


def test_scenario_file_parallel(tmp_path):
    scen = {"schema_version": 1, "scenarios": [
        {"id": "z_collapse", "check": "collapse", "params": {"eps": 0.1}, "outputs": {"series": ["volume"]}},
        {"id": "a_cusp", "check": "cusp_identities", "params": {"t0": 1.0}},
    ]}
    path = tmp_path / "scen.json"
    path.write_text(json.dumps(scen))
    assert run(["run", "--scenario", str(path), "--jobs", "2", "--out", str(tmp_path / "out")]) == 0
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == ["a_cusp.report.json", "z_collapse.report.json", "z_collapse.volume.csv"]


@pytest.mark.parametrize("doc", [
    {"scenarios": []},
    {"schema_version": 1, "scenarios": [{"id": "x"}]},
    {"schema_version": 1, "scenarios": [{"check": "collapse"}, {"check": "collapse"}]},
])
def test_bad_scenario_files(doc, tmp_path):
    path = tmp_path / "scen.json"
    path.write_text(json.dumps(doc))
    assert run(["run", "--scenario", str(path), "--out", str(tmp_path)]) == 2


# --- plots ----------------------------------------------------------------------------------

def test_dehn_s_series(tmp_path):
    assert run(["emit-plots", "--suite", "dehn_fill", "--series", "s", "--out", str(tmp_path)]) == 0
    header, data = read_csv(tmp_path / "dehn_fill.s.csv")
    assert header == ["r [length]", "s [length^-2]"]
    assert data[0, 1] == pytest.approx(-5.0, abs=1e-9)
    assert data[-1, 0] == pytest.approx(np.pi / 2) and data[-1, 1] == pytest.approx(-6.0, abs=1e-9)


def test_case_i_a_difference_positive(tmp_path):
    assert run(["emit-plots", "--suite", "sphere_case_i", "--series", "a_difference", "--out", str(tmp_path)]) == 0
    _, data = read_csv(tmp_path / "sphere_case_i.a_difference.csv")
    assert np.all(data[:, 1] > 0)


def test_plots_from_report(tmp_path):
    assert run(["run", "--suite", "cusp_identities", "--out", str(tmp_path)]) == 0
    report = tmp_path / "cusp_identities.report.json"
    assert run(["emit-plots", "--report", str(report), "--series", "s", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "cusp_identities.s.csv").exists()


def test_empty_selection_writes_nothing(tmp_path):
    assert run(["emit-plots", "--suite", "dehn_fill", "--out", str(tmp_path)]) == 0
    assert not any(tmp_path.iterdir())


def test_unknown_series(tmp_path):
    assert run(["emit-plots", "--suite", "dehn_fill", "--series", "nope", "--out", str(tmp_path)]) == 2


# --- assertion plumbing ------------------------------------------------------------------------

def test_ctx_relations():
    ctx = Ctx("collapse", tolerance_scale=2.0)
    ctx.le("volume_ratio", 1.0, ctx.tol(1.0))
    ctx.lt("volume_scaling", 1.0, 1.0)
    ctx.ge("curvature_zero", np.nan, 0.0)
    assert [a.passed for a in ctx.results] == [True, False, False]
    assert ctx.results[0].bound == 2.0
