import io
import json

import pandas as pd
import pytest

from vcoop.cli import main
from vcoop.scenario import REFERENCE_SCENARIO


WRONG_EXIT_CODE = "Unexpected exit code!"
NOT_DETERMINISTIC = "Identical invocations must print identical bytes!"


@pytest.fixture
def scenario_file(tmp_path):
    def _write(**changes):
        raw = {**REFERENCE_SCENARIO, **changes}
        for key in [k for k, v in changes.items() if v is None]:
            raw.pop(key)
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(raw))
        return str(path)

    return _write


def _csv(text):
    return pd.read_csv(io.StringIO(text), comment="#")


def test_validate_transitional(scenario_file, capsys):
    assert main(["validate", scenario_file(wI_mbps=2.0)]) == 0, WRONG_EXIT_CODE
    report = json.loads(capsys.readouterr().out)
    assert report["regime"] == "transitional"
    assert report["w_lo"] == pytest.approx(1.5625e6)
    assert report["w_hi"] == pytest.approx(3.125e6)
    assert report["scenario"]["wI_mbps"] == pytest.approx(2.0)
    assert report["rho_min"] > 0


@pytest.mark.parametrize("changes", [{"wV_mbps": None}, {"d_km": 0.9}])
def test_validate_rejects_invalid_scenarios(scenario_file, changes):
    assert main(["validate", scenario_file(**changes)]) == 1, WRONG_EXIT_CODE


def test_validate_missing_file(tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == 1, WRONG_EXIT_CODE


def test_usage_errors_exit_with_one():
    assert main([]) == 1, WRONG_EXIT_CODE
    assert main(["lp-check", "--trials", "0"]) == 1, WRONG_EXIT_CODE
    assert main(["frobnicate"]) == 1, WRONG_EXIT_CODE


def test_analytic_single_scenario(scenario_file, capsys):
    assert main(["analytic", scenario_file(wI_mbps=1.0)]) == 0
    table = _csv(capsys.readouterr().out)
    assert len(table) == 1
    assert table["eta_analytic"][0] == pytest.approx(1.5333e6, rel=1e-4)
    assert pd.isna(table["eta_lower"][0])


def test_analytic_transitional_emits_both_bounds(scenario_file, capsys):
    assert main(["analytic", scenario_file(wI_mbps=2.0)]) == 0
    table = _csv(capsys.readouterr().out)
    assert pd.isna(table["eta_analytic"][0])
    assert table["eta_lower"][0] == pytest.approx(3.0279e6, rel=1e-3)
    assert table["eta_upper"][0] == pytest.approx(3.0666e6, rel=1e-3)


def test_analytic_without_helpers(scenario_file, capsys):
    assert main(["analytic", scenario_file(rho2_veh_per_m=0.0)]) == 0
    table = _csv(capsys.readouterr().out)
    assert table["eta_analytic"][0] == pytest.approx(2 * 500 * 1e6 / 10_000)


def test_analytic_sweep(scenario_file, tmp_path, capsys):
    out = tmp_path / "eta.csv"
    assert main(["analytic", scenario_file(), "--sweep", "d=2:10:4", "--out", str(out)]) == 0
    table = pd.read_csv(out)
    assert list(table["value"]) == [2.0, 6.0, 10.0]
    assert set(table["axis"]) == {"d"}
    assert table["eta_analytic"].is_monotonic_increasing
    assert main(["analytic", scenario_file(), "--sweep", "speed=1:2:1"]) == 1, WRONG_EXIT_CODE
    assert main(["analytic", scenario_file(), "--sweep", "d=0.5:2:0.5"]) == 1, WRONG_EXIT_CODE


def test_simulate_is_deterministic(scenario_file, tmp_path, capsys):
    path = scenario_file()
    trace = tmp_path / "trace.csv"
    args = ["simulate", path, "--mode", "sampled", "--cycles", "60", "--seed", "7"]
    assert main(args + ["--trace", str(trace)]) == 0
    first = capsys.readouterr().out
    assert main(args + ["--workers", "2"]) == 0
    second = capsys.readouterr().out
    assert first == second, NOT_DETERMINISTIC
    out = tmp_path / "estimate.json"
    assert main(args + ["--out", str(out)]) == 0
    assert out.read_text() == first, NOT_DETERMINISTIC
    estimate = json.loads(first)
    assert estimate["n_cycles"] == 60 and estimate["master_seed"] == 7 and estimate["mode"] == "sampled"
    assert estimate["ci95"][0] <= estimate["mean"] <= estimate["ci95"][1]
    assert len(_csv(trace.read_text())) == 60


def test_simulate_event_with_models_file(scenario_file, tmp_path, capsys):
    models = tmp_path / "models.json"
    models.write_text(json.dumps({"mobility": {"name": "gaussian", "sigma1": 2.0, "sigma2": 2.0, "tau": 5.0}}))
    args = ["simulate", scenario_file(num_infra=6), "--mode", "event", "--models", str(models), "--cycles", "30"]
    assert main(args + ["--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["n_cycles"] == 30


def test_simulate_flag_errors(scenario_file):
    path = scenario_file()
    assert main(["simulate", path, "--cycles", "100"]) == 1, WRONG_EXIT_CODE
    assert main(["simulate", path, "--cycles", "10", "--seed", "1"]) == 1, WRONG_EXIT_CODE
    assert main(["simulate", path, "--mode", "warp", "--seed", "1"]) == 1, WRONG_EXIT_CODE


def test_lp_check(capsys):
    assert main(["lp-check", "--regime", "infra", "--trials", "50", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "infra" in out and "pass" in out
    assert main(["lp-check", "--regime", "transitional", "--trials", "50", "--n-max", "6"]) == 0


def test_figure(tmp_path):
    assert main(["figure", "--preset", "fig5", "--out", str(tmp_path), "--seed", "0"]) == 0
    path = tmp_path / "fig5.csv"
    assert path.read_text().startswith("# vcoop ")
    table = _csv(path.read_text())
    row = table[(table["series"] == "rho2=0.002") & (table["value"] == 3.0)]
    assert 10 <= row["ratio_noncoop"].iloc[0] <= 20


def test_figure_errors(tmp_path):
    assert main(["figure", "--preset", "fig99", "--out", str(tmp_path), "--seed", "0"]) == 1, WRONG_EXIT_CODE
    assert main(["figure", "--preset", "fig5", "--out", str(tmp_path)]) == 1, WRONG_EXIT_CODE


def test_sweep_file(tmp_path, capsys):
    spec = {
        "label": "distance",
        "base": REFERENCE_SCENARIO,
        "axis": "d",
        "values": [5.0, 10.0],
        "modes": ["analytic", "sampled"],
        "n_cycles": 40,
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(spec))
    assert main(["sweep", str(path), "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# vcoop ") and "seed=3" in out.splitlines()[0]
    assert len(_csv(out)) == 2
