import json
from pathlib import Path

import numpy as np
import pytest

import csm_sim as cs
from csm_sim.runner import format_csv, resolve_workers, sweep_table

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def balanced_scenario():
    return cs.parse_scenario(SCENARIO_DIR / "balanced_qubit.json")


def test_build_objects_use_scenario_names(balanced_scenario):
    contexts, protocol, pointer, gram = cs.build_scenario_objects(balanced_scenario)
    assert set(contexts) == {"z", "x"}
    assert [ctx.id for ctx in protocol.contexts] == ["z", "x"]
    assert protocol.initial.index == 0
    assert pointer.id == "x"
    np.testing.assert_allclose(gram, cs.gram_uniform(2, 0.5))


def test_report_structure_and_values(balanced_scenario):
    report = cs.run_scenario(balanced_scenario, seed=7, n_samples=500)
    assert report["tool"] == "csm-sim"
    assert report["seed"] == 7
    assert report["scenario"] == balanced_scenario.raw
    results = report["results"]
    step = results["returns"][0]
    np.testing.assert_allclose(step["reversible"], [1.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(step["irreversible"], [0.5, 0.5], atol=1e-12)
    meter = results["meter"]
    np.testing.assert_allclose(meter["return_probabilities"], [0.75, 0.25], atol=1e-12)
    assert meter["max_coherence"] == pytest.approx(0.25, abs=1e-12)
    assert meter["entropy"] == pytest.approx(0.5623351446188083, abs=1e-12)
    ensemble = results["ensemble"]
    assert ensemble["mode"] == "monte_carlo"
    assert ensemble["sample_count"] == 500
    assert ensemble["shannon_entropy_final"] == pytest.approx(np.log(2), abs=1e-12)


def test_report_probabilities_in_range(balanced_scenario):
    report = cs.run_scenario(balanced_scenario, seed=3, n_samples=200)
    results = report["results"]
    gathered = list(results["meter"]["return_probabilities"])
    gathered += results["ensemble"]["final_distribution"]
    for entry in results["returns"]:
        gathered += entry["reversible"] + entry["irreversible"]
    for row in results["sweep"]["g"]:
        gathered += row["return_probabilities"]
    assert all(0.0 <= p <= 1.0 for p in gathered)
    assert sum(results["ensemble"]["final_distribution"]) == pytest.approx(1.0, abs=1e-10)


def test_sweep_sections_are_grid_complete(balanced_scenario):
    report = cs.run_scenario(balanced_scenario, seed=1, n_samples=100)
    sweep = report["results"]["sweep"]
    assert [row["g"] for row in sweep["g"]] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert [row["m_count"] for row in sweep["m_count"]] == [0, 1, 2, 4, 8, 16]
    assert len(sweep["phase"]) == 5
    # balanced-case oracles: return (1+g)/2, chain coherence (1/2)g^m, fringe cos^2(phi/2)
    for row in sweep["g"]:
        assert row["return_probabilities"][0] == pytest.approx((1 + row["g"]) / 2, abs=1e-12)
    for row in sweep["m_count"]:
        assert row["max_coherence"] == pytest.approx(0.5 * 0.5 ** row["m_count"], abs=1e-12)
    for row in sweep["phase"]:
        assert row["return_probabilities"][0] == pytest.approx(
            np.cos(row["phase"] / 2) ** 2, abs=1e-12
        )


def test_exhaustive_mode(balanced_scenario):
    report = cs.run_scenario(balanced_scenario, seed=1, n_samples=0, exhaustive=True)
    ensemble = report["results"]["ensemble"]
    assert ensemble["mode"] == "exhaustive"
    assert ensemble["sample_count"] == 2
    assert ensemble["std_error"] == 0.0
    assert ensemble["mean_entropy_production"] == pytest.approx(np.log(2), abs=1e-12)


def test_reports_byte_identical_across_runs_and_workers(balanced_scenario, monkeypatch):
    first = cs.report_to_json(cs.run_scenario(balanced_scenario, seed=11, n_samples=400))
    second = cs.report_to_json(cs.run_scenario(balanced_scenario, seed=11, n_samples=400))
    assert first == second
    monkeypatch.setenv("CSM_SIM_THREADS", "4")
    threaded = cs.report_to_json(cs.run_scenario(balanced_scenario, seed=11, n_samples=400))
    assert threaded == first
    monkeypatch.setenv("CSM_SIM_THREADS", "1")
    serial = cs.report_to_json(cs.run_scenario(balanced_scenario, seed=11, n_samples=400))
    assert serial == first


def test_resolve_workers_env(monkeypatch):
    monkeypatch.delenv("CSM_SIM_THREADS", raising=False)
    assert resolve_workers() == 1
    monkeypatch.setenv("CSM_SIM_THREADS", "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2  # explicit argument wins
    monkeypatch.setenv("CSM_SIM_THREADS", "0")
    with pytest.raises(ValueError):
        resolve_workers()


def test_verify_clean_scenario_passes(balanced_scenario):
    ok, checks = cs.verify_scenario(balanced_scenario, 1e-10)
    assert ok
    assert all(c["pass"] for c in checks)
    names = {c["name"] for c in checks}
    assert "meter.return_two_form_agreement" in names
    assert "step[0].reversible_identity" in names


def test_verify_reports_non_orthonormal_residual(tmp_path):
    doc = {
        "schema_version": 1,
        "dim": 2,
        "contexts": {"bad": {"kind": "explicit", "matrix": [[1, 0.1], [0, 1]]}},
        "protocol": {"initial": {"context": "bad", "index": 0}, "sequence": ["bad"]},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    ok, checks = cs.verify_scenario(cs.parse_scenario(path), 1e-10)
    assert not ok
    failing = [c for c in checks if not c["pass"]]
    assert failing[0]["name"] == "context[bad].orthonormal"
    assert failing[0]["residual"] > 0.09


def test_verify_at_machine_epsilon_tolerance(tmp_path):
    # residuals sit at the rounding floor, so an impossible tolerance must fail
    doc = {
        "schema_version": 1,
        "dim": 8,
        "contexts": {"a": {"kind": "haar", "seed": 1}, "b": {"kind": "haar", "seed": 2}},
        "protocol": {"initial": {"context": "a", "index": 0}, "sequence": ["a", "b"]},
    }
    path = tmp_path / "haar.json"
    path.write_text(json.dumps(doc))
    scenario = cs.parse_scenario(path)
    ok_loose, _ = cs.verify_scenario(scenario, 1e-10)
    assert ok_loose
    ok_tight, checks = cs.verify_scenario(scenario, 1e-16)
    assert not ok_tight
    worst = max(c["residual"] for c in checks)
    assert 1e-16 < worst < 1e-12


def test_verify_report_shape(balanced_scenario):
    report = cs.verify_report(balanced_scenario, 1e-10)
    assert report["pass"] is True
    assert {"name", "residual", "pass"} <= set(report["checks"][0])


def test_sweep_rows_and_csv_format(balanced_scenario):
    rows = cs.sweep_rows(balanced_scenario, "g", [0.0, 0.5, 1.0])
    header, table = sweep_table("g", rows, 2)
    assert header == ["g", "entropy", "p_return_0", "p_return_1"]
    text = format_csv(header, table)
    lines = text.strip().split("\n")
    assert lines[0] == "g,entropy,p_return_0,p_return_1"
    assert len(lines) == 4
    # %.17g round-trips doubles exactly
    assert float(lines[2].split(",")[1]) == rows[1]["entropy"]
