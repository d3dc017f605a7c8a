import json
import math
import subprocess
import sys

import numpy as np
import pytest

import tisim as t
from tisim.cli import main as cli_main
from tisim.errors import UsageError
from tisim.network import AtomBox
from tisim.scenarios import (
    Check,
    RunReport,
    build_scenario,
    run_exact,
    run_mc,
    scenario_names,
    verification_checks,
)

RT2 = math.sqrt(2.0)


# -- scenario construction ---------------------------------------------------------


def test_registry_names():
    assert scenario_names() == ("ev-bomb", "hardy-ifm", "qle", "qle-two-laser", "qle-chsh")
    for name in scenario_names():
        scenario = build_scenario(name)
        assert t.validate(scenario.network) == []


def test_single_atom_scenario_structure():
    scenario = build_scenario("hardy-ifm")
    boxes = scenario.network.boxes()
    assert len(boxes) == 1
    assert boxes[0].path == "v" and boxes[0].blocking == "+"


def test_two_atom_scenario_structure():
    scenario = build_scenario("qle")
    boxes = {b.id: b for b in scenario.network.boxes()}
    assert len(boxes) == 2
    assert boxes["A"].atom == "atom1" and boxes["A"].blocking == "+" and boxes["A"].path == "v"
    assert boxes["B"].atom == "atom2" and boxes["B"].blocking == "-" and boxes["B"].path == "u"


def test_unknown_scenario_and_bad_params():
    with pytest.raises(UsageError):
        build_scenario("nonsense")
    with pytest.raises(UsageError):
        build_scenario("ev-bomb", bomb="maybe")
    with pytest.raises(UsageError):
        build_scenario("qle", frobnicate=1)
    with pytest.raises(UsageError):
        build_scenario("qle", atom_basis="bloch:oops")


# -- exact runs ------------------------------------------------------------------------


def test_exact_unobstructed_interferometer_is_dark():
    report = run_exact(build_scenario("ev-bomb", bomb="absent"))
    assert report.photon_probabilities.get("D", 0.0) < 1e-12
    assert abs(report.photon_probabilities["C"] - 1.0) < 1e-12


def test_exact_obstructed_interferometer():
    report = run_exact(build_scenario("ev-bomb", bomb="present"))
    assert report.photon_probabilities == pytest.approx(
        {"C": 0.25, "D": 0.25, "bomb": 0.5}, abs=1e-12
    )


def test_exact_two_atom_distribution():
    report = run_exact(build_scenario("qle"))
    assert abs(report.photon_probabilities["D"] - 0.125) < 1e-12
    assert abs(report.photon_probabilities["C"] - 0.375) < 1e-12
    assert abs(report.absorbed_probability - 0.5) < 1e-12
    assert abs(sum(row["probability"] for row in report.outcomes) - 1.0) < 1e-12


def test_exact_reports_sum_to_one():
    for name in scenario_names():
        report = run_exact(build_scenario(name))
        assert abs(sum(row["probability"] for row in report.outcomes) - 1.0) < 1e-12


def test_exact_post_selected_run():
    report = run_exact(build_scenario("qle", post_select="D"))
    assert report.derived["post_selected_on"] == "D"
    assert abs(report.derived["selection_probability"] - 0.125) < 1e-12
    assert abs(report.derived["correlation"] - 1.0) < 1e-12  # perfect z agreement


def test_exact_y_basis_run():
    report = run_exact(build_scenario("qle", atom_basis="y", post_select="D"))
    probs = {row["outcome"]: row["probability"] for row in report.outcomes}
    assert probs == pytest.approx({"D|y+;y-": 0.5, "D|y-;y+": 0.5}, abs=1e-12)
    assert abs(report.derived["correlation"] - (-1.0)) < 1e-12  # perfect y anti-agreement


def test_exact_chsh_report():
    report = run_exact(build_scenario("qle-chsh"))
    assert abs(report.derived["chsh_s"] - 2.0 * RT2) < 1e-9
    assert abs(sum(row["probability"] for row in report.outcomes) - 1.0) < 1e-12


# -- Monte Carlo runs ----------------------------------------------------------------------


def test_mc_counts_and_worker_independence():
    scenario = build_scenario("qle")
    one = run_mc(scenario, trials=1_000_000, seed=7, workers=1)
    eight = run_mc(scenario, trials=1_000_000, seed=7, workers=8)
    assert one.payload_equal(eight)  # bit-for-bit, wall time aside
    assert sum(row["count"] for row in one.outcomes) == 1_000_000


def test_mc_requires_positive_trials():
    with pytest.raises(UsageError):
        run_mc(build_scenario("qle"), trials=0, seed=1)


def test_mc_convergence_over_seeded_repetitions():
    """At 1e5 trials, >= 99/100 seeds keep every photon outcome within 4 sigma."""
    scenario = build_scenario("qle")
    dist = t.enumerate_transactions(scenario.network, scenario.context)
    expected = dist.photon_marginal()
    trials = 100_000
    good = 0
    for seed in range(100):
        counts = t.sample_flat(dist, trials, seed)
        tally: dict[str, int] = {}
        for c, n in zip(dist.candidates, counts):
            tally[c.outcome.photon] = tally.get(c.outcome.photon, 0) + int(n)
        ok = all(
            abs(tally.get(photon, 0) / trials - p) < 4.0 * math.sqrt(p * (1 - p) / trials)
            for photon, p in expected.items()
        )
        good += ok
    assert good >= 99


def test_mc_chsh_report():
    report = run_mc(build_scenario("qle-chsh"), trials=200_000, seed=5)
    assert abs(report.derived["chsh_s"] - 2.0 * RT2) < 0.05
    assert sum(row["count"] for row in report.outcomes) == 200_000


# -- report serialization ----------------------------------------------------------------


def test_report_json_roundtrip_is_byte_identical():
    for report in (
        run_exact(build_scenario("qle")),
        run_mc(build_scenario("hardy-ifm"), trials=10_000, seed=3),
        run_exact(build_scenario("qle-chsh")),
    ):
        blob = report.to_json()
        again = RunReport.from_json(blob).to_json()
        assert again == blob


def test_report_csv_shape():
    report = run_mc(build_scenario("hardy-ifm"), trials=1_000, seed=2)
    lines = report.to_csv().strip().splitlines()
    assert lines[0] == "outcome,count,probability"
    assert len(lines) == len(report.outcomes) + 1
    outcome, count, probability = lines[1].split(",")
    assert int(count) >= 0 and 0.0 <= float(probability) <= 1.0


# -- verification checklist -----------------------------------------------------------------


def test_verification_checklist_passes():
    checks = verification_checks()
    assert len(checks) >= 10
    failed = [c.name for c in checks if not c.passed]
    assert failed == []


# -- command-line interface -------------------------------------------------------------------


def run_cli(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "tisim", *argv], capture_output=True, text=True
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_cli_list():
    code, out, _ = run_cli("list")
    assert code == 0
    for name in scenario_names():
        assert name in out


def test_cli_run_exact_json():
    code, out, _ = run_cli("run", "qle", "--exact")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert abs(data["photon_probabilities"]["D"] - 0.125) < 1e-12


def test_cli_run_mc_csv():
    code, out, _ = run_cli("run", "qle", "--trials", "2000", "--seed", "11", "--out", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "outcome,count,probability"
    total = sum(int(line.split(",")[1]) for line in lines[1:])
    assert total == 2000


def test_cli_run_with_basis_and_post_selection():
    code, out, _ = run_cli(
        "run", "qle", "--exact", "--atom-basis", "y", "--post-select", "d"
    )
    assert code == 0
    data = json.loads(out)
    probs = {row["outcome"]: row["probability"] for row in data["outcomes"]}
    assert probs == pytest.approx({"D|y+;y-": 0.5, "D|y-;y+": 0.5}, abs=1e-12)


def test_cli_run_with_bloch_basis_matches_y():
    # theta=90, phi=90 is the y direction
    code, out, _ = run_cli(
        "run", "qle", "--exact", "--atom-basis", "bloch:90,90", "--post-select", "d"
    )
    assert code == 0
    data = json.loads(out)
    probs = {row["outcome"]: row["probability"] for row in data["outcomes"]}
    assert probs == pytest.approx({"D|n+;n-": 0.5, "D|n-;n+": 0.5}, abs=1e-12)


def test_cli_run_chsh_scenario():
    code, out, _ = run_cli("run", "qle-chsh", "--exact")
    assert code == 0
    data = json.loads(out)
    assert abs(data["derived"]["chsh_s"] - 2.0 * RT2) < 1e-9


def test_cli_run_with_network_file(tmp_path):
    path = tmp_path / "net.json"
    t.save_network(t.qle_network(), path)
    code, out, _ = run_cli("run", "qle", "--exact", "--network", str(path))
    assert code == 0
    assert abs(json.loads(out)["photon_probabilities"]["D"] - 0.125) < 1e-12


def test_cli_usage_errors_exit_two():
    code, _, err = run_cli("run", "not-a-scenario", "--exact")
    assert code == 2
    assert "unknown scenario" in err
    code, _, _ = run_cli("run")  # missing positional
    assert code == 2
    code, _, err = run_cli("run", "qle", "--trials", "0")
    assert code == 2


def test_cli_path_evaluation():
    code, out, _ = run_cli("path", "|L-_S1_-A-_S2_-D> + |L-S1-B-S2-D>")
    assert code == 0
    assert "exact cancellation" in out


def test_cli_path_syntax_error_exits_two():
    code, _, err = run_cli("path", "|L-")
    assert code == 2
    assert "position" in err


def test_cli_verify_passes():
    code, out, _ = run_cli("verify")
    assert code == 0
    assert "checks passed" in out
    assert "FAIL" not in out


def test_cli_verify_exit_three_on_failure(monkeypatch, capsys):
    import tisim.cli as cli

    monkeypatch.setattr(
        cli, "verification_checks", lambda: [Check("stub", False, "0", "1")]
    )
    code = cli_main(["verify"])
    assert code == 3
    assert "FAIL stub" in capsys.readouterr().out
