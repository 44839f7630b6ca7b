import json

import numpy as np
import pytest

from swapsteer import cli, states as st, witnesses as wt
from swapsteer.criteria import npt_entanglement_witness


@pytest.fixture
def phi2_path(tmp_path):
    path = tmp_path / "phi2.json"
    st.save_state(st.max_entangled(2).to_density(), path)
    return str(path)


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_phi2(capsys, phi2_path):
    code, out, _ = _run(capsys, ["check", phi2_path])
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["ppt"]["is_npt"] is True
    assert abs(rep["results"]["ccn"]["coefficient_sum"] - 2.0) < 1e-9


def test_check_maximally_mixed(capsys, tmp_path):
    path = tmp_path / "mixed.json"
    st.save_state(st.DensityMatrix(np.eye(4) / 4, (2, 2)), path)
    code, out, _ = _run(capsys, ["check", str(path)])
    rep = json.loads(out)
    assert code == 0
    assert rep["results"]["ppt"]["is_npt"] is False
    assert abs(rep["results"]["ccn"]["coefficient_sum"] - 0.5) < 1e-9


def test_check_malformed_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = _run(capsys, ["check", str(path)])
    assert code == 2
    assert "parse" in err


def test_witness_npt(capsys, tmp_path, phi2_path):
    spec_path = tmp_path / "spec.json"
    code, out, _ = _run(capsys, ["witness", "npt", "--state", phi2_path, "--out", str(spec_path)])
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["sohs_bound"] == 0.0
    assert abs(rep["results"]["predicted_ideal_value"] - 0.125) < 1e-9
    spec = wt.load_spec(spec_path)
    assert spec.family == "npt"


def test_witness_ccn_d3(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    code, out, _ = _run(capsys, ["witness", "ccn", "--d", "3", "--out", str(spec_path)])
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["results"]["sohs_bound"] - 1 / 3) < 1e-12
    assert abs(rep["results"]["predicted_ideal_value"] - 1.0) < 1e-9


def test_witness_npt_on_separable_exits_3(capsys, tmp_path):
    path = tmp_path / "sep.json"
    st.save_state(st.random_separable((2, 2), seed=90), path)
    code, _, err = _run(capsys, ["witness", "npt", "--state", str(path)])
    assert code == 3
    assert "PPT" in err


def test_witness_universal(capsys, tmp_path, phi2_path):
    w = npt_entanglement_witness(st.max_entangled(2).to_density())
    w_path = tmp_path / "w.json"
    w_path.write_text(json.dumps({"matrix": st.complex_to_pairs(w)}))
    spec_path = tmp_path / "spec.json"
    code, out, _ = _run(capsys, [
        "witness", "universal", "--w", str(w_path), "--d", "2",
        "--state", phi2_path, "--out", str(spec_path),
    ])
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["sohs_bound"] == 0.0
    assert abs(rep["results"]["predicted_ideal_value"] - 0.125) < 1e-9


def test_simulate_ideal_npt(capsys, tmp_path, phi2_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "npt", "--state", phi2_path, "--out", str(spec_path)])
    code, out, _ = _run(capsys, [
        "simulate", "--spec", str(spec_path), "--rho1", phi2_path, "--ideal",
    ])
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["results"]["value"] - 0.125) < 1e-9
    assert rep["results"]["violation"] is True


def test_simulate_ccn_d4(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "4", "--out", str(spec_path)])
    phi4 = tmp_path / "phi4.json"
    st.save_state(st.max_entangled(4).to_density(), phi4)
    code, out, _ = _run(capsys, [
        "simulate", "--spec", str(spec_path), "--rho1", str(phi4), "--ideal",
    ])
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["results"]["value"] - 1.0) < 1e-9
    assert abs(rep["results"]["sohs_bound"] - 0.25) < 1e-12


def test_simulate_mixed_source_no_violation(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "2", "--out", str(spec_path)])
    mixed = tmp_path / "mixed.json"
    st.save_state(st.DensityMatrix(np.eye(4) / 4, (2, 2)), mixed)
    code, out, _ = _run(capsys, [
        "simulate", "--spec", str(spec_path), "--rho1", str(mixed), "--ideal",
    ])
    rep = json.loads(out)
    assert code == 0
    assert rep["results"]["violation"] is False


def test_simulate_dimension_mismatch_exits_4(capsys, tmp_path, phi2_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "3", "--out", str(spec_path)])
    code, _, err = _run(capsys, ["simulate", "--spec", str(spec_path), "--rho1", phi2_path])
    assert code == 4
    assert "dims" in err


def test_bound_seesaw_and_grid(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "2", "--out", str(spec_path)])
    code, out, _ = _run(capsys, [
        "bound", "--spec", str(spec_path), "--method", "seesaw", "--restarts", "4", "--seed", "1",
    ])
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["results"]["value"] - 0.5) < 1e-6
    assert rep["results"]["exceeds_analytic"] is False
    code, out, _ = _run(capsys, [
        "bound", "--spec", str(spec_path), "--method", "grid", "--resolution", "24",
    ])
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["results"]["value"] - 0.5) < 2e-3


def test_bound_grid_guard_exits_5(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "5", "--out", str(spec_path)])
    code, _, err = _run(capsys, ["bound", "--spec", str(spec_path), "--method", "grid"])
    assert code == 5
    assert "grid" in err


def test_gap_scan_csv(capsys, tmp_path):
    out_path = tmp_path / "gap.csv"
    code, out, _ = _run(capsys, ["gap-scan", "--dmax", "4", "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "d,quantum_value,sohs_bound,ratio"
    row2 = lines[1].split(",")
    assert int(row2[0]) == 2
    assert abs(float(row2[1]) - 1.0) < 1e-9
    assert abs(float(row2[2]) - 0.5) < 1e-12
    assert abs(float(row2[3]) - 2.0) < 1e-9
    ratios = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_gap_scan_dmax_guard(capsys):
    code, _, err = _run(capsys, ["gap-scan", "--dmax", "9"])
    assert code == 3
    assert "capped" in err


def test_robustness_critical_visibility(capsys):
    code, out, _ = _run(capsys, ["robustness", "--d", "2", "--steps", "5", "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    assert abs(rep["results"]["critical_visibility"] - 1.0 / 3.0) < 1e-6


def test_seed_reproducibility(capsys, tmp_path):
    spec_path = tmp_path / "spec.json"
    _run(capsys, ["witness", "ccn", "--d", "2", "--out", str(spec_path)])
    reports = []
    for _ in range(2):
        _, out, _ = _run(capsys, [
            "bound", "--spec", str(spec_path), "--restarts", "2", "--seed", "7",
        ])
        rep = json.loads(out)
        del rep["timings"]
        reports.append(rep)
    assert reports[0] == reports[1]
    assert reports[0]["seed"] == 7
    assert reports[0]["version"]
