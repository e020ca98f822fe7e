import csv
import json

import numpy as np
import pytest

from hubsim import netgraph
from hubsim.cli import main


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def graph_file(tmp_path):
    path = tmp_path / "g.json"
    netgraph.save_graph(netgraph.dg8(), str(path))
    return str(path)


def test_gen_then_validate_roundtrip(tmp_path):
    out = tmp_path / "gen.json"
    assert run_cli("gen", "--n", "8", "--m", "2", "--s", "4", "--h", "2",
                   "--seed", "7", "-o", str(out)) == 0
    report = tmp_path / "report.json"
    assert run_cli("validate", str(out), "-o", str(report)) == 0
    doc = json.loads(report.read_text())
    assert doc["passed"] is True


def test_gen_infeasible_exits_2(tmp_path):
    rc = run_cli("gen", "--n", "16", "--m", "8", "--s", "4", "--h", "2",
                 "--seed", "0", "-o", str(tmp_path / "x.json"))
    assert rc == 2


def test_validate_failure_exits_1(tmp_path):
    doc = netgraph.to_json_dict(netgraph.dg8())
    doc["params"]["s"] = 1  # regular degree cap now violated
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run_cli("validate", str(path)) == 1


def test_split_output(graph_file, tmp_path, capsys):
    assert run_cli("split", graph_file) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["a_minus"] == [[6, 0]]
    assert doc["a_h"] == [[6, 7]]
    assert doc["a_r"] == [[1, 2]]
    assert doc["identity_holds"] is True


def test_spectrum_output(graph_file, capsys):
    assert run_cli("spectrum", graph_file) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda_plus"] == pytest.approx(np.sqrt(12))
    assert doc["zero_eigenvalue_count"] == 6


def test_spectrum_hub_free_exits_2(tmp_path):
    path = tmp_path / "g0.json"
    netgraph.save_graph(netgraph.generate(8, 0, 2, 1, 0), str(path))
    assert run_cli("spectrum", str(path)) == 2


def test_verify_be_passes(graph_file, tmp_path):
    out = tmp_path / "verify.json"
    assert run_cli("verify-be", graph_file, "--t", "0.9", "--eps", "1e-5",
                   "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["failures"] == []
    assert set(doc["encodings"]) == {"a_hub", "a_reg", "a_minus", "h2",
                                     "exp_g"}
    assert doc["encodings"]["a_hub"]["error"] <= 1e-10


def test_simulate_t0_state_passthrough(graph_file, tmp_path):
    state_out = tmp_path / "state.json"
    assert run_cli("simulate", graph_file, "--t", "0", "--method", "circuit",
                   "--psi0", "basis:3", "--state-out", str(state_out),
                   "-o", str(tmp_path / "rep.json")) == 0
    doc = json.loads(state_out.read_text())
    amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
    expected = np.zeros(8, dtype=complex)
    expected[3] = 1.0
    assert np.array_equal(amps, expected)


def test_simulate_check_small_error(graph_file, tmp_path):
    out = tmp_path / "rep.json"
    assert run_cli("simulate", graph_file, "--t", "1", "--eps", "1e-3",
                   "--method", "classical-ff", "--check", "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["final_error_vs_reference"] <= 1e-3
    assert doc["segments"] == 16


def test_simulate_dense_method(graph_file, tmp_path):
    out = tmp_path / "rep.json"
    assert run_cli("simulate", graph_file, "--t", "0.8", "--method", "dense",
                   "--check", "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["final_error_vs_reference"] <= 1e-12


def test_simulate_reports_byte_identical(graph_file, tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for out in (out1, out2):
        assert run_cli("simulate", graph_file, "--t", "0.5", "--eps", "1e-2",
                       "--method", "classical-ff", "--check",
                       "-o", str(out)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_psi0_file(graph_file, tmp_path):
    psi = np.full(8, 1.0 / np.sqrt(8.0))
    state = {"n": 8, "amplitudes": [[float(x), 0.0] for x in psi]}
    psi_path = tmp_path / "psi.json"
    psi_path.write_text(json.dumps(state))
    assert run_cli("simulate", graph_file, "--t", "0.25", "--eps", "1e-2",
                   "--method", "classical-ff", "--check",
                   "--psi0", f"file:{psi_path}",
                   "-o", str(tmp_path / "rep.json")) == 0


def test_simulate_bad_psi0_exits_2(graph_file, tmp_path):
    assert run_cli("simulate", graph_file, "--t", "1",
                   "--psi0", "basis:99", "-o", str(tmp_path / "r.json")) == 2
    assert run_cli("simulate", graph_file, "--t", "1",
                   "--psi0", "wat", "-o", str(tmp_path / "r.json")) == 2
    bad = tmp_path / "bad_state.json"
    bad.write_text(json.dumps({"n": 8}))
    assert run_cli("simulate", graph_file, "--t", "1",
                   "--psi0", f"file:{bad}", "-o", str(tmp_path / "r.json")) == 2


def test_unknown_flag_exits_2(graph_file):
    with pytest.raises(SystemExit) as exc:
        run_cli("simulate", graph_file, "--badflag")
    assert exc.value.code == 2


def test_resource_cap_exits_3(graph_file, monkeypatch, tmp_path):
    monkeypatch.setenv("HUBSIM_QUBIT_CAP", "6")
    rc = run_cli("simulate", graph_file, "--t", "0.5", "--eps", "1e-2",
                 "--method", "circuit", "-o", str(tmp_path / "r.json"))
    assert rc == 3


def test_bench_deterministic_counts(graph_file, tmp_path):
    csv1, csv2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
    for path in (csv1, csv2):
        assert run_cli("bench", graph_file, "--suite", "t",
                       "--values", "1,2", "--eps", "1e-2",
                       "-o", str(path)) == 0

    def stable_rows(path):
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        return [{k: v for k, v in row.items() if k != "wall_ms"}
                for row in rows]

    rows = stable_rows(csv1)
    assert rows == stable_rows(csv2)
    stage = {float(r["t"]): int(r["query_count"])
             for r in rows if r["oracle"] == "expG_stage"}
    assert stage[2.0] == 2 * stage[1.0]


def test_bench_n_suite(tmp_path):
    out = tmp_path / "bn.csv"
    assert run_cli("bench", "--suite", "n", "--values", "8,16",
                   "--t", "0.5", "--eps", "1e-2", "-o", str(out)) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["N"] for r in rows} == {"8", "16"}


def test_missing_file_exits_2(tmp_path):
    assert run_cli("validate", str(tmp_path / "nope.json")) == 2
