import os
import pathlib

import numpy as np
import pytest

import qmcgs


def test_dft_is_unitary():
    f = qmcgs.dft_matrix(8)
    assert f.shape == (8, 8)
    assert np.allclose(f @ f.conj().T, np.eye(8))
    assert np.isclose(f[1, 1], np.exp(-2j * np.pi / 8) / np.sqrt(8))


def test_gate_sets():
    assert "qft3" in qmcgs.gate_set_names()
    assert len(qmcgs.gate_set("bench8")) == 8
    with pytest.raises(ValueError):
        qmcgs.gate_set("nope")


def test_circuit_unitary_matches_numpy():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    u = qmcgs.circuit_unitary("qubits 2\nH(0)\nCNOT(0,1)\n")
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.allclose(u, cnot @ np.kron(h, np.eye(2)))


def test_synth_small_budget_is_deterministic():
    a = qmcgs.synth(seed=1, budget=300)
    b = qmcgs.synth(seed=1, budget=300)
    assert a == b
    assert a["samples_used"] <= 300


def test_synth_easy_target(tmp_path):
    target = tmp_path / "t.txt"
    target.write_text("qubits 3\nH(0)\nSWAP(0,2)\n")
    r = qmcgs.synth(target=str(target), budget=5000)
    assert r["success"]
    u = qmcgs.circuit_unitary(r["circuit_text"])
    assert qmcgs.frobenius_distance(u, qmcgs.circuit_unitary(target.read_text())) < 1e-6


def test_config_errors():
    with pytest.raises(ValueError):
        qmcgs.synth(no_such_key=1)
    with pytest.raises(ValueError):
        qmcgs.synth(method="magic")


def test_bench_csv_has_schema_line():
    out = qmcgs.bench(lengths="1-2", repeats=1, methods="mcgs,random", budget=2000)
    lines = out["csv"].splitlines()
    assert lines[0].startswith("#schema=")
    assert len(lines) == 2 + 2 * 2


def test_cellular_automata():
    assert qmcgs.wolfram_code(30) == [0, 0, 0, 1, 1, 1, 1, 0]
    rows = qmcgs.ca_evolution(90, 31, 15)
    assert rows.shape == (16, 31)
    assert rows[0].sum() == 1
    csv = qmcgs.ca_sweep(rules="0,255")
    assert csv.splitlines()[2].startswith("0,00000000,1")


def test_qml_metadata():
    data = pathlib.Path(os.environ.get("QMCGS_DATA_DIR", "data")) / "iris.csv"
    if not data.exists():
        pytest.skip("iris.csv not fetched")
    r = qmcgs.qml(str(data), "iris", budget=50)
    assert r["metadata"]["bdim"] == 12
    assert r["metadata"]["qubits"] == 4
    assert 0.0 <= r["test_accuracy"] <= 1.0
