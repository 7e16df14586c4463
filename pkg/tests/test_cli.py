import json

import pytest

from eoakit.cli import main
from eoakit.fileio import write_state
from eoakit.states import catalog


@pytest.fixture
def state_dir(tmp_path):
    for name, s in catalog().items():
        write_state(tmp_path / f"{name}.json", s)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_measure_values(capsys, state_dir):
    code, out, _ = run(capsys, "measure", "--state", str(state_dir / "bell.json"), "--cut", "A:B")
    assert code == 0 and float(out) == pytest.approx(1.0, abs=1e-12)
    code, out, _ = run(capsys, "measure", "--state", str(state_dir / "maxent_8x4.json"))
    assert code == 0 and out.strip() == "2"
    code, out, _ = run(capsys, "measure", "--state", str(state_dir / "phi.json"), "--cut", "AB:C")
    assert code == 0 and 0 < float(out) < 1


def test_measure_errors(capsys, state_dir):
    code, _, err = run(capsys, "measure", "--state", str(state_dir / "phi.json"), "--cut", "A:B")
    assert code == 1 and "purity" in err
    assert run(capsys, "measure", "--state", str(state_dir / "missing.json"))[0] == 2
    assert run(capsys, "measure", "--state", "catalog:nope")[0] == 2
    assert run(capsys, "measure", "--state", "catalog:phi", "--cut", "A:Q")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--state", "catalog:phi", "--protocol", "phi")
    assert code == 0 and out.strip().splitlines()[-1] == "average 2"
    code, out, _ = run(capsys, "simulate", "--state", "catalog:mixed", "--protocol", "mixed")
    assert code == 0 and out.strip().endswith("average 1")


def test_eoa(capsys):
    code, out, _ = run(capsys, "eoa", "--state", "catalog:mixed_2qubit_purified", "--restarts", "2", "--max-ensemble", "4")
    assert code == 0 and "value         1" in out


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--grid", "64", "--refine", "50")
    assert code == 0 and "min deficit" in out
    code, out, _ = run(capsys, "scan", "--ncopy", "2", "--samples", "200")
    assert code == 0


def test_reproduce_deterministic(capsys, tmp_path):
    args = ["--restarts", "1", "--grid", "64", "--refine", "50", "--samples", "200", "--povm-elements", "100", "--quiet"]
    assert run(capsys, "reproduce", "--out", str(tmp_path / "a.json"), *args)[0] == 0
    assert run(capsys, "reproduce", "--out", str(tmp_path / "b.json"), *args)[0] == 0
    a, b = (json.loads((tmp_path / f).read_text()) for f in ("a.json", "b.json"))
    for doc in (a, b):
        for c in doc["claims"]:
            c.pop("runtime_s")
    assert a == b
    ids = [c["id"] for c in a["claims"]]
    assert len(ids) == len(set(ids))
    assert {c["criterion"] for c in a["claims"]} == set(range(1, 10))
    assert a["all_pass"] and all(c["pass"] for c in a["claims"])
