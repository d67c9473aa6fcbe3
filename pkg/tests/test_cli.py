import csv
import json
import shutil

import numpy as np
import pytest

from unitarylab import chm
from unitarylab.cli import default_data_dir, main
from unitarylab.numerics import load_matrix, save_matrix


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    report = json.loads(out.out) if code == 0 and out.out.strip() else None
    return code, report, out.err


@pytest.fixture
def fourier11(tmp_path):
    p = tmp_path / "f11.json"
    save_matrix(p, chm.fourier(11))
    return p


def test_golden_then_verify(capsys, tmp_path):
    a = tmp_path / "a.json"
    code, rep, _ = run(capsys, "ame", "golden", "--out", str(a))
    assert code == 0 and rep["results"]["nonzeros"] == 112
    code, rep, _ = run(capsys, "ame", "verify", str(a), "--d", "6")
    assert code == 0 and rep["results"]["two_unitary"] is True


def test_bell_circulant_six(capsys):
    code, rep, _ = run(capsys, "bell", "circulant", "--n", "6")
    assert code == 0
    assert rep["results"]["classical"] == 20
    assert rep["results"]["quantum"] == pytest.approx(24, abs=1e-10)


def test_cert_fourier_eleven(capsys, fourier11):
    code, rep, _ = run(capsys, "chm", "cert", str(fourier11))
    res = rep["results"]
    assert code == 0
    assert res["haagerup"] == 11 and res["butson"]["q"] == 11 and res["defect"] == 0


def test_report_provenance_and_out_flag(capsys, tmp_path, fourier11):
    target = tmp_path / "r.json"
    code, rep, _ = run(capsys, "--seed", "7", "--jobs", "1", "--tol", "1e-9", "--out", str(target),
                       "chm", "cert", str(fourier11))
    assert code == 0 and rep is None
    rep = json.loads(target.read_text())
    prov = rep["provenance"]
    assert prov["seed"] == 7 and prov["jobs"] == 1
    assert prov["tolerances"]["unitarity_tol"] == 1e-9
    assert prov["kernel_backend"] in ("cython", "python")
    assert rep["command"][-3:] == ["chm", "cert", str(fourier11)]


@pytest.mark.parametrize("args", [
    ("chm", "catalogue", "B8b"),
    ("bell", "circulant", "--n", "7"),
    ("defect", "etf", "--k", "3"),
    ("ame", "golden"),
])
def test_deterministic_commands_replay(capsys, args):
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *first["command"])
    assert code == 0 and second["results"] == first["results"]


def test_catalogue_save_roundtrip(capsys, tmp_path):
    p = tmp_path / "t9.json"
    code, _, _ = run(capsys, "chm", "catalogue", "T9", "--save", str(p))
    assert code == 0
    assert np.array_equal(load_matrix(p), chm.catalogue("T9"))


def test_gen_seeded_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "chm", "gen", "--n", "5", "--seed", "3", "--save", str(a))[0] == 0
    assert run(capsys, "chm", "gen", "--n", "5", "--seed", "3", "--save", str(b))[0] == 0
    assert np.array_equal(load_matrix(a), load_matrix(b))


def test_defect_commands(capsys):
    code, rep, _ = run(capsys, "defect", "mub", "--p", "3", "--m", "4")
    assert code == 0 and rep["results"]["delta"] == 0
    code, rep, _ = run(capsys, "defect", "sic3", "--gamma", "0.7")
    assert code == 0 and rep["results"]["delta"] == 2


# ----------------------------------------------------------- exit codes

def test_usage_errors_exit_two(capsys, tmp_path):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "bell", "circulant", "--n", "2")[0] == 2
    assert run(capsys, "ame", "run")[0] == 2
    assert run(capsys, "--tol", "bogus=1", "ame", "golden")[0] == 2


def test_capacity_exit_three(capsys, tmp_path):
    p = tmp_path / "big.json"
    save_matrix(p, np.ones((2, 25)))
    code, _, err = run(capsys, "bell", "lhv", str(p))
    assert code == 3 and json.loads(err)["error"] == "CapacityError"


def test_cert_reports_non_chm(capsys, tmp_path):
    p = tmp_path / "eye.json"
    save_matrix(p, np.eye(3))
    code, rep, _ = run(capsys, "chm", "cert", str(p))
    assert code == 0 and rep["results"]["is_chm"] is False


def test_contract_violation_exit_four(capsys, tmp_path):
    p = tmp_path / "nh.json"
    save_matrix(p, np.array([[1, 1j], [1j, 1]]))
    code, _, err = run(capsys, "defect", "delta", str(p))
    assert code == 4 and "error" in json.loads(err)


def test_nonconvergence_exit_five(capsys, tmp_path):
    code, _, err = run(capsys, "ame", "run", "--d", "3", "--max-iters", "1")
    assert code == 5 and json.loads(err)["error"] == "NonConvergence"


# ------------------------------------------------------------------ CSV

def test_run_trajectory_csv(capsys, tmp_path):
    traj = tmp_path / "t.csv"
    code, rep, _ = run(capsys, "--seed", "1", "ame", "run", "--d", "3", "--trajectory", str(traj))
    assert code == 0 and rep["results"]["outcome"] == "two_unitary"
    rows = list(csv.DictReader(traj.open()))
    assert len(rows) == rep["results"]["iterations"] + 1
    assert float(rows[-1]["e_p"]) == pytest.approx(1, abs=1e-9)


def test_sample_csv(capsys, tmp_path):
    p = tmp_path / "s.csv"
    code, _, _ = run(capsys, "ame", "sample", "--d", "2", "--n", "10", "--out", str(p))
    assert code == 0
    rows = list(csv.reader(p.open()))
    assert rows[0] == ["e_p", "g_t"] and len(rows) == 11


# ------------------------------------------------------------- datasets

def test_datasets_bundled(capsys):
    code, rep, _ = run(capsys, "datasets")
    assert code == 0
    entries = {e["name"]: e for e in rep["results"]["datasets"]}
    assert {"ks13_d3", "ks18_d4", "mub_d4"} <= set(entries)
    assert all(e["status"] == "ok" for e in entries.values())
    assert (entries["ks13_d3"]["d"], entries["ks13_d3"]["N"]) == (3, 13)
    assert (entries["ks18_d4"]["d"], entries["ks18_d4"]["N"]) == (4, 18)


def test_datasets_ks21_gated():
    if not (default_data_dir() / "ks21_d6.json").exists():
        pytest.skip("ks21_d6 asset not bundled")
    from unitarylab import defect
    P = defect.dataset_load(default_data_dir() / "ks21_d6.json")
    assert (P.d, P.N) == (6, 21)


def test_datasets_empty_and_missing(capsys, tmp_path):
    code, rep, _ = run(capsys, "--data-dir", str(tmp_path), "datasets")
    assert code == 0 and rep["results"]["datasets"] == []
    assert run(capsys, "--data-dir", str(tmp_path / "nope"), "datasets")[0] == 2


def test_datasets_corrupted_file(capsys, tmp_path):
    src = default_data_dir()
    for name in ("manifest.json", "ks13_d3.json"):
        shutil.copy(src / name, tmp_path / name)
    with open(tmp_path / "ks13_d3.json", "a") as fh:
        fh.write(" ")
    code, rep, _ = run(capsys, "--data-dir", str(tmp_path), "datasets")
    assert code == 0
    assert rep["results"]["datasets"][0]["status"] == "checksum_mismatch"
