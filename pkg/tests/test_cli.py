import json
from pathlib import Path

import numpy as np
import pytest

from kreinq import resolvent0
from kreinq.cli import main
from kreinq.config import load_config, parse_config
from kreinq.errors import ConfigParse
from kreinq.matrix_io import read_matrix

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def test_verify_alpha_zero(tmp_path):
    code, out = run(tmp_path, "verify", "--config", str(CONFIGS / "alpha_zero.toml"))
    doc = json.loads(out.read_text())
    assert code == 0 and doc["status"] == "pass"
    assert all(e["max_residual"] <= 1e-12 for e in doc["report"]["entries"])


def test_verify_seed7(tmp_path):
    code, out = run(tmp_path, "verify", "--config", str(CONFIGS / "seed7_alpha.toml"))
    doc = json.loads(out.read_text())
    assert code == 0
    assert len(doc["report"]["entries"]) >= 10


def test_verify_bad_family(tmp_path, capsys):
    code, out = run(tmp_path, "verify", "--config", str(CONFIGS / "bad_vw.toml"))
    doc = json.loads(out.read_text())
    assert code == 1
    assert doc["status"] == "error" and doc["error"]["type"] == "FamilyInvariantViolation"
    assert "FamilyInvariantViolation" in capsys.readouterr().err


def test_verify_singular_is_inconclusive(tmp_path):
    code, out = run(tmp_path, "verify", "--config", str(CONFIGS / "singular.toml"))
    doc = json.loads(out.read_text())
    assert code == 2 and doc["status"] == "inconclusive" and doc["error"]["type"] == "EmptyZQ"


def test_verify_failure_is_exit_1(tmp_path):
    # an absurdly strict tolerance turns clean residuals into failures
    code, out = run(tmp_path, "verify", "--config", str(CONFIGS / "pinned.toml"), "--tol", "identity=1e-30")
    doc = json.loads(out.read_text())
    assert code == 1 and doc["status"] == "fail"


def test_scan_alpha_zero_near_i(tmp_path):
    code, out = run(tmp_path, "scan", "--config", str(CONFIGS / "alpha_zero.toml"), "--grid", "-0.1,0.1,0.9,1.1,3,3")
    rows = out.read_text().splitlines()[1:]
    assert code == 0 and len(rows) == 9
    assert {r.rsplit(",", 1)[1] for r in rows} == {"InZQ"}


def test_scan_crossing_spectrum(tmp_path):
    code, out = run(tmp_path, "scan", "--config", str(CONFIGS / "pinned.toml"), "--grid", "0,2,0,0,5,1")
    labels = [r.rsplit(",", 1)[1] for r in out.read_text().splitlines()[1:]]
    assert labels == ["InZQ", "QSingular", "InSpectrumA0", "InZQ", "InSpectrumA0"]


def test_scan_needs_grid(tmp_path):
    code, _ = run(tmp_path, "scan", "--config", str(CONFIGS / "pinned.toml"))
    assert code == 1


def test_scan_empty_grid(tmp_path, capsys):
    code, _ = run(tmp_path, "scan", "--config", str(CONFIGS / "pinned.toml"), "--grid", "0,1,0,1,0,3")
    assert code == 1 and "EmptyGrid" in capsys.readouterr().err


def test_scan_and_verify_deterministic(tmp_path):
    files = []
    for k in range(2):
        _, a = run(tmp_path, "scan", "--config", str(CONFIGS / "seed7_alpha.toml"), name=f"scan{k}.csv")
        _, b = run(tmp_path, "verify", "--config", str(CONFIGS / "seed7_alpha.toml"), name=f"verify{k}.json")
        files.append((a.read_bytes(), b.read_bytes()))
    assert files[0] == files[1]
    assert len(files[0][0].splitlines()) == 41 * 41 + 1


def test_spectrum_alpha_zero_empty(tmp_path):
    code, out = run(tmp_path, "spectrum", "--config", str(CONFIGS / "alpha_zero.toml"))
    assert code == 0 and out.read_text() == "via_q_root,via_diagonalization,discrepancy\n"


def test_spectrum_lattice(tmp_path):
    code, out = run(tmp_path, "spectrum", "--config", str(CONFIGS / "lattice_delta.toml"))
    rows = out.read_text().splitlines()[1:]
    assert code == 0 and len(rows) == 1
    assert float(rows[0].split(",")[2]) <= 1e-8


def test_spectrum_pinned(tmp_path):
    code, out = run(tmp_path, "spectrum", "--config", str(CONFIGS / "pinned.toml"))
    rows = out.read_text().splitlines()[1:]
    assert code == 0 and len(rows) == 1
    assert abs(float(rows[0].split(",")[0]) - 0.5) <= 1e-10


def test_spectrum_interval_inside_spectrum(tmp_path, capsys):
    code, _ = run(tmp_path, "spectrum", "--config", str(CONFIGS / "pinned.toml"), "--interval", "1,1.0000000000001")
    assert code == 1 and "IntervalInSpectrumA0" in capsys.readouterr().err


def test_resolvent_alpha_zero(tmp_path):
    code, out = run(tmp_path, "resolvent", "--config", str(CONFIGS / "alpha_zero.toml"), "--z", "0.5,-2")
    model, _ = load_config(CONFIGS / "alpha_zero.toml").build()
    assert code == 0
    assert np.array_equal(read_matrix(out), resolvent0(model, 0.5 - 2j))


def test_resolvent_pinned_3i(tmp_path):
    code, out = run(tmp_path, "resolvent", "--config", str(CONFIGS / "pinned.toml"), "--z", "0,3")
    expected = np.linalg.inv(3j * np.eye(2) - np.diag([0.5, 2.0]))
    assert code == 0 and np.max(np.abs(read_matrix(out) - expected)) <= 1e-10


def test_resolvent_on_spectrum(tmp_path, capsys):
    code, out = run(tmp_path, "resolvent", "--config", str(CONFIGS / "pinned.toml"), "--z", "2,0")
    assert code == 1 and "SpectrumHit" in capsys.readouterr().err
    assert not out.exists()


def test_demo(capsys):
    assert main(["demo"]) == 0
    text = capsys.readouterr().out
    assert "pinned two-level" in text and "lattice delta" in text


def test_unknown_keys_rejected():
    with pytest.raises(ConfigParse):
        parse_config("[model]\nkind = 'RandomHermitian'\ncolour = 3\n")
    with pytest.raises(ConfigParse):
        parse_config("[model]\nkind = 'RandomHermitian'\n[extras]\n")
    with pytest.raises(ConfigParse):
        parse_config("[model]\nkind = 'RandomHermitian'\n[tolerances]\nfoo = 1e-3\n")
    with pytest.raises(ConfigParse):
        parse_config("[model]\nkind = 'RandomHermitian'\n[tolerances]\nrcond = 3\n")
    with pytest.raises(ConfigParse):
        parse_config("not toml [")


def test_config_errors_exit_1(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[model]\nkind = 'Explicit'\na0 = [[1.0]]\n")
    assert main(["verify", "--config", str(bad)]) == 1
    assert main(["verify", "--config", str(tmp_path / "missing.toml")]) == 1
    assert main(["verify", "--config", str(CONFIGS / "pinned.toml"), "--tol", "junk"]) == 1


def test_explicit_matrix_file(tmp_path):
    (tmp_path / "a0.txt").write_text("2 2\n1 0 0 0\n0 0 2 0\n")
    cfg = tmp_path / "run.toml"
    cfg.write_text("[model]\nkind = 'Explicit'\na0 = 'a0.txt'\ntau = {re = [[1.0, 0.0]], im = [[0.0, 0.0]]}\n"
                   "[family]\nkind = 'AlphaType'\nalpha = [[0.5]]\n")
    model, fam = load_config(cfg).build()
    np.testing.assert_array_equal(model.a0, np.diag([1.0, 2.0]))
    assert fam.smallness_c is not None


def test_random_config_with_seed_override(tmp_path):
    code, a = run(tmp_path, "verify", "--config", str(CONFIGS / "pinned.toml"), "--seed", "5", name="a")
    code2, b = run(tmp_path, "verify", "--config", str(CONFIGS / "pinned.toml"), name="b")
    assert code == code2 == 0
    assert a.read_text() != b.read_text()
