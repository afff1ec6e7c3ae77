import csv
import hashlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from spherical_cvqkd.cli import main
from spherical_cvqkd.ldpc import build_regular_code, write_code_file


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_figure1_csv(capsys):
    code, out, _ = _run(capsys, "figure", "1")
    rows = _csv(out)
    assert code == 0 and rows[0] == ["V_A", "delta_xi"] and len(rows) == 51
    assert all(float(r[1]) > 0 for r in rows[1:])


def test_figure2_csv_to_dir(capsys, tmp_path):
    code, _, _ = _run(capsys, "figure", "2", "--out", str(tmp_path))
    rows = _csv((tmp_path / "figure2.csv").read_text())
    assert code == 0 and rows[0] == ["V_A", "K_beta_0.8", "K_beta_0.9"]
    assert max(float(r[1]) for r in rows[1:]) > 0


def test_unknown_figure_is_usage_error(capsys):
    code, _, err = _run(capsys, "figure", "9")
    assert code == 2 and "unknown figure" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_keyrate_json(capsys):
    code, out, _ = _run(capsys, "keyrate", "--V-A", "1", "--distance", "50", "--xi", "0.01")
    rep = json.loads(out)
    assert code == 0 and rep["T"] == pytest.approx(0.1) and rep["K_asymptotic"] > 0
    code, out, _ = _run(capsys, "keyrate", "--distance", "20", "--xi", "0.005", "--N", "1e12")
    rep = json.loads(out)
    assert code == 0 and rep["finite"] and rep["K_finite"] > 0


def test_keyrate_bad_parameters(capsys):
    assert _run(capsys, "keyrate", "--T", "1.5")[0] == 2
    assert _run(capsys, "keyrate", "--T", "0.5", "--distance", "3")[0] == 2


def test_estimate_command(capsys, tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(0, 1.4, 20_000)
    y = np.sqrt(0.6 * 0.5 / 2) * x + rng.normal(0, 1, x.size)
    path = tmp_path / "xy.csv"
    path.write_text("x,y\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, y)))
    code, out, _ = _run(capsys, "estimate", "--input", str(path), "--eps-pe", "0.05")
    est = json.loads(out)
    assert code == 0 and est["T_hat"] == pytest.approx(0.5, rel=0.05)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert _run(capsys, "estimate", "--input", str(bad))[0] == 2
    assert _run(capsys, "estimate", "--input", str(tmp_path / "none.csv"))[0] == 4


def test_recon_bench(capsys, tmp_path):
    h = build_regular_code(1024, 0.5, seed=1)
    path = tmp_path / "code.txt"
    write_code_file(h, path)
    code, out, _ = _run(capsys, "recon-bench", "--code", str(path), "--snr", "0.3,8", "--frames", "3")
    rows = _csv(out)
    assert code == 0
    head = rows[0]
    hi = dict(zip(head, rows[2]))
    assert float(hi["fer"]) == 0.0
    assert float(hi["measured_beta"]) == pytest.approx(float(hi["code_rate"]) / float(hi["capacity"]))
    assert int(hi["leaked_bits_per_frame"]) == int(hi["syndrome_bits"]) + int(hi["checksum_bits"])


def test_recon_bench_missing_code_is_io_error(capsys, tmp_path):
    code, _, err = _run(capsys, "recon-bench", "--code", str(tmp_path / "nope.txt"))
    assert code == 4 and "error" in err


def _hashes(d):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.iterdir())}


def test_simulate_artifacts_and_determinism(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 30000, "V_A": 6.0, "code": "r3/4-n4096", "T": 1.0, "xi": 0.0,
                               "eta": 1.0, "eps_PE": 1e-3, "eps_PA": 1e-3, "eps_bar": 1e-3}))
    a, b = tmp_path / "a", tmp_path / "b"
    code, out, _ = _run(capsys, "simulate", "--config", str(cfg), "--seed", "4", "--out", str(a))
    assert code == 0 and "keys match" in out
    code, _, _ = _run(capsys, "simulate", "--config", str(cfg), "--seed", "4", "--out", str(b),
                      "--workers", "2")
    assert code == 0
    assert _hashes(a) == _hashes(b)
    ka = (a / "key_alice.txt").read_text().split()
    assert ka == (a / "key_bob.txt").read_text().split() and int(ka[0]) > 0
    report = json.loads((a / "report.json").read_text())
    assert report["notice"] == "ok" and report["key_length"] == int(ka[0])
    assert report["leakage"]["leaked_bits_per_frame"] > 0


def test_simulate_no_positive_rate_exit_0(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 20000, "V_A": 2.0, "xi": 1.0}))
    code, out, _ = _run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0 and "no positive rate" in out


def test_simulate_config_errors(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 100, "unknown": 1}))
    assert _run(capsys, "simulate", "--config", str(cfg))[0] == 2
    assert _run(capsys, "simulate", "--config", str(tmp_path / "missing.json"))[0] == 4


def test_numeric_error_exit_3(capsys):
    code, _, err = _run(capsys, "keyrate", "--V-A", "500", "--T", "0.5")
    assert code == 3 and "error" in err


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "spherical_cvqkd.cli", "figure", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("V_A,delta_xi")
