import json
import os
import subprocess
import sys

import numpy as np
import pytest

from liouville.cli import bench, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


def test_steady_text(capsys):
    code, out, _ = run(capsys, "steady", "--builtin", "two-level")
    assert code == 0
    assert "trace: 1" in out


def test_steady_json(capsys):
    code, out, _ = run(capsys, "steady", "--builtin", "lambda3", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["rho_re"][2][2] == pytest.approx(0, abs=1e-10)
    assert payload["rho_re"][0][1] == pytest.approx(-0.5, abs=1e-9)
    assert payload["trace"] == pytest.approx(1, abs=1e-12)


def test_steady_builders_agree(capsys):
    _, fast, _ = run(capsys, "steady", "--builtin", "two-level", "--x", "3", "--json")
    _, naive, _ = run(capsys, "steady", "--builtin", "two-level", "--x", "3", "--json",
                      "--builder", "naive")
    a, b = json.loads(fast), json.loads(naive)
    np.testing.assert_allclose(a["rho_re"], b["rho_re"], atol=1e-12)


def test_steady_singular(tmp_path, capsys):
    path = tmp_path / "zero.lvm"
    path.write_text("levels 3\n")
    code, _, err = run(capsys, "steady", "--model", str(path))
    assert code == 1
    assert "steady state not unique" in err


def test_bad_model_file(tmp_path, capsys):
    path = tmp_path / "bad.lvm"
    path.write_text("levels 2\nham 1 3 1\n")
    code, _, err = run(capsys, "validate", "--model", str(path))
    assert code == 1
    assert "2:7: semantic error" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "steady", "--model", str(tmp_path / "nope.lvm"))
    assert code == 1 and err


def test_no_model(capsys):
    code, _, err = run(capsys, "steady")
    assert code == 1 and "--model" in err


def test_sweep_two_level(capsys):
    code, out, _ = run(capsys, "sweep", "--builtin", "two-level")
    assert code == 0
    header, data = _csv(out)
    assert header == ["x", "pop2"]
    assert data.shape == (401, 2)
    assert data[np.argmax(data[:, 1]), 0] == 0


def test_sweep_override(capsys):
    code, out, _ = run(capsys, "sweep", "--builtin", "lambda3", "--sweep=-2,2,5")
    assert code == 0
    header, data = _csv(out)
    assert header == ["x", "pop3", "coh1_2.re", "coh1_2.im"]
    np.testing.assert_allclose(data[:, 0], [-2, -1, 0, 1, 2])
    assert data[2, 1] <= 1e-10


def test_sweep_bad_override(capsys):
    code, _, err = run(capsys, "sweep", "--builtin", "lambda3", "--sweep=1,2")
    assert code == 1 and "FROM,TO,POINTS" in err


def test_sweep_waveplate_columns(capsys):
    code, out, _ = run(capsys, "sweep", "--builtin", "rb87-waveplate", "--sweep=0,200,3")
    assert code == 0
    header, data = _csv(out)
    assert header == ["x", "phi_plus", "phi_minus", "trans_plus", "trans_minus", "dphi"]
    assert np.all(np.isfinite(data))


def test_sweep_failures_exit_1(tmp_path, capsys):
    path = tmp_path / "m.lvm"
    # level 3 is isolated only at x = 0, where the steady state is not unique
    path.write_text("levels 3\nham 1 2 1\nham 2 2 0:-0.5\nsrc 1 2 1\nham 1 3 0 1\n"
                    "sweep x -1 1 3\nobserve pop 3\n")
    code, out, err = run(capsys, "sweep", "--model", str(path))
    assert code == 1
    assert "1 of 3 sweep points failed" in err
    assert "nan" in out


def test_sweep_to_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", "--builtin", "two-level", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().count(b"\n") == 402


def test_evolve_pure_decay(tmp_path, capsys):
    path = tmp_path / "decay.lvm"
    path.write_text("levels 2\nham 2 2 0:-0.5\nsrc 1 2 1\nobserve pop 2\n")
    code, out, _ = run(capsys, "evolve", "--model", str(path), "--init-level", "2",
                       "--t-end", "5", "--dt", "0.01")
    assert code == 0
    header, data = _csv(out)
    assert header == ["t", "pop2"]
    assert data[-1, 0] == 5
    np.testing.assert_allclose(data[:, 1], np.exp(-data[:, 0]), atol=1e-8)


def test_evolve_reaches_steady_state(capsys):
    _, out, _ = run(capsys, "evolve", "--builtin", "two-level", "--t-end", "50", "--every", "100")
    _, data = _csv(out)
    _, js, _ = run(capsys, "steady", "--builtin", "two-level", "--json")
    assert data[-1, 0] == 50
    assert data[-1, 1] == pytest.approx(json.loads(js)["rho_re"][1][1], abs=1e-6)


def test_evolve_step_too_large(capsys):
    code, _, err = run(capsys, "evolve", "--builtin", "two-level", "--dt", "1")
    assert code == 1
    assert "stability bound 0.04" in err


def test_evolve_bad_init_level(capsys):
    code, _, err = run(capsys, "evolve", "--builtin", "two-level", "--init-level", "3")
    assert code == 1 and "--init-level" in err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--builtin", "rb87-waveplate")
    assert code == 0 and out.startswith("ok: 15 levels")


def test_validate_reports_closure(tmp_path, capsys):
    path = tmp_path / "open.lvm"
    path.write_text("levels 2\nham 1 2 1\nham 2 2 0:-0.5\nsrc 1 2 0.5\n")
    code, out, _ = run(capsys, "validate", "--model", str(path))
    assert code == 1
    assert "[closure] level 2" in out


def test_bench_rows():
    rows = bench([2, 3], reps=1, seed=0)
    assert [r[0] for r in rows] == [2, 3]
    assert all(r[1] > 0 and r[2] > 0 for r in rows)


def test_bench_cli(tmp_path, capsys):
    target = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", "--sizes", "2,4", "--reps", "1", "--out", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "N,naive_s,fast_s,ratio" and len(lines) == 3


def test_bench_bad_sizes(capsys):
    code, _, _ = run(capsys, "bench", "--sizes", "1")
    assert code == 1


def _subprocess(args, threads):
    env = dict(os.environ, LIOUVILLE_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "liouville.cli", *args],
                          capture_output=True, env=env, check=True).stdout


def test_deterministic_output_across_threads():
    args = ["sweep", "--builtin", "lambda3", "--sweep=-5,5,21"]
    a = _subprocess(args, 1)
    b = _subprocess(args, 1)
    c = _subprocess(args, 4)
    assert a == b == c
