import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from sphsum.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    rows = list(csv.reader(io.StringIO(out.out))) if out.out else []
    return code, rows, out.err


def cfg(d):
    return json.dumps(d)


def test_phi(capsys):
    code, rows, _ = run(["phi", "-c", cfg({"s": [0, 0], "x": [1, 2]})], capsys)
    assert code == 0 and rows == [["re", "im"], ["1.0", "0.0"]]
    code, rows, _ = run(["phi", "-c", cfg({"s": [1], "x": [2]})], capsys)
    assert float(rows[1][0]) == pytest.approx(math.cos(2)) and float(rows[1][1]) == pytest.approx(math.sin(2))


def test_phi_mc_columns(capsys):
    code, rows, _ = run(["phi", "-c", cfg({"s": [1, 2], "x": [0.5, -0.5]}), "--mc", "100000", "--seed", "3"], capsys)
    assert code == 0 and rows[0] == ["re", "im", "mc_re", "mc_im", "mc_stderr"]
    re, im, mre, mim, se = map(float, rows[1])
    assert abs(complex(re, im) - complex(mre, mim)) < 3 * se


def test_config_and_dimension_errors(capsys, tmp_path):
    assert run(["phi", "-c", "{not json"], capsys)[0] == 2
    assert run(["phi", "-c", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["phi", "-c", cfg({"s": [1]})], capsys)[0] == 2
    assert run(["phi", "-c", cfg({"s": [1], "x": [1, 2]})], capsys)[0] == 3
    assert run(["transform", "-c", cfg({"ensemble": {"variant": "gue", "n": 2}, "s": [[1, 2, 3]]})], capsys)[0] == 3
    assert run(["transform", "-c", cfg({"ensemble": {"variant": "cue", "n": 2}, "s": [[1, 2]]})], capsys)[0] == 2


def test_config_from_file(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(cfg({"s": [0.5], "x": [2]}), encoding="utf-8")
    code, rows, _ = run(["phi", "-c", str(p)], capsys)
    assert code == 0 and float(rows[1][0]) == pytest.approx(math.cos(1))


def test_transform_columns(capsys):
    s = [0.0, 0.5, 1.0, 2.0]
    code, rows, _ = run(["transform", "-c", cfg({"ensemble": {"variant": "gue", "n": 1}, "s": s}), "--numeric"], capsys)
    assert code == 0 and rows[0] == ["s1", "re", "im", "num_re", "num_im", "check"]
    for r, sv in zip(rows[1:], s):
        assert float(r[1]) == pytest.approx(math.exp(-sv * sv / 2))
        assert float(r[5]) < 1e-6
    code, rows, _ = run(["transform", "-c", cfg({"ensemble": {"variant": "lue", "n": 1}, "s": [1.0]})], capsys)
    assert complex(float(rows[1][1]), float(rows[1][2])) == pytest.approx(1 / (1 + 1j))


def test_sum_outputs_and_paths(capsys):
    x = [[-1.0], [0.0], [2.0]]
    code, rows, _ = run(["sum", "-c", cfg({"a": {"variant": "gue", "n": 1}, "b": {"variant": "gue", "n": 1}, "x": x})], capsys)
    assert code == 0 and rows[0] == ["x1", "density", "path"]
    for r in rows[1:]:
        t = float(r[0])
        assert float(r[1]) == pytest.approx(math.exp(-t * t / 4) / math.sqrt(4 * math.pi))
    pe = {"variant": "pe", "weights": [{"family": "gaussian"}, {"family": "gaussian", "coeffs": [0, 1]}]}
    code, rows, err = run(["sum", "-v", "-c", cfg({"a": pe, "b": {"variant": "lue", "n": 2}, "x": [[0.5, 1.5]]})], capsys)
    assert code == 0 and rows[1][-1] == "add_lue" and "add_lue" in err


def test_sum_capability_and_dimension(capsys):
    fixed3 = {"variant": "fixed", "eigenvalues": [0, 1, 2]}
    pe3 = {"variant": "pe", "weights": [{"family": "gaussian", "coeffs": [0] * k + [1]} for k in range(3)]}
    assert run(["sum", "-c", cfg({"a": fixed3, "b": pe3, "x": [[0, 1, 2]]})], capsys)[0] == 4
    assert run(["sum", "-c", cfg({"a": {"variant": "gue", "n": 2}, "b": {"variant": "gue", "n": 3}, "x": [[0, 1]]})], capsys)[0] == 3


def test_kernel(capsys):
    code, rows, _ = run(["kernel", "-c", cfg({"ensemble": {"variant": "lue", "n": 1}, "x": [0.0, 1.0, 3.0]})], capsys)
    assert code == 0 and rows[0] == ["x", "K_xx", "trace"]
    for r in rows[1:]:
        assert float(r[1]) == pytest.approx(math.exp(-float(r[0])))
        assert float(r[2]) == pytest.approx(1.0, abs=1e-8)
    conf = cfg({"ensemble": {"variant": "lue", "n": 2}, "x": {"start": 0.2, "stop": 8, "num": 9}, "alpha": 0})
    code, rows, _ = run(["kernel", "-c", conf, "--transformed", "--check"], capsys)
    assert code == 0 and rows[0][-1] == "check"
    assert max(float(r[3]) for r in rows[1:]) < 1e-4
    assert float(rows[1][2]) == pytest.approx(2.0, abs=1e-6)
    code, rows, _ = run(["kernel", "--full", "-c", cfg({"ensemble": {"variant": "gue", "n": 2}, "x": [0, 1]})], capsys)
    assert rows[0] == ["x", "y", "K"] and len(rows) == 5


def test_validate_pass_fail_and_determinism(capsys):
    good = cfg({"a": {"variant": "gue", "n": 2}, "b": {"variant": "gue", "n": 2}, "samples": 50000, "gate": 0.02})
    code1, rows1, _ = run(["validate", "-c", good, "--seed", "7"], capsys)
    code2, rows2, _ = run(["validate", "-c", good, "--seed", "7", "--threads", "3"], capsys)
    assert code1 == 0 and rows1[1][-1] == "pass" and rows1 == rows2
    wrong = cfg(
        {
            "a": {"variant": "lue", "n": 2, "alpha": 1},
            "samples": 20000,
            "target": {"a": {"variant": "lue", "n": 2, "alpha": 4}},
        }
    )
    code, rows, _ = run(["validate", "-c", wrong], capsys)
    assert code == 5 and float(rows[1][0]) > 0.1 and rows[1][-1] == "fail"
    assert run(["validate", "-c", cfg({"a": {"variant": "lue", "n": 2, "alpha": 0.5}})], capsys)[0] == 4


def test_sum_marginal_feeds_validate(capsys, tmp_path):
    out = tmp_path / "m.csv"
    conf = {"a": {"variant": "gue", "n": 2}, "b": {"variant": "lue", "n": 2, "alpha": 1}}
    grid = {"start": -6, "stop": 22, "num": 1201}
    assert run(["sum", "-o", str(out), "-c", cfg({**conf, "x": grid, "kind": "marginal"})], capsys)[0] == 0
    code, rows, _ = run(["validate", "-c", cfg({**conf, "samples": 20000, "gate": 0.03, "target": {"csv": str(out)}})], capsys)
    assert code == 0 and rows[1][-1] == "pass"


def test_sample_dump_and_histogram(capsys, monkeypatch):
    monkeypatch.setenv("SPHSUM_THREADS", "2")
    conf = cfg({"a": {"variant": "gue", "n": 2}, "samples": 4})
    code, rows, _ = run(["sample", "-c", conf, "--seed", "1"], capsys)
    assert code == 0 and rows[0] == ["lambda1", "lambda2"] and len(rows) == 5
    assert all(float(r[0]) <= float(r[1]) for r in rows[1:])
    code, rows, _ = run(["sample", "-c", cfg({"a": {"variant": "lue", "n": 1}, "samples": 500}), "--histogram"], capsys)
    assert rows[0] == ["bin_left", "bin_right", "density"]
    monkeypatch.setenv("SPHSUM_THREADS", "many")
    assert run(["sample", "-c", conf], capsys)[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "sphsum", "phi", "-c", '{"s":[0],"x":[1]}'], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0 and res.stdout.splitlines() == ["re,im", "1.0,0.0"]
