import json
import subprocess
import sys

import numpy as np
import pytest

from lrmkit.cli import bench, generate, main
from lrmkit.lrm import run_heads

PI = [4, 5, 9, 6, 8, 1, 3, 7, 2]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pi_file(tmp_path):
    p = tmp_path / "pi.txt"
    p.write_text(" ".join(map(str, PI)) + "\n")
    return p


def test_generate_exact_runs():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(1, 300))
        r = int(rng.integers(1, n + 1))
        vals, achieved = generate(n, r, int(rng.integers(0, 1 << 30)))
        assert sorted(vals) == list(range(1, n + 1))
        assert achieved == r == int(run_heads(vals).sum())
    vals, achieved = generate(9, 4, 42)
    assert achieved == 4
    assert generate(50, 1, 7)[0] == list(range(1, 51))
    assert generate(50, 50, 7)[0] == list(range(50, 0, -1))
    assert generate(1000, 37, 5) == generate(1000, 37, 5)


def test_gen_command(capsys, tmp_path, monkeypatch):
    code, out, err = run(capsys, "gen", "--n", 9, "--runs", 4, "--seed", 42)
    assert code == 0 and "achieved_rho=4" in err
    assert [int(x) for x in out.split()] == generate(9, 4, 42)[0]
    monkeypatch.setenv("LRMKIT_SEED", "42")
    assert run(capsys, "gen", "--n", 9, "--runs", 4)[1] == out
    monkeypatch.setenv("LRMKIT_SEED", "x")
    assert run(capsys, "gen", "--n", 9, "--runs", 4)[0] == 1
    monkeypatch.delenv("LRMKIT_SEED")
    assert run(capsys, "gen", "--n", 3, "--runs", 4)[0] == 1
    dest = tmp_path / "g.txt"
    assert run(capsys, "gen", "--n", 5, "--runs", 5, "--out", dest)[0] == 0
    assert dest.read_text().split() == ["5", "4", "3", "2", "1"]


def test_stats(capsys, pi_file):
    code, out, _ = run(capsys, "stats", "--in", pi_file)
    rep = json.loads(out)
    assert code == 0 and rep["rho"] == 4 and rep["n_sus"] == 4
    assert rep["h_lrm"] == pytest.approx(1.7527, abs=1e-4)


def test_sort(capsys, tmp_path, pi_file):
    stats = tmp_path / "s.json"
    code, out, _ = run(capsys, "sort", "--algo", "lrm", "--in", pi_file, "--stats", stats)
    assert code == 0 and out.split() == [str(k) for k in range(1, 10)]
    rep = json.loads(stats.read_text())
    keys = {"n", "rho", "rho_strict", "n_sus", "h_runs", "h_lrm", "cmp_build", "cmp_merge",
            "cmp_total", "internal_ops", "max_leaf_depth"}
    assert keys <= set(rep)
    assert rep["cmp_total"] == rep["cmp_build"] + rep["cmp_merge"] <= 42
    srt = tmp_path / "sorted_1k.txt"
    srt.write_text("\n".join(map(str, range(1, 1001))))
    run(capsys, "sort", "--in", srt, "--stats", stats, "--out", tmp_path / "o.txt")
    assert json.loads(stats.read_text())["cmp_total"] <= 3000
    code, out, _ = run(capsys, "sort", "--algo", "runs", "--in", pi_file)
    assert code == 0 and out.split() == [str(k) for k in range(1, 10)]


def test_rmq_commands(capsys, tmp_path, pi_file):
    for kind in ("plain", "sruns", "runs"):
        idx = tmp_path / f"{kind}.lrmk"
        assert run(capsys, "rmq", "build", "--index", kind, "--in", pi_file, "--out", idx)[0] == 0
        extra = ["--data", pi_file] if kind == "runs" else []
        code, out, _ = run(capsys, "rmq", "query", "--idx", idx, *extra, 3, 9)
        assert code == 0 and out.strip() == "6"
        code, _, err = run(capsys, "rmq", "query", "--idx", idx, *extra, 5, 2)
        assert code == 1 and "RangeError" in err
    assert run(capsys, "rmq", "query", "--idx", tmp_path / "runs.lrmk", 1, 2)[0] == 1


def test_perm_commands(capsys, tmp_path, pi_file):
    code_file = tmp_path / "pi.lrmk"
    assert run(capsys, "perm", "encode", "--in", pi_file, "--out", code_file)[0] == 0
    assert run(capsys, "perm", "apply", "--code", code_file, 3)[1].strip() == "9"
    assert run(capsys, "perm", "inverse", "--code", code_file, 2)[1].strip() == "9"
    rep = json.loads(run(capsys, "perm", "size", "--code", code_file, "--json")[1])
    assert rep["forest_paren_bits"] == 26 and rep["merge_payload_bits"] == 16
    code, out, _ = run(capsys, "perm", "size", "--code", code_file)
    assert code == 0 and "total_bits" in out
    assert run(capsys, "perm", "apply", "--code", code_file, 10)[0] == 1
    bad = tmp_path / "dup.txt"
    bad.write_text("1 2 2")
    code, _, err = run(capsys, "perm", "encode", "--in", bad, "--out", tmp_path / "d.lrmk")
    assert code == 1 and "position 3" in err


def test_io_errors_exit_2(capsys, tmp_path, pi_file):
    assert run(capsys, "stats", "--in", tmp_path / "missing.txt")[0] == 2
    junk = tmp_path / "junk.txt"
    junk.write_text("1 2\n3 abc\n")
    code, _, err = run(capsys, "stats", "--in", junk)
    assert code == 2 and ":2:3:" in err
    blob = tmp_path / "blob.lrmk"
    blob.write_bytes(b"not a container at all")
    assert run(capsys, "perm", "apply", "--code", blob, 1)[0] == 2
    code_file = tmp_path / "pi.lrmk"
    run(capsys, "perm", "encode", "--in", pi_file, "--out", code_file)
    data = bytearray(code_file.read_bytes())
    data[4] += 1
    code_file.write_bytes(bytes(data))
    code, _, err = run(capsys, "perm", "apply", "--code", code_file, 1)
    assert code == 2 and "version" in err
    # a plain RMQ container is not a permutation code
    idx = tmp_path / "p.lrmk"
    run(capsys, "rmq", "build", "--in", pi_file, "--out", idx)
    assert run(capsys, "perm", "apply", "--code", idx, 1)[0] == 2


def test_bench_determinism_and_trend(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for dest in (a, b):
        assert run(capsys, "bench", "--n", 2048, "--seed", 3, "--queries", 200, "--json", "--no-meta",
                   "--out", dest)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert "meta" not in rep
    assert rep["trend"]["sweep_points"] == 12
    assert rep["trend"]["spearman_h_lrm_cmp_total"] > 0.9 and rep["trend"]["ok"]
    for p in rep["points"]:
        c = p["counters"]
        assert c["cmp_total"] == c["cmp_build"] + c["cmp_merge"]
        assert p["input"]["achieved_rho"] == p["input"]["requested_rho"]
        assert c["data_comparisons"]["runs"] <= c["queries"]
    with_meta = bench(64, 1, 10)
    assert set(with_meta["meta"]) == {"version", "python", "timestamp"}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lrmkit", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "perm" in res.stdout
    res = subprocess.run([sys.executable, "-m", "lrmkit", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
