import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from metldpc.cli import main
from metldpc.code import read_code

from conftest import SMALL_MET


@pytest.fixture()
def proto_file(tmp_path):
    path = tmp_path / "small.proto"
    path.write_text(SMALL_MET)
    return path


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_build_code_identity(tmp_path):
    proto = tmp_path / "p.proto"
    proto.write_text("2 3 4\n1 1 0\n0 1 1\n(0,0)=1 (0,1)=2 (1,1)=3 (1,2)=4\n0 0 0\n")
    out = tmp_path / "out"
    assert run("--out-dir", out, "--seed", 7, "build-code", "--proto", proto, "--z", 1) == 0
    code = read_code(out / "code.json")
    np.testing.assert_array_equal(code.parity_check_matrix().toarray(), [[1, 1, 0], [0, 1, 1]])
    manifest = json.loads((out / "build-code.manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["subcommand"] == "build-code"
    assert str(proto) in manifest["inputs"]


def test_build_code_bad_z_exits_2(tmp_path, proto_file, capsys):
    out = tmp_path / "out"
    assert run("--out-dir", out, "build-code", "--proto", proto_file, "--z", 1) == 2
    assert "z=1" in capsys.readouterr().err
    assert not out.exists()


def test_bad_protograph_exits_2(tmp_path):
    bad = tmp_path / "bad.proto"
    bad.write_text("2 2 1\n1 1\n1\n(0,0)=1\n0 0\n")
    assert run("--out-dir", tmp_path / "o", "build-code", "--proto", bad, "--z", 4) == 2
    assert not (tmp_path / "o").exists()


def test_placeholder_rate_stats(tmp_path):
    out = tmp_path / "o"
    assert run("--out-dir", out, "build-code", "--proto", "builtin:placeholder_r001", "--z", 9984) == 0
    stats = {r["metric"]: r["value"] for r in read_csv(out / "code_stats.csv")}
    assert int(stats["n"]) == 998400
    assert float(stats["rate"]) == pytest.approx(0.01, abs=1e-12)
    assert float(stats["frac_cns_touching_deg1_vns"]) == pytest.approx(98 / 99)


def test_analyze_perfect_channel(tmp_path, proto_file):
    out = tmp_path / "o"
    assert run("--out-dir", out, "analyze", "--proto", proto_file, "--esn0", 60, "--iterations", 3,
               "--heatmap") == 0
    rows = read_csv(out / "densities.csv")
    assert len(rows) == 3 * 5
    assert all(float(r["mi"]) > 1 - 1e-9 for r in rows if int(r["t"]) >= 2)
    heat = read_csv(out / "heatmap.csv")
    assert len(heat) == 15 and all(0 <= float(r["mean_c"]) <= 1 for r in heat)


def test_analyze_paper_rate_edge_types(tmp_path):
    out = tmp_path / "o"
    assert run("--out-dir", out, "analyze", "--proto", "builtin:placeholder_r001", "--esn0", -20,
               "--iterations", 2) == 0
    assert {int(r["edge_type"]) for r in read_csv(out / "densities.csv")} == set(range(1, 12))


def test_build_lut_full_rank_and_determinism(tmp_path, proto_file):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["build-lut", "--proto", proto_file, "--esn0", -3, "--iterations", 8, "--clusters", 40]
    assert run("--out-dir", a, *args) == 0
    assert run("--out-dir", b, *args) == 0
    report = json.loads((a / "lut_report.json").read_text())
    assert report["max_abs_error"] == 0.0 and report["entry_count"] == 40 * 32
    for name in ("lut.bin", "lut.csv", "heatmap.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "build-lut.manifest.json").read_text())
    mb = json.loads((b / "build-lut.manifest.json").read_text())
    for m in (ma, mb):
        m.pop("timestamp")
        m["outputs"] = [p.split("/")[-1] for p in m["outputs"]]
    assert ma == mb


def test_build_lut_from_densities(tmp_path, proto_file):
    out = tmp_path / "o"
    assert run("--out-dir", out, "analyze", "--proto", proto_file, "--esn0", -3, "--iterations", 8) == 0
    assert run("--out-dir", out, "build-lut", "--proto", proto_file, "--densities", out / "densities.csv",
               "--iterations", 8, "--clusters", 5) == 0
    assert (out / "lut.bin").exists()


def test_build_lut_validation(tmp_path, proto_file):
    out = tmp_path / "o"
    assert run("--out-dir", out, "build-lut", "--proto", proto_file, "--iterations", 8) == 2
    assert run("--out-dir", out, "build-lut", "--proto", proto_file, "--esn0", 0, "--iterations", 8,
               "--clusters", 41) == 2
    assert run("--out-dir", out, "build-lut", "--proto", proto_file, "--esn0", 0, "--mode", "odd") == 2
    assert not out.exists()


@pytest.fixture()
def pipeline(tmp_path, proto_file):
    out = tmp_path / "o"
    assert run("--out-dir", out, "build-code", "--proto", proto_file, "--z", 30) == 0
    assert run("--out-dir", out, "build-lut", "--proto", proto_file, "--esn0", -2, "--iterations", 20,
               "--clusters", 10) == 0
    return out


def test_simulate_smoke_and_determinism(pipeline):
    common = ["simulate", "--code", pipeline / "code.json", "--max-iterations", 20, "--max-frames", 30,
              "--target-errors", 5]
    assert run("--out-dir", pipeline, "--seed", 4, *common, "--decoder", "idmsa", "--lut",
               pipeline / "lut.bin", "--esn0", 12, -4, "--output", "a.csv") == 0
    assert run("--out-dir", pipeline, "--seed", 4, *common, "--decoder", "idmsa", "--lut",
               pipeline / "lut.bin", "--esn0", 12, -4, "--output", "b.csv") == 0
    assert (pipeline / "a.csv").read_bytes() == (pipeline / "b.csv").read_bytes()
    rows = read_csv(pipeline / "a.csv")
    assert rows[0]["fer"] == "0.0" and rows[0]["decoder"] == "idmsa"
    assert run("--out-dir", pipeline, *common, "--decoder", "msa", "--esn0-range", -4, -3, 0.5,
               "--output", "c.csv") == 0
    assert [float(r["esn0_db"]) for r in read_csv(pipeline / "c.csv")] == [-4.0, -3.5, -3.0]


def test_simulate_validation(pipeline):
    common = ["--out-dir", pipeline, "simulate", "--code", pipeline / "code.json", "--esn0", 0,
              "--max-iterations", 20, "--output", "never.csv"]
    assert run(*common, "--decoder", "idmsa") == 2
    assert run(*common, "--decoder", "msa", "--msa-factor", 1.5) == 2
    assert run(*common[:-4], "--max-iterations", 50, "--decoder", "idmsa", "--lut", pipeline / "lut.bin",
               "--output", "never.csv") == 2
    assert run(*common, "--decoder", "spa", "--target-errors", 0) == 2
    assert not (pipeline / "never.csv").exists()


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--decoder", "spa"])
    assert info.value.code == 2


def test_console_entry_point(tmp_path, proto_file):
    proc = subprocess.run([sys.executable, "-m", "metldpc.cli", "--out-dir", str(tmp_path / "o"),
                           "build-code", "--proto", str(proto_file), "--z", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "positive" in proc.stderr


def test_runtime_failure_exit_code(pipeline, monkeypatch, capsys):
    import metldpc.simulate

    def boom(*a, **k):
        raise RuntimeError("worker died")

    monkeypatch.setattr(metldpc.simulate, "sweep", boom)
    assert run("--out-dir", pipeline, "simulate", "--code", pipeline / "code.json", "--decoder", "spa",
               "--esn0", 0) == 1
    assert "worker died" in capsys.readouterr().err
