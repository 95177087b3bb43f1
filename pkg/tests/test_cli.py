import io

import numpy as np
import pytest

from mcpc import load_raw, read_archive, save_raw
from mcpc.archive import header_size
from mcpc.cli import main
from mcpc.metrics import CSV_COLUMNS, synth_field


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def brick(tmp_path):
    x = synth_field("gaussian-mixture", (12, 10, 8), 0)
    p = tmp_path / "x.f64"
    save_raw(x, p)
    return x, p


def build(tmp_path, brick, *extra):
    _, src = brick
    arc = tmp_path / "a.mcpc"
    code, out = run("construct", "--in", src, "--dims", "12,10,8", "--codec", "lorenzo",
                    "--delta", 6, "--n", 5, "--out", arc, *extra)
    assert code == 0, out
    return arc, out


def test_construct_prints_table(tmp_path, brick):
    arc, out = build(tmp_path, brick)
    lines = out.splitlines()
    assert lines[0].split() == ["i", "tau", "measured_error", "R_i"]
    assert len(lines) == 1 + 5 + 1 and lines[-1].startswith("wrote")
    assert read_archive(arc).n == 5


def test_construct_is_deterministic(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    first = arc.read_bytes()
    build(tmp_path, brick)
    assert arc.read_bytes() == first


def test_reconstruct_by_m(tmp_path, brick):
    x, _ = brick
    arc, _ = build(tmp_path, brick)
    out_raw = tmp_path / "r.f64"
    code, out = run("reconstruct", "--in", arc, "--m", 3, "--out", out_raw)
    assert code == 0
    a = read_archive(arc)
    y = load_raw(out_raw, x.dims, "f64")
    assert float(np.max(np.abs(x.values - y.values))) == a.components[2].measured_error
    assert f"linf {a.components[2].measured_error!r}" in out


def test_reconstruct_m_zero_writes_zeros(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    out_raw = tmp_path / "z.f64"
    code, out = run("reconstruct", "--in", arc, "--m", 0, "--out", out_raw)
    assert code == 0 and "m_used 0" in out
    assert np.all(np.fromfile(out_raw) == 0.0)


def test_reconstruct_loose_tol_reads_one_payload(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    a = read_archive(arc)
    tol = a.components[0].measured_error * 2
    code, out = run("reconstruct", "--in", arc, "--tol", tol, "--out", tmp_path / "r", "-v")
    assert code == 0 and "m_used 1" in out
    hdr = header_size(3, 5)
    p1 = a.components[0].payload_bits // 8
    assert f"bytes_read {hdr + p1} (header {hdr}, payload {p1})" in out


def test_reconstruct_unmet_tol(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    code, out = run("reconstruct", "--in", arc, "--tol", 0, "--out", tmp_path / "r")
    assert code == 0 and "unmet" in out and "m_used 5" in out


def test_info(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    code, out = run("info", "--in", arc)
    assert code == 0
    assert "dims 12,10,8" in out and "components 5" in out and "delta 6" in out


def test_bench_csv_and_derivative(tmp_path):
    csv_path = tmp_path / "o.csv"
    code, out = run("bench", "--synthetic", "gaussian-mixture", "--dims", "16,16,16", "--codec", "lorenzo",
                    "--delta", 8, "--n", 4, "--csv", csv_path, "--derivative-order", 2, "--axis", 2)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 5
    assert "derivative_linf" in out
    again = tmp_path / "p.csv"
    run("bench", "--synthetic", "gaussian-mixture", "--dims", "16,16,16", "--codec", "lorenzo",
        "--delta", 8, "--n", 4, "--csv", again)
    assert again.read_bytes() == csv_path.read_bytes()


def test_bench_from_file(tmp_path, brick):
    _, src = brick
    code, _ = run("bench", "--in", src, "--dims", "12,10,8", "--n", 3, "--csv", tmp_path / "o.csv")
    assert code == 0


@pytest.mark.parametrize("dtype", ["f64", "f32"])
def test_lossless_then_full_reconstruct_is_byte_identical(tmp_path, dtype):
    x = synth_field("zeros-with-blob", (10, 9, 8), 1)
    src = tmp_path / "x.raw"
    save_raw(x, src, dtype)
    arc = tmp_path / "l.mcpc"
    code, out = run("lossless", "--in", src, "--dims", "10,9,8", "--dtype", dtype, "--delta", 8, "--out", arc)
    assert code == 0 and "compression_ratio" in out
    n = read_archive(arc, prefix=0).n
    back = tmp_path / "back.raw"
    assert run("reconstruct", "--in", arc, "--m", n, "--out", back)[0] == 0
    assert back.read_bytes() == src.read_bytes()


def test_split_demo():
    code, out = run("split-demo", "--value", "3.141592653589793", "--n", 2)
    assert code == 0
    assert out.splitlines()[0] == "c_1 3.1415927410125732"
    assert "residual" in out


@pytest.mark.parametrize("argv", [
    [],
    ["construct", "--dims", "4"],
    ["construct", "--in", "x", "--dims", "4,0", "--n", 2, "--out", "y"],
    ["construct", "--in", "x", "--dims", "4", "--n", 2, "--out", "y", "--delta", 17],
    ["construct", "--in", "x", "--dims", "4", "--n", 2, "--out", "y", "--codec", "zfp"],
    ["reconstruct", "--in", "a", "--m", 1, "--tol", 0.1, "--out", "b"],
    ["split-demo", "--value", "1e40"],
])
def test_argument_errors_exit_1(argv, capsys):
    assert run(*argv)[0] == 1
    assert "error" in capsys.readouterr().err


def test_reconstruct_m_too_large(tmp_path, brick):
    arc, _ = build(tmp_path, brick)
    assert run("reconstruct", "--in", arc, "--m", 6, "--out", tmp_path / "r")[0] == 1


def test_bad_magic_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.mcpc"
    p.write_bytes(b"NOPE" + b"\0" * 60)
    assert run("info", "--in", p)[0] == 2
    assert "magic" in capsys.readouterr().err


def test_missing_and_wrong_size_input_exit_2(tmp_path):
    assert run("lossless", "--in", tmp_path / "nope", "--dims", "4")[0] == 2
    p = tmp_path / "short"
    p.write_bytes(b"\0" * 24)
    assert run("lossless", "--in", p, "--dims", "4")[0] == 2


def test_nonfinite_input_exit_2(tmp_path, capsys):
    p = tmp_path / "nan"
    np.array([1.0, np.nan]).tofile(p)
    assert run("construct", "--in", p, "--dims", "2", "--n", 2, "--out", tmp_path / "a")[0] == 2
    assert "index 1" in capsys.readouterr().err


def test_corrupt_payload_exit_3(tmp_path, brick, capsys):
    arc, _ = build(tmp_path, brick)
    raw = bytearray(arc.read_bytes())
    raw[-6] ^= 0xFF
    arc.write_bytes(raw)
    assert run("reconstruct", "--in", arc, "--m", 5, "--out", tmp_path / "r")[0] == 3
    assert "offset" in capsys.readouterr().err
    # the damaged payload is the last one, so shorter prefixes still work
    assert run("reconstruct", "--in", arc, "--m", 4, "--out", tmp_path / "r")[0] == 0
