import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inls import cli
from inls.io import (ConfigError, SnapshotFormatError, parse_config, read_snapshot, write_snapshot)
from inls.model import CartesianGrid, Field

BASE = {
    "params": {"N": 1, "b": 0.5},
    "grid": {"M": 256, "L": 20.0},
    "initial_condition": {"kind": "gaussian", "amplitude": 0.8, "width": 1.0},
    "evolution": {"dt0": 1e-3, "t_end": 0.02, "record_every": 5, "grad_blowup_threshold": 100.0},
}


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2), st.sampled_from([4, 8, 16]), st.floats(0.1, 100.0), st.floats(0.0, 10.0),
       st.integers(0, 2**32 - 1))
def test_snapshot_round_trip_bit_exact(tmp_path_factory, N, M, L, t, seed):
    rng = np.random.default_rng(seed)
    g = CartesianGrid(N, L, M)
    u = Field(rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape), g, t)
    path = tmp_path_factory.mktemp("snap") / "u.bin"
    write_snapshot(path, u, 0.5)
    v, b = read_snapshot(path)
    assert b == 0.5 and v.t == t and v.grid == g
    assert v.values.tobytes() == u.values.tobytes()


def test_snapshot_header_layout(tmp_path):
    g = CartesianGrid(1, 2.0, 4)
    write_snapshot(tmp_path / "u.bin", Field(np.arange(4) + 0j, g, 0.25), 0.5)
    raw = (tmp_path / "u.bin").read_bytes()
    assert raw[:8] == b"INLSFLD1" and len(raw) == 64 + 4 * 16
    assert np.frombuffer(raw[64:], "<f8")[::2].tolist() == [0, 1, 2, 3]


@pytest.mark.parametrize("mutate", ["magic", "version", "truncate"])
def test_snapshot_rejects_corruption(tmp_path, mutate):
    g = CartesianGrid(1, 2.0, 4)
    p = tmp_path / "u.bin"
    write_snapshot(p, Field(np.ones(4) + 0j, g), 0.5)
    raw = bytearray(p.read_bytes())
    if mutate == "magic":
        raw[0:1] = b"X"
    elif mutate == "version":
        raw[8] = 9
    else:
        raw = raw[:-3]
    p.write_bytes(bytes(raw))
    with pytest.raises(SnapshotFormatError):
        read_snapshot(p)


def test_config_echo_reparses_identically():
    cfg = parse_config(json.dumps(BASE))
    assert parse_config(cfg.to_json()) == cfg


@pytest.mark.parametrize("patch, field", [
    ({"params": {"N": 1, "b": 1.5}}, "params.b"),
    ({"grid": {"M": 255}}, "grid"),
    ({"evolution": {"dt0": -1}}, "evolution"),
    ({"evolution": {"bogus": 1}}, "bogus"),
    ({"extra": 1}, "extra"),
    ({"initial_condition": {"kind": "gaussian", "T": 1.0}}, "initial_condition"),
    ({"initial_condition": {"kind": "nope"}}, "initial_condition.kind"),
    ({"outputs": {"snapshot_times": ["a"]}}, "outputs.snapshot_times"),
])
def test_config_errors_name_the_field(patch, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(json.dumps({**BASE, **patch}))


def test_config_json_syntax_error_reports_position():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config('{\n  "params": ,\n}')


def test_cli_ground_state_json(capsys):
    assert cli.main(["ground-state", "--N", "1", "--b", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["p"] == 4.0 and abs(out["psi0"] - 1.00997925499619) < 1e-10


def test_cli_ground_state_classic_csv(tmp_path, capsys):
    csv = tmp_path / "psi.csv"
    assert cli.main(["ground-state", "--b", "0", "--classic", "--csv", str(csv)]) == 0
    data = np.loadtxt(csv, delimiter=",", skiprows=1)
    assert abs(data[0, 1] - 3**0.25) < 1e-6


def test_cli_evolve_writes_outputs(tmp_path, capsys):
    cfg = {**BASE, "outputs": {"diagnostics": str(tmp_path / "d.csv"),
                               "snapshot_prefix": str(tmp_path / "snap"), "snapshot_times": [0.01]}}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["evolve", str(path)]) == 0
    out = capsys.readouterr().out
    summary = json.loads(out.strip().splitlines()[-1])
    assert summary["termination"] == "reached_t_end" and summary["snapshots"] == 1
    assert (tmp_path / "d.csv").read_text().startswith("t,mass")
    u, _ = read_snapshot(tmp_path / "snap_t0.010000.bin")
    assert abs(u.t - 0.01) < 1e-14


def test_cli_s_family_and_transforms(tmp_path):
    s = tmp_path / "s.bin"
    assert cli.main(["s-family", "--T", "1", "--t", "0.5", "--grid", "1024,20", "-o", str(s)]) == 0
    assert cli.main(["transform", "phase", str(s), "--gamma0", "0.3", "-o", str(tmp_path / "p.bin")]) == 0
    assert cli.main(["transform", "inverse-pseudo-conformal", str(s), "--T", "1",
                     "-o", str(tmp_path / "v.bin")]) == 0
    v, _ = read_snapshot(tmp_path / "v.bin")
    assert v.t == pytest.approx(2.0)


@pytest.mark.parametrize("argv, code", [
    ([], 2),
    (["ground-state", "--b", "5"], 2),
    (["verify", "--suite", "nope"], 2),
    (["evolve", "/nonexistent/cfg.json"], 2),
    (["s-family", "--T", "1", "--grid", "64,20", "-o", "/dev/null"], 3),
])
def test_cli_exit_codes(argv, code, capsys):
    assert cli.main(argv) == code


def test_cli_verify_quick(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--suite", "quick", "--json", str(out)]) == 0
    reports = json.loads(out.read_text())
    assert all(r["passed"] for r in reports)
    assert "checks passed" in capsys.readouterr().err


def test_threads_env(monkeypatch):
    from inls import fft

    monkeypatch.setenv("INLS_THREADS", "3")
    assert fft.workers() == 3
    monkeypatch.setenv("INLS_THREADS", "zero")
    assert fft.workers() == 1
