import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from multispecies_landau import cli


def _config(**changes):
    cfg = {
        "dim": 2,
        "grid": {"extent": 6.0, "points_per_axis": 12},
        "species": {"masses": [1.0, 2.0], "couplings": [[1.0, 1.0], [1.0, 1.0]], "exponents": [[0.0, 0.0], [0.0, 0.0]]},
        "initial": [[{"n": 1.0, "u": [0.5, 0.0], "theta": 0.8}], [{"n": 1.0, "u": [-0.5, 0.0], "theta": 1.5}]],
        "run": {"dt": 0.01, "t_end": 0.03},
        "output": {"snapshot_every": 0},
    }
    for key, value in changes.items():
        section, _, name = key.partition("__")
        if name:
            cfg[section][name] = value
        else:
            cfg[section] = value
    return cfg


def _write(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _rows(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [[float(x) for x in line.split(",")] for line in lines[1:]]


def test_threshold_dim3(capsys):
    assert cli.main(["threshold", "--dim", "3"]) == 0
    out = capsys.readouterr().out
    assert f"{2 * np.sqrt(2):.12f}"[:13] in out
    assert "Coulomb gamma = -3, same-species: admissible" in out
    assert "Coulomb gamma = -3, cross-species: inadmissible" in out


def test_threshold_dim2_and_invalid(capsys):
    assert cli.main(["threshold", "--dim", "2"]) == 0
    assert "Coulomb" not in capsys.readouterr().out
    assert cli.main(["threshold", "--dim", "1"]) == 1
    assert "error" in capsys.readouterr().err
    assert cli.main(["threshold"]) == 1


def test_sphere_check_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert cli.main(["sphere-check", "--dim", "3", "--symmetric", "--samples", "4", "--seed", "5", "--output", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = _rows(a)
    assert header == ["sample_id", "symmetric", "gamma_integral", "gamma2_integral", "ratio", "margin"]
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert all(r[1] == 1 and r[5] >= 0 for r in rows)
    assert cli.main(["sphere-check", "--dim", "2", "--samples", "2", "--seed", "1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3
    assert cli.main(["sphere-check", "--dim", "4", "--samples", "2"]) == 1


def test_simulate_writes_csv_and_snapshots(tmp_path):
    path = _write(tmp_path, _config())
    assert cli.main(["simulate", path]) == 0
    out = tmp_path / "output"
    header, rows = _rows(out / "diagnostics.csv")
    assert header == cli.csv_header(2, 2)
    assert header[:8] == ["t", "n_1", "n_2", "P_1", "P_2", "E", "rho", "u_1"]
    assert header[-1] == "clamped_mass"
    assert_allclose([r[0] for r in rows], [0.0, 0.01, 0.02, 0.03])
    col = {name: k for k, name in enumerate(header)}
    H = [r[col["H"]] for r in rows]
    assert np.all(np.diff(H) <= 0)
    for r in rows:
        assert_allclose(r[col["dI_decomp_total"]], r[col["dI_formula"]], rtol=1e-10)
        assert r[col["dH_formula"]] <= 0
    snaps = sorted(out.glob("snapshot_*.bin"))
    assert [p.name for p in snaps] == ["snapshot_00000000.bin", "snapshot_00000003.bin"]
    meta = json.loads(snaps[-1].with_suffix(".json").read_text())
    assert meta["shape"] == [2, 12, 12] and meta["order"] == "C" and meta["step"] == 3
    assert snaps[-1].stat().st_size == 8 * 2 * 12 * 12


def test_snapshot_round_trip(tmp_path):
    cfg = _config()
    species, grid, state, _ = cli.build_problem(cli.validate_config(cfg))
    path = cli.write_snapshot(tmp_path / "s.bin", state, 0)
    back = cli.read_snapshot(path, species, grid)
    assert np.array_equal(back.fields, state.fields)
    raw = np.fromfile(path, dtype="<f8").reshape(2, 12, 12)
    assert np.array_equal(raw, state.fields)


def test_zero_coupling_rows_are_constant(tmp_path):
    path = _write(tmp_path, _config(species__couplings=[[0.0, 0.0], [0.0, 0.0]]))
    assert cli.main(["simulate", path]) == 0
    lines = (tmp_path / "output" / "diagnostics.csv").read_text().splitlines()[1:]
    tails = {line.split(",", 1)[1] for line in lines}
    assert len(tails) == 1


def test_simulate_output_option(tmp_path):
    path = _write(tmp_path, _config())
    assert cli.main(["simulate", path, "--output", str(tmp_path / "elsewhere")]) == 0
    assert (tmp_path / "elsewhere" / "diagnostics.csv").exists()


@pytest.mark.parametrize(
    "cfg,pointer",
    [
        (_config(dim=4), "/dim"),
        (_config(grid={"points_per_axis": 4}), "/grid/points_per_axis"),
        (_config(grid={"points_per_axis": 13}), "/grid/points_per_axis"),
        (_config(run={"dt": -1.0, "t_end": 1.0}), "/run/dt"),
        (_config(species__masses=[1.0, -2.0]), "/species/masses/1"),
        (_config(species__couplings=[[1.0, 1.0]]), "/species/couplings"),
    ],
)
def test_invalid_configs_exit_1(tmp_path, capsys, cfg, pointer):
    assert cli.main(["simulate", _write(tmp_path, cfg)]) == 1
    assert f"error: {pointer}:" in capsys.readouterr().err


def test_exponent_outside_admissible_range(tmp_path, capsys):
    cfg = _config(
        dim=3,
        species__exponents=[[0.0, -6.0], [-6.0, 0.0]],
        initial=[[{"n": 1.0, "u": [0.0, 0.0, 0.0], "theta": 1.0}], [{"n": 1.0, "u": [0.0, 0.0, 0.0], "theta": 1.0}]],
    )
    assert cli.main(["simulate", _write(tmp_path, cfg)]) == 1
    err = capsys.readouterr().err
    assert "/species/exponents/0/1" in err and "exponent outside (-5, 1]" in err


def test_missing_and_malformed_files(tmp_path):
    assert cli.main(["simulate", str(tmp_path / "nope.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["simulate", str(bad)]) == 1


def test_blow_up_exits_2_with_partial_output(tmp_path, capsys):
    cfg = _config(species__couplings=[[1e200, 1e200], [1e200, 1e200]], run={"dt": 0.01, "t_end": 1.0, "scheme": "euler"})
    with np.errstate(over="ignore", invalid="ignore"):
        assert cli.main(["simulate", _write(tmp_path, cfg)]) == 2
    assert "numerical failure" in capsys.readouterr().err
    out = tmp_path / "output"
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "blow-up" and len(err["node"]) == 2
    lines = (out / "diagnostics.csv").read_text().splitlines()
    assert lines[0].startswith("t,") and len(lines) >= 2


def test_decompose(tmp_path, capsys):
    path = _write(tmp_path, _config())
    assert cli.main(["simulate", path]) == 0
    capsys.readouterr()
    snap = tmp_path / "output" / "snapshot_00000003.bin"
    assert cli.main(["decompose", path, str(snap)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "pair,D_par,D_rad,D_sph,R_sph,prefactor"
    assert [line.split(",")[0] for line in lines[1:4]] == ["11", "12", "22"]
    values = dict(line.split(",") for line in lines[4:])
    assert_allclose(float(values["dI_decomp_total"]), float(values["dI_formula"]), rtol=1e-10)
    # A snapshot from another grid is rejected.
    other = _write(tmp_path, _config(grid={"extent": 6.0, "points_per_axis": 16}), "other.json")
    assert cli.main(["decompose", other, str(snap)]) == 1


def test_worker_cap(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.WORKERS_ENV, "1")
    assert cli.main(["threshold", "--dim", "2"]) == 0
    for bad in ("0", "many"):
        monkeypatch.setenv(cli.WORKERS_ENV, bad)
        assert cli.main(["threshold", "--dim", "2"]) == 1
        assert cli.WORKERS_ENV in capsys.readouterr().err
