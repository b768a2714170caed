import csv
import json

import numpy as np
import pytest

from zenochain.cli import EXIT_INVALID, EXIT_NOT_UNIQUE, main


def write_config(tmp_path, **cfg):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_evolve_outputs(tmp_path):
    cfg = write_config(tmp_path, n_chain=9, gamma=1.0, tau=1.0, n_steps=50, snapshots=[4, 50])
    out = tmp_path / "out"
    assert main(["evolve", "--config", cfg, "--out", str(out)]) == 0

    rows = read_csv(out / "trajectory.csv")
    assert rows[0] == ["step", "time", "survival", "offdiag_avg"] + [f"diag_{i}" for i in range(10)]
    assert len(rows) == 52
    last = [float(x) for x in rows[-1]]
    assert last[0] == 50 and last[2] == last[4]

    snap = np.array(read_csv(out / "rho_snapshot_50.csv"), dtype=float)
    assert snap.shape == (10, 20)
    rho = snap[:, :10] + 1j * snap[:, 10:]
    np.testing.assert_allclose(np.diag(rho).real, 0.1, atol=2e-2)
    off = rho - np.diag(np.diag(rho))
    assert np.abs(off).max() < 2e-2
    assert (out / "rho_snapshot_4.csv").exists()

    meta = json.loads((out / "meta.json").read_text())
    assert meta["command"] == "evolve" and meta["epsilons"] == [0.0] * 9


def test_outputs_are_byte_identical_and_meta_round_trips(tmp_path):
    cfg = write_config(tmp_path, n_chain=4, gamma=1.0, epsilons="random", seed=3, tau=1.0, n_steps=30, snapshots=[30])
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["evolve", "--config", cfg, "--out", str(a)]) == 0
    assert main(["evolve", "--config", cfg, "--out", str(b)]) == 0
    assert main(["evolve", "--config", str(a / "meta.json"), "--out", str(c)]) == 0
    for name in ("trajectory.csv", "rho_snapshot_30.csv", "meta.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()
    meta = json.loads((a / "meta.json").read_text())
    assert meta["epsilon_seed"] == 3 and len(meta["epsilons"]) == 4


def test_seventeen_significant_digits(tmp_path):
    cfg = write_config(tmp_path, n_chain=2, gamma=0.7, tau=0.3, n_steps=2)
    main(["evolve", "--config", cfg, "--out", str(tmp_path)])
    survival = read_csv(tmp_path / "trajectory.csv")[2][2]
    u = float(survival)
    assert format(u, ".17g") == survival


@pytest.mark.parametrize(
    "cfg",
    [
        dict(n_chain=3, tau=1.0, n_steps=0),
        dict(n_chain=3, n_steps=5),
        dict(n_chain=3, tau=1.0, n_steps=5, tau_grid=dict(start=0.1, stop=1, count=3)),
        dict(n_chain=0, tau=1.0, n_steps=5),
        dict(n_chain=3, tau=1.0, n_steps=5, epsilons=[0.1]),
        dict(n_chain=3, tau=1.0, n_steps=5, bogus=1),
    ],
)
def test_invalid_configs_rejected(tmp_path, capsys, cfg):
    out = tmp_path / "out"
    assert main(["evolve", "--config", write_config(tmp_path, **cfg), "--out", str(out)]) == EXIT_INVALID
    assert "error" in capsys.readouterr().err
    assert not out.exists() or not any(out.iterdir())


def test_empty_grid_rejected(tmp_path):
    cfg = write_config(tmp_path, n_chain=3, tau_grid=dict(start=0.1, stop=1.0, count=0))
    assert main(["rate-scan", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_INVALID


def test_tomography_needs_snapshots(tmp_path):
    cfg = write_config(tmp_path, n_chain=3, tau=1.0, n_steps=5)
    assert main(["tomography", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_INVALID


def test_rate_scan(tmp_path):
    grid = dict(start=0.05, stop=3.0, count=12, spacing="log", scaled=True)
    cfg = write_config(tmp_path, n_chain=9, gamma=1.0, tau_grid=grid, workers=2)
    assert main(["rate-scan", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "rates.csv")
    assert rows[0] == ["tau", "tau_tilde", "lambda1_modulus", "gamma_rate", "raw_rate", "flags"]
    tt = np.array([float(r[1]) for r in rows[1:]])
    np.testing.assert_allclose(tt, np.geomspace(0.05, 3.0, 12), rtol=1e-12)
    rate = np.array([float(r[3]) for r in rows[1:]])
    small = tt < 0.4
    assert np.all(np.diff(rate[small]) > 0)


def test_rate_scan_decoupled_rows_flagged(tmp_path):
    cfg = write_config(tmp_path, n_chain=3, gamma=0.0, tau_grid=dict(start=0.5, stop=2.0, count=4))
    assert main(["rate-scan", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "rates.csv")[1:]
    assert len(rows) == 4 and all("degenerate_unit_eigenspace" in r[5] for r in rows)


@pytest.mark.parametrize(
    "cfg, status, unique",
    [
        (dict(n_chain=9, gamma=1.0, tau=1.0), 0, True),
        (dict(n_chain=5, gamma=0.0, tau=1.0), EXIT_NOT_UNIQUE, False),
        (dict(n_chain=1, gamma=1.0, tau=2 * np.pi), EXIT_NOT_UNIQUE, False),
    ],
)
def test_check_stationary(tmp_path, cfg, status, unique):
    assert main(["check-stationary", "--config", write_config(tmp_path, **cfg), "--out", str(tmp_path)]) == status
    report = json.loads((tmp_path / "stationarity.json").read_text())
    assert report["unique"] is unique
    assert report["has_invariant_chain_state"] is (not unique)
    if unique:
        assert report["max_deviation_from_uniform"] < 1e-8


def test_spectrum(tmp_path):
    cfg = write_config(tmp_path, n_chain=3, gamma=0.8, tau=1.2)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert len(rows) == 1 + 16
    assert float(rows[1][3]) == pytest.approx(1.0)
    info = json.loads((tmp_path / "spectrum.json").read_text())
    assert info["unit_eigenspace_dimension"] == 1 and info["flags"] == []


def test_two_level(tmp_path):
    cfg = write_config(tmp_path, n_chain=1, gamma=1.0, epsilons=[0.4], tau=0.9, n_steps=40)
    assert main(["two-level", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "two_level.csv")[1:]
    assert max(float(r[4]) for r in rows) <= 1e-12


def test_two_level_needs_single_site(tmp_path):
    cfg = write_config(tmp_path, n_chain=2, gamma=1.0, tau=0.9, n_steps=4)
    assert main(["two-level", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_INVALID
