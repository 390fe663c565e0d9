import csv
import subprocess
import sys

import numpy as np
import pytest

from kernelspde import cli, reference

SMALL = ["--paths", "4", "--steps", "5", "--interior-points", "5", "--workers", "1"]


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_defaults():
    cfg = cli.parse_config(["heat-spde"])
    assert (cfg.m, cfg.theta, cfg.n_interior, cfg.T, cfg.steps) == (3, 26.5, 58, 1.0, 800)
    assert (cfg.noise, cfg.sigma, cfg.paths, cfg.seed, cfg.panels, cfg.nodes) == ("r1", 1.0, 1000, 0, 64, 10)


def test_flags_override_config_file(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# comment\nsteps = 40\nseed = 9\ninterior-points = 12  # trailing\n")
    cfg = cli.parse_config(["converge", "--config", str(conf), "--seed", "3"])
    assert (cfg.steps, cfg.seed, cfg.n_interior, cfg.subcommand) == (40, 3, 12, "converge")


@pytest.mark.parametrize("argv", [
    ["heat-spde", "--sigma", "-1"],
    ["heat-spde", "--noise", "r3"],
    ["heat-spde", "--paths", "1"],
    ["heat-spde", "--steps", "0"],
    ["heat-spde", "--levels", "9-50"],
    ["heat-spde", "--seed", "abc"],
    ["heat-spde", "--config", "/nonexistent/file.cfg"],
])
def test_bad_config_exit_1(argv, capsys):
    assert cli.main(argv) == 1
    assert "config error" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "bad.cfg"
    conf.write_text("stepz = 4\n")
    assert cli.main(["heat-spde", "--config", str(conf)]) == 1
    assert "stepz" in capsys.readouterr().err


def test_missing_subcommand_exit_1():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_unwritable_output_exit_2(capsys):
    assert cli.main(["heat-spde", *SMALL, "--output", "/nonexistent/dir/out.csv"]) == 2
    assert "I/O error" in capsys.readouterr().err


def test_numerical_failure_exit_3(monkeypatch, capsys):
    def boom(*a, **k):
        raise np.linalg.LinAlgError("forced")

    monkeypatch.setattr(cli.spde, "run_ensemble", boom)
    assert cli.main(["heat-spde", *SMALL]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_heat_csv_shape_and_oracle_columns(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert cli.main(["heat-spde", *SMALL, "--noise", "r2", "--sigma", "0.5", "--output", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["t", "x", "sample_mean", "sample_var", "exact_mean", "exact_var"]
    assert data.shape == (5 * 5, 6)
    oracle = reference.SpectralHeatSolution(roughness=2, sigma=0.5)
    t, x = data[:, 0], data[:, 1]
    np.testing.assert_allclose(data[:, 4], reference.exact_mean(oracle, t, x), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(data[:, 5], reference.exact_var(oracle, t, x), rtol=1e-12, atol=1e-18)
    np.testing.assert_allclose(np.unique(t), np.arange(1, 6) / 5)
    err = capsys.readouterr().err
    assert "master seed 0" in err and "theta=26.5" in err


def test_output_stride(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["heat-spde", *SMALL, "--output-stride", "2", "--output", str(out)]) == 0
    _, data = read_csv(out)
    np.testing.assert_allclose(np.unique(data[:, 0]), [0.4, 0.8])


def test_byte_identical_reruns_and_workers(tmp_path):
    paths = []
    for i, workers in enumerate(("1", "1", "3")):
        out = tmp_path / f"r{i}.csv"
        argv = ["heat-spde", "--paths", "6", "--steps", "4", "--interior-points", "5",
                "--seed", "77", "--workers", workers, "--output", str(out)]
        assert cli.main(argv) == 0
        paths.append(out.read_bytes())
    assert paths[0] == paths[1] == paths[2]
    other = tmp_path / "other.csv"
    cli.main(["heat-spde", "--paths", "6", "--steps", "4", "--interior-points", "5",
              "--seed", "78", "--output", str(other)])
    assert other.read_bytes() != paths[0]


def test_converge_table(tmp_path):
    out = tmp_path / "c.csv"
    argv = ["converge", "--paths", "4", "--levels", "5:5,9:10,19:20", "--output", str(out)]
    assert cli.main(argv) == 0
    header, data = read_csv(out)
    assert header == ["h", "dt", "rmse_mean", "rmse_var", "max_sigma"]
    assert data.shape == (3, 5)
    assert np.all(np.diff(data[:, 0]) < 0) and np.all(np.diff(data[:, 1]) < 0)
    assert np.all(np.diff(data[:, 4]) < 0)


def test_converge_needs_two_levels(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert cli.main(["converge", "--paths", "4", "--levels", "5:5", "--output", str(out)]) == 1
    assert "at least 2" in capsys.readouterr().err


def test_elliptic_and_interpolate(tmp_path):
    out = tmp_path / "e.csv"
    assert cli.main(["elliptic", "--interior-points", "19", "--output", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["x", "estimate", "exact", "sigma"]
    assert np.max(np.abs(data[:, 1] - data[:, 2])) < 0.05
    out = tmp_path / "i.csv"
    assert cli.main(["interpolate", "--interior-points", "19", "--output", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["x", "interpolant", "target"]
    assert np.max(np.abs(data[:, 1] - data[:, 2])) < 0.05


def test_stdout_and_module_entry():
    proc = subprocess.run([sys.executable, "-m", "kernelspde", "heat-spde", *SMALL],
                          capture_output=True, text=True, check=True)
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "t,x,sample_mean,sample_var,exact_mean,exact_var" and len(lines) == 26
    assert "master seed" in proc.stderr
