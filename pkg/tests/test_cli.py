import numpy as np
import pytest

from planewave import cli
from planewave import kinematics as km
from planewave import slingshot as sl

FAST = ["--grid-n", "4000"]


@pytest.fixture(autouse=True)
def _cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        cli.main(["tabulate", "--bogus"])
    assert e.value.code == 64
    empty = tmp_path / "empty.cfg"
    empty.write_text("# nothing here\n")
    assert cli.main(["tabulate", "--config", str(empty)]) == 64
    assert cli.main(["tabulate", "--set", "colour=blue"]) == 64
    assert cli.main(["tabulate", "--set", "energy=lots"]) == 64
    assert cli.main(["tabulate", "--set", "noequals"]) == 64
    assert cli.main(["trajectory", "--set", "envelope=square"] + FAST) == 64
    assert cli.main(["slingshot", "--set", "energy=0"] + FAST) == 64
    assert "usage error" in capsys.readouterr().err


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nu = 2  # wider pancake\noffset_kind = fwhm_fraction\noffset_value = 0.19\n")
    assert cli.main(["density-solve", "--config", str(cfg), "--out", "d.txt"] + FAST) == 0
    kv = dict(line.split(" = ") for line in
              (l.split("  #")[0] for l in (tmp_path / "d.txt").read_text().splitlines()))
    m = sl.match_pulse_parameters(sl.LaserSpec(5e7, 8e-5, 7.5e-4, nu=2.0))
    l = sl.ionization_length(m.a_g, m.sigma)
    assert float(kv["xi1"]) == pytest.approx(l / 2 + 0.19 * 7.5e-4)


def test_tabulate_zero_density(tmp_path):
    assert cli.main(["tabulate", "--set", "K=0", "--out", "z"] + FAST) == 0
    for name in ("gaussian", "polynomial"):
        data = np.loadtxt(tmp_path / f"z_{name}.csv", delimiter=",", skiprows=1)
        assert np.all(data[:, -1] == 0)
        assert np.array_equal(data[:, 5], data[:, 6])


def test_tabulate_deterministic(tmp_path):
    assert cli.main(["tabulate", "--out", "a"] + FAST) == 0
    assert cli.main(["tabulate", "--out", "b"] + FAST) == 0
    assert (tmp_path / "a_polynomial.csv").read_bytes() == (tmp_path / "b_polynomial.csv").read_bytes()


def test_trajectory(tmp_path):
    assert cli.main(["trajectory", "--set", "labels=0,1", "--set", "x0_max=0.008",
                     "--set", "x0_n=401", "--out", "t.csv"] + FAST) == 0
    data = np.loadtxt(tmp_path / "t.csv", delimiter=",", skiprows=1)
    head = (tmp_path / "t.csv").read_text().splitlines()[0]
    assert head == ",".join(km.TRAJECTORY_COLUMNS)
    first, far = data[:401], data[401:]
    assert np.all(np.diff(first[:, 1]) >= -1e-15)
    # label Z = 1 cm never meets the pulse before x0 = 0.008 cm
    assert np.all(far[:, 1] == 1.0) and np.all(far[:, 4] == 1.0)
    m, l, _, poly = sl.matched_pulses(sl.FLAME)
    t = km.build_motion_tables(poly, km.default_grid(poly, 4000))
    assert first[-1, 1] == pytest.approx(float(t.Y3_at(t.grid.stop)), rel=1e-9)


def test_trajectory_csv_lossless(tmp_path):
    assert cli.main(["trajectory", "--set", "x0_n=51", "--out", "t.csv"] + FAST) == 0
    text = (tmp_path / "t.csv").read_text().splitlines()[1:]
    for line in text:
        for tok in line.split(","):
            assert repr(float(tok)) == tok


def test_slingshot_and_strict(tmp_path, capsys):
    assert cli.main(["slingshot", "--out", "r.txt"] + FAST) == 0
    assert "valid = " in (tmp_path / "r.txt").read_text()
    assert cli.main(["slingshot", "--n0", "1e21", "--strict", "--out", "r2.txt"] + FAST) == 2
    assert cli.main(["slingshot", "--n0", "1e21", "--out", "r3.txt"] + FAST) == 0


def test_validate_and_fault(capsys):
    assert cli.main(["validate"]) == 0
    assert "invariants hold" in capsys.readouterr().out
    assert cli.main(["validate", "--inject-fault"]) == 1
    assert "FAIL" in capsys.readouterr().out
