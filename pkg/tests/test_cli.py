import hashlib
import math

import numpy as np
import pytest

from nirefocus import cli
from nirefocus.config import CONFIG_ENV


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_sweep_z(capsys):
    code, out, _ = run(capsys, "sweep", "--geometry", "all", "--axis", "z", "--omega", "0:20:400")
    assert code == 0
    header, data = table(out)
    assert header == ["omega", "gamma_abs_3", "gamma_abs_4", "gamma_abs_5"]
    assert data.shape == (21, 4)
    assert np.all(data[0, 1:] == 1)


def test_sweep_hz_flag(capsys):
    _, out, _ = run(capsys, "sweep", "--geometry", "3", "--omega", "0,10", "--hz")
    header, data = table(out)
    assert header[:2] == ["frequency_hz", "omega"]
    assert data[1, 1] == pytest.approx(20 * math.pi)


def test_refocus_columns_and_metadata(capsys):
    code, out, _ = run(capsys, "refocus", "--omega", "0,100,150,200", "--points", "64")
    assert code == 0
    header, data = table(out)
    assert header == ["phi", "intensity_omega_0", "intensity_omega_100", "intensity_omega_150", "intensity_omega_200"]
    assert "# background_omega_100: 0.2245" in out


def test_ddcontrast_single_row(capsys):
    code, out, _ = run(capsys, "ddcontrast", "--geometry", "4", "--thickness", "1mm", "--lambda", "2.71angstrom")
    assert code == 0
    header, data = table(out)
    assert data.shape == (1, len(header))
    assert data[0, header.index("contrast")] == pytest.approx(0.038272524856910274, abs=1e-8)


def test_other_subcommands_run(capsys, tmp_path):
    assert run(capsys, "densitymap", "--omega", "100", "--grid-n", "16")[0] == 0
    assert run(capsys, "interferogram", "--geometry", "5", "--omega", "100", "--chi", "1")[0] == 0
    code, out, _ = run(capsys, "ddscan", "--center=-2:2:2")
    assert code == 0 and table(out)[1].shape == (3, 3)


def test_compare_subcommand(capsys, tmp_path):
    sim = tmp_path / "sim.csv"
    assert cli.main(["sweep", "--geometry", "3", "--omega", "0:10:200", "-o", str(sim)]) == 0
    meas = tmp_path / "meas.csv"
    meas.write_text("# measured\nx,y\n0,1.1\n100,0.35\n")
    code, out, err = run(capsys, "compare", str(meas), str(sim), "--x-col", "omega", "--y-col", "gamma_abs_3")
    assert code == 0 and "rms=" in err
    header, data = table(out)
    assert header == ["x", "measured", "simulated", "residual"]
    assert data[0, 3] == pytest.approx(0.1)


def test_output_bytes_are_deterministic(tmp_path):
    digests = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        assert cli.main(["sweep", "--axis", "y", "--omega", "0:25:400", "--method", "monte_carlo", "--seed", "4",
                         "--output", str(path)]) == 0
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_json_format(capsys):
    import json
    _, out, _ = run(capsys, "sweep", "--geometry", "4", "--omega", "0,50", "--format", "json")
    doc = json.loads(out)
    assert doc["columns"]["gamma_abs_4"][0] == 1


def test_exit_codes(capsys, tmp_path, monkeypatch):
    assert run(capsys, "sweep", "--omega", "0:1")[0] == 1
    assert run(capsys, "nosuchcommand")[0] == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("wavelength = 4.4 angstrom\nreflection = Si220\n")
    code, _, err = run(capsys, "sweep", "--config", str(bad))
    assert code == 1 and "line 2" in err
    monkeypatch.setenv(CONFIG_ENV, str(bad))
    assert run(capsys, "sweep", "--omega", "0")[0] == 1
    monkeypatch.delenv(CONFIG_ENV)
    meas = tmp_path / "m.csv"
    meas.write_text("x,y\n0.5,abc\n")
    assert run(capsys, "compare", str(meas), str(meas))[0] == 1
    code, _, err = run(capsys, "ddcontrast", "--tol", "1e-300")
    assert code == 2 and "accepted_intervals" in err


def test_set_override(capsys):
    _, out, _ = run(capsys, "sweep", "--geometry", "3", "--omega", "100", "--set", "L=7 cm")
    assert "# config.L: 0.070000000000000007" in out


def test_selftest_prints_table(capsys):
    code, out, _ = run(capsys, "selftest")
    lines = out.strip().splitlines()
    assert len(lines) == 11
    assert all(ln.startswith(("[PASS]", "[FAIL]")) for ln in lines[:10])
    assert code == (0 if lines[-1].startswith("10/10") else 1)
