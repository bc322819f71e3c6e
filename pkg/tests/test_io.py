import hashlib

import numpy as np
import pytest

from nirefocus.errors import ComparisonError, IngestionError
from nirefocus.io import MeasuredSeries, compare, read_measured, render_csv, write_table


def test_csv_format():
    text = render_csv({"x": [0.1, 2.0], "y": [1 / 3, 7]}, {"seed": 3, "note": "a"})
    assert text == "# seed: 3\n# note: a\nx,y\n0.10000000000000001,0.33333333333333331\n2,7\n"
    assert float(text.splitlines()[-2].split(",")[1]) == 1 / 3


def test_write_is_byte_deterministic(tmp_path):
    cols = {"omega": np.linspace(0, 1, 50), "g": np.sin(np.linspace(0, 1, 50))}
    digests = []
    for name in ("a.csv", "b.csv"):
        write_table(cols, {"version": "0.1.0"}, tmp_path / name)
        digests.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
    assert digests[0] == digests[1]
    assert b"\r" not in (tmp_path / "a.csv").read_bytes()


def test_read_measured_examples(tmp_path):
    good = tmp_path / "good.csv"
    good.write_text("# preamble\n# more\nx,y\n1,0.5\n2,0.6\n3,0.7\n")
    series = read_measured(good)
    assert len(series) == 3 and series.y_err is None
    with_err = tmp_path / "err.csv"
    with_err.write_text("x,y,y_err\n1,0.5,0.01\n")
    assert read_measured(with_err).y_err[0] == 0.01
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0.1,0.2\n0.5,abc\n")
    with pytest.raises(IngestionError, match="row 2") as info:
        read_measured(bad)
    assert info.value.row == 2
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x,y\n0.1,0.2,0.3\n")
    with pytest.raises(IngestionError, match="row 1"):
        read_measured(ragged)
    with pytest.raises(IngestionError):
        read_measured(tmp_path / "none.csv")


def test_compare_examples(rng):
    x = np.linspace(-10, 10, 41)
    sim = np.cos(x / 4) ** 2
    same = compare(MeasuredSeries(x, sim), x, sim)
    assert same.rms == 0 and same.max_abs == 0
    shifted = compare(MeasuredSeries(x, sim + 0.1), x, sim)
    assert shifted.rms == pytest.approx(0.1)
    noisy = compare(MeasuredSeries(x[::2], sim[::2] + rng.normal(0, 0.01, 21)), x, sim)
    assert 0.005 < noisy.rms < 0.02
    with pytest.raises(ComparisonError):
        compare(MeasuredSeries(x + 100, sim), x, sim)


def test_compare_drops_out_of_range_points():
    x = np.linspace(0, 1, 11)
    report = compare(MeasuredSeries(np.array([-1.0, 0.5, 2.0]), np.zeros(3)), x, x)
    assert report.dropped == 2 and report.x.tolist() == [0.5]
