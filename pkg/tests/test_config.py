import math

import pytest
from hypothesis import given, settings, strategies as st

from nirefocus.config import CONFIG_ENV, RunConfig, emit_config, load_config, parse_config
from nirefocus.errors import ParseError, ValidationError


def test_empty_document_gives_defaults():
    c = parse_config("")
    assert c == RunConfig()
    assert c.L == 0.05
    assert c.wavelength == pytest.approx(4.4e-10)
    assert c.reflection == "Si111"


def test_units_and_comments():
    c = parse_config("L = 5 cm  # blade separation\nwavelength = 4.4 angstrom\ny_amplitude = 0.1 um\n"
                     "theta_amplitude = 0.1 urad\ndd_thickness = 1mm\nwidth = 4.26 urad\n")
    assert c.L == pytest.approx(0.05)
    assert c.y_amplitude == pytest.approx(1e-7)
    assert c.theta_amplitude == pytest.approx(1e-7)
    assert c.dd_thickness == pytest.approx(1e-3)


def test_bragg_impossible_names_line():
    with pytest.raises(ParseError, match="Bragg condition unsatisfiable") as info:
        parse_config("# comment\nwavelength = 4.4 angstrom\nreflection = Si220\n")
    assert info.value.line == 3


@pytest.mark.parametrize("text,line", [("L = 5 cm\nfoo = 1\n", 2), ("L = 5 furlongs", 1), ("L = five cm", 1),
                                       ("just words", 1), ("L = 1 cm\nL = 2 cm", 2), ("mc_samples = 10", 1)])
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_omega_unit_hz():
    c = parse_config("omega_unit = hz")
    assert c.omega_factor == pytest.approx(2 * math.pi)


lengths = st.floats(1e-3, 1.0, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(lengths, st.floats(1.0, 6.0), st.integers(0, 2**31), st.booleans(), st.sampled_from(["hz", "rad/s"]),
       st.one_of(st.none(), st.floats(3.2, 5.0)))
def test_round_trip(L, lam, seed, fwhm, unit, d):
    c = RunConfig(L=L, wavelength=lam * 1e-10, seed=seed, width_is_fwhm=fwhm, omega_unit=unit,
                  d_spacing=None if d is None else d * 1e-10, reflection="Si111" if d is None else None)
    assert parse_config(emit_config(c)) == c


def test_env_var_default_path(tmp_path, monkeypatch):
    path = tmp_path / "run.cfg"
    path.write_text("L = 7 cm\n")
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert load_config().L == pytest.approx(0.07)
    monkeypatch.delenv(CONFIG_ENV)
    assert load_config() == RunConfig()
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.cfg")
