import math

import numpy as np
import pytest

from nirefocus.analysis import (DensityMap, Interferogram, averaged_interferogram, coherence_sweep, contrast,
                                density_map, fit_fringe, five_blade_h, refocused_interferogram)
from nirefocus.errors import UndefinedContrastError, ValidationError
from nirefocus.geometry import GeometryKind, closed_form_intensity
from nirefocus.vibration import coherence

PHI = np.linspace(0, 2 * np.pi, 720)


def test_contrast_examples():
    assert contrast((PHI, 0.5 * (1 + np.cos(PHI)))) == pytest.approx(1.0, abs=1e-4)
    assert contrast((PHI, np.full_like(PHI, 0.3))) == 0
    curve = 0.25 * (2 - 0.78 + np.cos(2 * PHI))
    assert contrast((PHI, curve)) == pytest.approx(1 / (2 - 0.78), abs=1e-6)
    with pytest.raises(UndefinedContrastError):
        contrast((PHI, np.zeros_like(PHI)))


def test_contrast_of_offset_sinusoid():
    for a, b in ((0.5, 0.2), (0.4, 0.05), (0.6, 0.39)):
        assert contrast((PHI, a + b * np.cos(PHI + 0.3))) == pytest.approx(b / a, abs=1e-6)


def test_interferogram_validation():
    with pytest.raises(ValidationError):
        Interferogram(np.array([0.0, 0.0]), np.array([0.5, 0.5]), "O")
    with pytest.raises(ValidationError):
        Interferogram(np.array([0.0, 1.0]), np.array([0.5, 1.5]), "O")
    with pytest.raises(ValidationError):
        Interferogram(np.array([0.0, 1.0]), np.array([0.5, 0.5]), "X")


@pytest.mark.parametrize("kind", list(GeometryKind))
def test_zero_noise_reduces_to_closed_form(kind):
    for port, idx in (("O", 0), ("H", 1)):
        curve = averaged_interferogram(kind, "y", 0.0, port=port, phase_grid=PHI, chi=0.9)
        np.testing.assert_allclose(curve.intensity, closed_form_intensity(kind, PHI, 0.9)[idx], atol=1e-12)


def test_four_blade_h_port_form():
    curve = averaged_interferogram("four", "y", 150.0, port="H", phase_grid=PHI)
    g = coherence("four", "y", 150.0)["sym"].gamma
    assert abs(g.imag) < 1e-12
    np.testing.assert_allclose(curve.intensity, 0.5 * (1 + g.real * np.cos(PHI)), atol=1e-12)


def test_three_blade_z_visibility():
    curve = averaged_interferogram("three", "z", 4.4)
    assert contrast(curve) == pytest.approx(0.925663, abs=1e-5)


@pytest.mark.parametrize("kind", ["three", "four"])
@pytest.mark.parametrize("omega", [30.0, 90.0, 160.0])
def test_contrast_equals_gamma(kind, omega):
    curve = averaged_interferogram(kind, "y", omega, port="O" if kind == "three" else "H")
    assert contrast(curve) == pytest.approx(curve.metadata["gamma_abs"], abs=1e-6)


def test_refocused_examples():
    quiet = refocused_interferogram(PHI, omega=0.0)
    assert quiet.metadata["dc_shift"] == pytest.approx(0, abs=1e-15)
    assert quiet.intensity.min() == pytest.approx(0, abs=1e-5)
    assert quiet.intensity.max() == pytest.approx(0.5, abs=1e-5)
    noisy = refocused_interferogram(PHI, omega=100.0)
    assert noisy.metadata["background"] == pytest.approx(0.2245, abs=1e-4)
    assert noisy.metadata["dc_shift"] == pytest.approx(noisy.metadata["background"] / 4)
    assert contrast(noisy) == pytest.approx(noisy.metadata["relative_contrast"], abs=1e-6)
    assert noisy.metadata["modulation_depth"] >= 0.999


def test_refocused_equals_map_line():
    for omega in (0.0, 120.0, 230.0):
        m = density_map(omega, 64)
        r = refocused_interferogram(m.phi_grid, omega=omega)
        _, line = m.line(math.pi, -1)
        assert np.abs(line - r.intensity).max() < 1e-12


def test_density_map_examples():
    m = density_map(0.0, 64)
    assert m.values.min() == pytest.approx(0, abs=1e-12)
    assert m.values.max() == pytest.approx(1, abs=1e-12)
    for mu in (0.0, math.pi / 2):
        for slope in (1, -1):
            _, line = m.line(mu, slope)
            assert np.ptp(line) == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(five_blade_h(m.phi_grid[:, None] + 2 * np.pi, m.chi_grid[None, :],
                                            m.metadata["gamma"], m.metadata["gamma_prime"]), m.values, atol=1e-12)
    with pytest.raises(ValidationError):
        density_map(0.0, 8)


def test_dfs_line_depth_and_damping():
    base = fit_fringe(*density_map(0.0, 128).line(math.pi))
    for omega in (100.0, 200.0):
        m = density_map(omega, 128)
        a, b, _ = fit_fringe(*m.line(math.pi))
        assert abs(b - base[1]) < 1e-3
        assert a != pytest.approx(base[0], abs=1e-3)
        _, b_sym, _ = fit_fringe(*m.line(0.0, 1))
        assert 4 * b_sym == pytest.approx(m.metadata["gamma_prime_abs"], abs=1e-12)


def test_montecarlo_map_converges():
    q = density_map(150.0, 32)
    for n in (10_000, 1_000_000):
        mc = density_map(150.0, 32, method="monte_carlo", n=n, seed=3)
        assert np.abs(mc.values - q.values).max() < 3 * mc.metadata["stderr"]


def test_fit_fringe_requires_points():
    with pytest.raises(ValidationError):
        fit_fringe(PHI[:10], PHI[:10])


def test_sweep_examples():
    omega = np.linspace(0, 250, 126)
    y = coherence_sweep({"3", "4", "5"}, "y", omega)
    assert list(y.gamma_abs) == list(GeometryKind)
    for k in GeometryKind:
        assert y.gamma_abs[k][0] == 1
    assert y.gamma_abs[GeometryKind.FOUR].min() >= 0.99
    np.testing.assert_array_equal(y.gamma_abs[GeometryKind.FOUR], y.gamma_abs[GeometryKind.FIVE])
    z = coherence_sweep(["3"], "z", np.linspace(0, 5, 11))
    assert z.gamma_abs[GeometryKind.THREE].min() <= 0.95


def test_sweep_threads_are_deterministic():
    omega = np.linspace(0, 300, 31)
    a = coherence_sweep(["3", "5"], "z", omega, threads=1)
    b = coherence_sweep(["3", "5"], "z", omega, threads=4)
    for k in a.gamma_abs:
        np.testing.assert_array_equal(a.gamma_abs[k], b.gamma_abs[k])
