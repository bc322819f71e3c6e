import math

import numpy as np
import pytest
from scipy import special

from nirefocus import constants as C
from nirefocus.errors import ValidationError
from nirefocus.geometry import GeometryKind
from nirefocus.vibration import (Axis, NoiseSpec, PhysicalParams, coherence, coherence_closed_form,
                                 coherence_montecarlo, coherence_quadrature, loop_phase_lowfreq,
                                 loop_phases_exact, lowfreq_coefficients, noise_kinematics, phase_function)

P = PhysicalParams()


def test_default_kinematics():
    assert P.speed == pytest.approx(899.0986, rel=1e-6)
    assert math.degrees(P.bragg_angle) == pytest.approx(44.557, abs=1e-3)
    assert P.tau == pytest.approx(7.8045e-5, rel=1e-4)


def test_bragg_impossible():
    with pytest.raises(ValidationError, match="Bragg condition unsatisfiable"):
        PhysicalParams(wavelength=4.4e-10, d_spacing=1.92e-10)


def test_noise_kinematics_examples(rng):
    zero = noise_kinematics(NoiseSpec("y", 1e-7, 0.0, 0.3))
    assert zero == (0.0, 0.0, 0.0) or np.allclose(zero, 0)
    k = noise_kinematics(NoiseSpec("y", 1e-7, 50.0, math.pi / 2))
    assert abs(k.rate) < 1e-20
    assert k.rate_dot == pytest.approx(-1e-7 * 50**2)
    spec = NoiseSpec("y", 1e-7, 37.0, 0.4)
    h = 1e-6
    y = lambda t: spec.amplitude * np.sin(spec.omega * t + spec.varphi)
    for t in rng.uniform(0, 1, 10):
        numeric = (y(t + h) - y(t - h)) / (2 * h)
        assert noise_kinematics(spec, t).rate == pytest.approx(numeric, rel=1e-8)


def test_noise_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec("x", 1e-7, 1.0)
    with pytest.raises(ValidationError):
        NoiseSpec("y", -1.0, 1.0)
    with pytest.raises(ValidationError):
        NoiseSpec("y", 1.0, 1.0, 7.0)


def test_zero_amplitude_gives_zero_phases():
    ph = loop_phases_exact("five", NoiseSpec("y", 0.0, 100.0, 0.2))
    assert ph.total_sym == 0 and ph.total_anti == 0


def test_four_blade_total_is_sum_of_loops():
    spec = NoiseSpec("y", 1e-7, 80.0, 0.9)
    ph = loop_phases_exact("four", spec)
    k = noise_kinematics(spec)
    expected = 24 * P.mass * P.tau**3 / P.hbar * (P.v_parallel - k.rate) * k.rate_ddot
    assert ph.total_sym == pytest.approx(expected, rel=1e-12)
    assert ph.total_sym == pytest.approx(ph.dPhi1 + ph.dPhi2, rel=1e-12)


def test_lowfreq_anchor_values():
    sym, anti = loop_phase_lowfreq("three", NoiseSpec("y", 1e-7, 100.0, math.pi / 2))
    assert abs(sym) == pytest.approx(1.95287, rel=1e-4)
    assert anti is None
    _, anti = loop_phase_lowfreq("five", NoiseSpec("z", 1e-7, 4.4, math.pi / 2))
    assert abs(anti) == pytest.approx(0.0625555 * 4.4, rel=1e-4)


@pytest.mark.parametrize("kind,axis,branch", [("three", "y", "sym"), ("four", "y", "sym"), ("five", "y", "anti"),
                                              ("three", "z", "sym"), ("four", "z", "sym"), ("five", "z", "anti")])
@pytest.mark.parametrize("omega_tau", [1e-2, 1e-3])
def test_lowfreq_matches_exact_magnitude(kind, axis, branch, omega_tau):
    omega = omega_tau / P.tau
    grid = np.linspace(0, 2 * np.pi, 2001)
    exact = np.abs(phase_function(kind, axis, omega, P, branch=branch, model="exact")(grid)).max()
    low = np.abs(phase_function(kind, axis, omega, P, branch=branch)(grid)).max()
    assert abs(exact / low - 1) < (1e-2 if omega_tau == 1e-2 else 1e-3)


def test_symmetric_y_total_has_no_quadratic_term():
    # exact totals at varphi = pi/2 are odd-free polynomials in omega; the omega^2 term must vanish
    omegas = np.linspace(0.1, 1.0, 12) * 1e-3 / P.tau
    totals = [loop_phases_exact("four", NoiseSpec("y", 1e-7, w, 0.0)).total_sym for w in omegas]
    coef = np.polyfit(omegas, totals, 3)
    cubic = coef[0] * omegas.max() ** 3
    assert abs(coef[1] * omegas.max() ** 2) < 1e-6 * abs(cubic)


def test_closed_form_examples():
    for kind in GeometryKind:
        for axis in Axis:
            res = coherence_closed_form(kind, axis, 0.0)
            for r in res if isinstance(res, tuple) else (res,):
                assert r.gamma == 1
    _, anti = coherence_closed_form("five", "y", 100.0)
    assert 1 - anti.gamma.real == pytest.approx(0.224523, abs=1e-5)
    coef = lowfreq_coefficients("three", "y")["sym"][0]
    assert math.sqrt(special.jn_zeros(0, 1)[0] / coef) == pytest.approx(110.970, abs=1e-3)


def test_quadrature_examples():
    assert coherence_quadrature(lambda v: np.full_like(v, 0.7)).gamma == pytest.approx(np.exp(0.7j), abs=1e-12)
    for K in (0.3, 2.4, 7.5):
        assert abs(coherence_quadrature(lambda v: K * np.sin(v)).gamma - special.j0(K)) < 1e-9
        assert abs(coherence_quadrature(lambda v: K * np.cos(v)).gamma - special.j0(K)) < 1e-9


def test_montecarlo_examples():
    zero = coherence_montecarlo(lambda v: np.zeros_like(v), 1000)
    assert zero.gamma == 1 and zero.stderr == 0
    near = coherence_montecarlo(lambda v: 2.404825557695773 * np.sin(v), 1_000_000, seed=5)
    assert abs(near.gamma) < 3 * near.stderr
    a = coherence_montecarlo(lambda v: 3 * np.sin(v), 10_000, seed=9)
    b = coherence_montecarlo(lambda v: 3 * np.sin(v), 10_000, seed=9)
    assert a.gamma == b.gamma and a.stderr == b.stderr
    with pytest.raises(ValidationError):
        coherence_montecarlo(lambda v: v, 10)


def test_closed_form_equals_quadrature_up_to_first_zero():
    for kind in GeometryKind:
        for axis in Axis:
            coef, power, _ = lowfreq_coefficients(kind, axis)["sym"]
            top = (2.4048 / abs(coef)) ** (1 / power)
            for w in np.linspace(0, top, 15):
                q = coherence(kind, axis, w)
                c = coherence(kind, axis, w, method="closed_form")
                for b in q:
                    assert abs(q[b].gamma - c[b].gamma) < 1e-8


def test_montecarlo_agrees_with_quadrature(rng):
    for i in range(20):
        kind = rng.choice(list(GeometryKind))
        axis = rng.choice(["y", "z"])
        w = float(rng.uniform(0, 150))
        q = coherence(kind, axis, w)
        mc = coherence(kind, axis, w, method="monte_carlo", seed=i)
        for b in q:
            assert abs(mc[b].gamma - q[b].gamma) <= 3 * mc[b].stderr + 1e-12
            assert abs(mc[b].gamma) <= 1 + 1e-9


def test_unknown_method_and_model():
    with pytest.raises(ValidationError):
        coherence("three", "y", 1.0, method="simpson")
    with pytest.raises(ValidationError):
        coherence("three", "y", 1.0, model="guess")
    with pytest.raises(ValidationError):
        phase_function("three", "y", 1.0, branch="anti")
