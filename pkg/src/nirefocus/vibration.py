"""Sinusoidal mechanical noise: loop phases and coherence functions.

Two noise classes are modelled, both sinusoidal with a uniformly random
arrival phase ``varphi``:

* y-noise, translation along the reciprocal lattice vector,
  ``y(t) = y0 sin(omega t + varphi)``;
* z-noise, rotation about the axis normal to the interference plane,
  ``theta(t) = theta0 sin(omega t + varphi)``.

``omega`` is an angular frequency in rad/s throughout.

Each geometry has an exact loop-phase expression (evaluated at the entry
time t = 0) and a low-frequency (omega tau << 1) limit. The limits are kept
exactly in their published form, signs included. Some of them differ from the exact
expressions by a sign or a quarter period in ``varphi``. That changes
neither |gamma| nor any ``varphi``-averaged observable.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import constants as C
from .errors import ValidationError
from .geometry import GeometryKind
from .quadrature import adaptive_gk
from .special import bessel_j0

TWO_PI = 2 * math.pi


class Axis(enum.Enum):
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown noise axis {value!r} (expected y or z)") from None


@dataclass(frozen=True)
class PhysicalParams:
    """Neutron/interferometer parameters. Derived kinematics are properties."""

    wavelength: float = C.DEFAULT_WAVELENGTH
    d_spacing: float = C.DEFAULT_D_SPACING
    L: float = C.DEFAULT_BLADE_SEPARATION
    mass: float = C.NEUTRON_MASS
    hbar: float = C.HBAR
    planck: float = C.PLANCK

    def __post_init__(self):
        for name in ("wavelength", "d_spacing", "L", "mass", "hbar", "planck"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive and finite, got {value!r}")
        ratio = self.wavelength / (2 * self.d_spacing)
        if not 0 < ratio < 1:
            raise ValidationError(
                f"Bragg condition unsatisfiable: lambda/2d = {ratio:.4f} is not in (0, 1)"
            )

    @property
    def speed(self):
        return self.planck / (self.mass * self.wavelength)

    @property
    def bragg_angle(self):
        return math.asin(self.wavelength / (2 * self.d_spacing))

    @property
    def v_parallel(self):
        return self.speed * math.sin(self.bragg_angle)

    @property
    def v_perp(self):
        return self.speed * math.cos(self.bragg_angle)

    @property
    def tau(self):
        return self.L / self.v_perp


@dataclass(frozen=True)
class NoiseSpec:
    axis: Axis
    amplitude: float  # m for Y, rad for Z
    omega: float  # rad/s
    varphi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis.parse(self.axis))
        if not self.amplitude >= 0:
            raise ValidationError("noise amplitude must be >= 0")
        if not self.omega >= 0:
            raise ValidationError("omega must be >= 0")
        if not 0 <= self.varphi < TWO_PI:
            raise ValidationError("varphi must lie in [0, 2 pi)")


class Kinematics(NamedTuple):
    """First three time derivatives of the displacement.

    For y-noise these are (u, u_dot, u_ddot); for z-noise
    (theta_dot, theta_ddot, theta_dddot).
    """

    rate: float
    rate_dot: float
    rate_ddot: float


def noise_kinematics(spec, t=0.0, varphi=None):
    """Derivatives of ``amplitude * sin(omega t + varphi)`` at time ``t``.

    ``varphi`` overrides ``spec.varphi`` and may be an array.
    """
    a, w = spec.amplitude, spec.omega
    arg = w * np.asarray(t) + (spec.varphi if varphi is None else np.asarray(varphi))
    c, s = np.cos(arg), np.sin(arg)
    return Kinematics(a * w * c, -a * w**2 * s, -a * w**3 * c)


@dataclass(frozen=True)
class LoopPhases:
    """Per-loop phase differences. Three-blade fills only ``total_sym``."""

    total_sym: float
    dPhi1: Optional[float] = None
    dPhi2: Optional[float] = None
    dPhi2_anti: Optional[float] = None
    total_anti: Optional[float] = None


def _exact_terms(kind, spec, params, varphi):
    """(dPhi1, dPhi2, dPhi2_anti, three_blade_total) at entry time t = 0."""
    m, hb, tau, L = params.mass, params.hbar, params.tau, params.L
    v = params.v_parallel
    k = noise_kinematics(spec, 0.0, varphi)
    if spec.axis is Axis.Y:
        u, ud, udd = k
        common = 4 * m * tau**2 / hb * (v - u)
        three = 32 * m * tau**2 / hb * (v - u) * ud
        d1 = -common * (2 * ud + tau * udd)
        d2 = common * (2 * ud + 7 * tau * udd)
        # the velocity term enters as 2 du_y/dt(0)
        d2a = -common * (2 * ud + 3 * tau * udd)
    else:
        td, tdd, _ = k
        common = 8 * m * tau / hb * (v - 2 * L * td)
        three = 32 * m * tau / hb * (v - 2 * L * td) * L * td
        d1 = common * (L * td - L * tau * tdd)
        d2 = -common * (L * td + 5 * L * tau * tdd)
        d2a = common * (L * td + L * tau * tdd)
    return d1, d2, d2a, three


def loop_phases_exact(kind, spec, params=PhysicalParams()):
    """Exact loop phases for a neutron entering at t = 0 with arrival phase ``spec.varphi``.

    The five-blade symmetric loops equal the four-blade loops; the
    antisymmetric branch shares loop 1 and has its own loop-2 phase.
    """
    kind = GeometryKind.parse(kind)
    d1, d2, d2a, three = (float(x) for x in _exact_terms(kind, spec, params, spec.varphi))
    if kind is GeometryKind.THREE:
        return LoopPhases(total_sym=three)
    if kind is GeometryKind.FOUR:
        return LoopPhases(total_sym=d1 + d2, dPhi1=d1, dPhi2=d2)
    return LoopPhases(total_sym=d1 + d2, dPhi1=d1, dPhi2=d2, dPhi2_anti=d2a, total_anti=d1 + d2a)


def lowfreq_coefficients(kind, axis, params=PhysicalParams(), amplitude=None):
    """Printed low-frequency phases as ``(coef, power, trig)`` per branch.

    The phase is ``coef * omega**power * trig(varphi)``; ``abs(coef)`` is the
    Omega prefactor in gamma = J0(Omega omega**power). Returns a dict with
    key ``"sym"`` and, for the five-blade geometry, ``"anti"``.
    """
    kind, axis = GeometryKind.parse(kind), Axis.parse(axis)
    if amplitude is None:
        amplitude = C.DEFAULT_Y_AMPLITUDE if axis is Axis.Y else C.DEFAULT_THETA_AMPLITUDE
    m, hb, tau = params.mass, params.hbar, params.tau
    vpar, vperp = params.v_parallel, params.v_perp
    if axis is Axis.Y:
        three = (32 * m * vpar * amplitude * tau**2 / hb, 2, np.sin)
        sym = (24 * m * vpar * amplitude * tau**3 / hb, 3, np.cos)
        anti = (16 * m * vpar * amplitude * tau**2 / hb, 2, np.sin)
    else:
        base = m * vperp * vpar * amplitude / hb
        three = (32 * base * tau**2, 1, np.cos)
        sym = (-48 * base * tau**3, 2, np.sin)
        anti = (16 * base * tau**2, 1, np.sin)
    if kind is GeometryKind.THREE:
        return {"sym": three}
    if kind is GeometryKind.FOUR:
        return {"sym": sym}
    return {"sym": sym, "anti": anti}


def loop_phase_lowfreq(kind, spec, params=PhysicalParams()):
    """(total_sym, total_anti) from the omega tau << 1 limit formulas.

    ``total_anti`` is None except for the five-blade geometry.
    """
    coefs = lowfreq_coefficients(kind, spec.axis, params, spec.amplitude)
    out = []
    for branch in ("sym", "anti"):
        if branch not in coefs:
            out.append(None)
            continue
        coef, power, trig = coefs[branch]
        out.append(float(coef * spec.omega**power * trig(spec.varphi)))
    return tuple(out)


def phase_function(kind, axis, omega, params=PhysicalParams(), amplitude=None, branch="sym", model="lowfreq"):
    """Vectorized ``varphi -> Delta Phi(varphi)`` for one geometry and branch.

    ``model`` is ``"lowfreq"`` (published limits) or ``"exact"``; ``branch`` is
    ``"sym"`` or ``"anti"`` (five-blade only).
    """
    kind, axis = GeometryKind.parse(kind), Axis.parse(axis)
    if amplitude is None:
        amplitude = C.DEFAULT_Y_AMPLITUDE if axis is Axis.Y else C.DEFAULT_THETA_AMPLITUDE
    if branch == "anti" and kind is not GeometryKind.FIVE:
        raise ValidationError("the antisymmetric branch exists only for the five-blade geometry")
    if branch not in ("sym", "anti"):
        raise ValidationError(f"unknown branch {branch!r}")
    if model == "lowfreq":
        coef, power, trig = lowfreq_coefficients(kind, axis, params, amplitude)[branch]
        scale = coef * omega**power
        return lambda varphi: scale * trig(varphi)
    if model != "exact":
        raise ValidationError(f"unknown phase model {model!r}")
    spec = NoiseSpec(axis, amplitude, omega)

    def exact(varphi):
        d1, d2, d2a, three = _exact_terms(kind, spec, params, varphi)
        if kind is GeometryKind.THREE:
            return three
        return d1 + (d2a if branch == "anti" else d2)

    return exact


@dataclass(frozen=True)
class CoherenceResult:
    gamma: complex
    method: str  # closed_form | quadrature | monte_carlo
    stderr: float = 0.0
    samples: int = 0
    error: float = 0.0  # quadrature error estimate
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def abs(self):
        return abs(self.gamma)

    @property
    def arg(self):
        return math.atan2(self.gamma.imag, self.gamma.real)


def coherence_closed_form(kind, axis, omega, params=PhysicalParams(), amplitude=None):
    """gamma = J0(Omega omega^k) from the low-frequency phases.

    Returns one :class:`CoherenceResult`, or ``(symmetric, antisymmetric)``
    for the five-blade geometry.
    """
    kind = GeometryKind.parse(kind)
    results = []
    for branch, (coef, power, _) in lowfreq_coefficients(kind, axis, params, amplitude).items():
        K = abs(coef) * omega**power
        results.append(CoherenceResult(complex(bessel_j0(K)), "closed_form", meta={"branch": branch, "K": K}))
    return tuple(results) if kind is GeometryKind.FIVE else results[0]


def coherence_quadrature(phase_fn, tol=1e-9):
    """gamma = (1/2pi) int_0^{2pi} exp(i phase_fn(varphi)) dvarphi.

    Adaptive Gauss-Kronrod to absolute tolerance ``tol`` on gamma.
    ``phase_fn`` must accept numpy arrays. Raises ConvergenceError (with
    subdivision diagnostics) if refinement stalls.
    """
    res = adaptive_gk(lambda x: np.exp(1j * phase_fn(x)), 0.0, TWO_PI, tol * TWO_PI,
                      breakpoints=np.linspace(0.0, TWO_PI, 9))
    return CoherenceResult(res.value / TWO_PI, "quadrature", error=res.error / TWO_PI,
                           meta={"intervals": res.intervals})


def coherence_montecarlo(phase_fn, n=100_000, seed=0):
    """Sample mean of exp(i phase_fn(varphi)) over ``n`` uniform arrival phases.

    ``stderr`` combines the per-component standard errors in quadrature.
    Bitwise reproducible for a fixed ``seed``.
    """
    if n < 1000:
        raise ValidationError("Monte Carlo averaging needs n >= 1000")
    rng = np.random.default_rng(seed)
    varphi = rng.uniform(0.0, TWO_PI, n)
    z = np.exp(1j * np.asarray(phase_fn(varphi), dtype=float))
    se = math.hypot(np.std(z.real, ddof=1), np.std(z.imag, ddof=1)) / math.sqrt(n)
    return CoherenceResult(complex(z.mean()), "monte_carlo", stderr=float(se), samples=n)


def coherence(kind, axis, omega, params=PhysicalParams(), amplitude=None, *, method="quadrature",
              model="lowfreq", tol=1e-9, n=100_000, seed=0):
    """Coherence of every branch of ``kind``: ``{"sym": result[, "anti": result]}``."""
    kind = GeometryKind.parse(kind)
    branches = ("sym", "anti") if kind is GeometryKind.FIVE else ("sym",)
    if method == "closed_form":
        if model != "lowfreq":
            raise ValidationError("closed-form coherence exists only for the low-frequency phases")
        res = coherence_closed_form(kind, axis, omega, params, amplitude)
        return dict(zip(branches, res if isinstance(res, tuple) else (res,)))
    out = {}
    for branch in branches:
        fn = phase_function(kind, axis, omega, params, amplitude, branch, model)
        if method == "quadrature":
            out[branch] = coherence_quadrature(fn, tol)
        elif method == "monte_carlo":
            out[branch] = coherence_montecarlo(fn, n, seed)
        else:
            raise ValidationError(f"unknown coherence method {method!r}")
    return out
