"""Dynamical-diffraction phase and momentum-averaged contrast.

The transmission amplitude of a symmetric Laue blade is modelled as

    t(y) = exp(i A y) [cos(A s) - i (y / s) sin(A s)],   s = sqrt(1 + y^2)

with ``A = pi D / Delta_H`` (thickness over Pendelloesung length) and
``y = delta_theta * y_scale`` the dimensionless deviation from Bragg. The
default ``y_scale`` is ``sin(2 theta_B) Delta_H / lambda``; both ``A`` and
``y_scale`` are plain profile parameters, so other conventions can be
dialled in. A tabulated mode carries measured beta(delta_theta) instead.

Momentum averages use a Lorentzian in delta_theta. Quadrature runs in the
variable ``u = arctan((delta_theta - center) / sigma)``, which turns the
Lorentzian weight into the constant 1/pi and maps the +-1e5 sigma
truncation window onto a finite interval.
"""
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from . import constants as C
from .quadrature import adaptive_gk
from .errors import RangeError, UnsupportedOperationError, ValidationError

TRUNCATION = 1e5  # half-width of the averaging window, in units of sigma


def load_reflections():
    with resources.files("nirefocus").joinpath("data/reflections.json").open() as fh:
        table = json.load(fh)
    return {k: v for k, v in table.items() if not k.startswith("_")}


def reflection(name):
    table = load_reflections()
    key = name.replace("(", "").replace(")", "").replace(" ", "")
    key = key[:2].capitalize() + key[2:]
    if key not in table:
        raise ValidationError(f"unknown reflection {name!r}; known: {', '.join(sorted(table))}")
    return table[key]


def pendellosung_length(name, wavelength):
    """Delta_H for the named reflection at ``wavelength`` (symmetric Laue)."""
    entry = reflection(name)
    ratio = wavelength / (2 * entry["d_spacing"])
    if not 0 < ratio < 1:
        raise ValidationError(f"Bragg condition unsatisfiable for {name} at {wavelength:g} m")
    return entry["pendellosung_product"] * math.sqrt(1 - ratio**2) / wavelength


_DEFAULT_DELTA_H = pendellosung_length("Si111", C.DEFAULT_DD_WAVELENGTH)
_DEFAULT_BRAGG = math.asin(C.DEFAULT_DD_WAVELENGTH / (2 * reflection("Si111")["d_spacing"]))


@dataclass(frozen=True)
class DDProfile:
    """Blade diffraction profile.

    ``mode="analytic"`` needs thickness, pendellosung, bragg_angle and
    wavelength. ``mode="tabulated"`` needs ``grid`` (delta_theta, rad,
    strictly increasing) and ``beta`` (rad).
    """

    thickness: float = C.DEFAULT_DD_THICKNESS
    pendellosung: float = _DEFAULT_DELTA_H
    bragg_angle: float = _DEFAULT_BRAGG
    wavelength: float = C.DEFAULT_DD_WAVELENGTH
    mode: str = "analytic"
    y_scale: Optional[float] = None
    grid: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    beta: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.mode == "analytic":
            for name in ("thickness", "pendellosung", "wavelength"):
                if not getattr(self, name) > 0:
                    raise ValidationError(f"{name} must be positive")
            if not 0 < self.bragg_angle < math.pi / 2:
                raise ValidationError("bragg_angle must lie in (0, pi/2)")
            if self.y_scale is None:
                object.__setattr__(
                    self, "y_scale", math.sin(2 * self.bragg_angle) * self.pendellosung / self.wavelength
                )
        elif self.mode == "tabulated":
            grid = np.asarray(self.grid, dtype=float)
            beta = np.asarray(self.beta, dtype=float)
            if grid.ndim != 1 or grid.shape != beta.shape or grid.size < 2:
                raise ValidationError("tabulated profile needs equal-length 1-d grid and beta (>= 2 rows)")
            if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(beta))):
                raise ValidationError("tabulated profile contains non-finite values")
            if not np.all(np.diff(grid) > 0):
                raise ValidationError("tabulated delta_theta grid must be strictly increasing")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "beta", beta)
        else:
            raise ValidationError(f"unknown profile mode {self.mode!r}")

    @classmethod
    def for_reflection(cls, name="Si111", wavelength=C.DEFAULT_DD_WAVELENGTH,
                       thickness=C.DEFAULT_DD_THICKNESS, y_scale=None):
        d = reflection(name)["d_spacing"]
        delta_h = pendellosung_length(name, wavelength)
        return cls(thickness, delta_h, math.asin(wavelength / (2 * d)), wavelength, y_scale=y_scale)

    @classmethod
    def from_table(cls, grid, beta):
        return cls(mode="tabulated", grid=grid, beta=beta)

    @property
    def A(self):
        """pi D / Delta_H."""
        return math.pi * self.thickness / self.pendellosung

    @property
    def darwin_halfwidth(self):
        """delta_theta at |y| = 1."""
        return 1.0 / self.y_scale


def read_profile_table(path):
    """Two-column text file (delta_theta in urad, beta in rad), '#' comments."""
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if data.shape[1] != 2:
        raise ValidationError(f"{path}: expected 2 columns, found {data.shape[1]}")
    return DDProfile.from_table(data[:, 0] * C.MICRO, data[:, 1])


def _require_analytic(profile, what):
    if profile.mode != "analytic":
        raise UnsupportedOperationError(f"{what} needs an analytic profile (tabulated profiles carry beta only)")


def laue_amplitudes(delta_theta, profile):
    """(t, r) of the symmetric Laue blade; |t|^2 + |r|^2 = 1."""
    _require_analytic(profile, "laue_amplitudes")
    A = profile.A
    y = np.asarray(delta_theta, dtype=float) * profile.y_scale
    s = np.sqrt(1 + y * y)
    # two-branch form t = (1-q)/2 e^{iA(y+s)} + (1+q)/2 e^{iA(y-s)}, q = y/s, with
    # the small differences evaluated without cancellation far from Bragg
    pos = y >= 0
    big = np.abs(y) + s
    small = 1 / big  # s - |y| without cancellation
    y_plus = np.where(pos, big, small)
    y_minus = np.where(pos, -small, -big)
    lean = 1 / (s * big)  # 1 - |q|
    full = 1 + np.abs(y) / s  # 1 + |q|
    one_minus_q = np.where(pos, lean, full)
    one_plus_q = np.where(pos, full, lean)
    e_plus, e_minus = np.exp(1j * A * y_plus), np.exp(1j * A * y_minus)
    t = 0.5 * (one_minus_q * e_plus + one_plus_q * e_minus)
    r = -(e_plus - e_minus) / (2 * s)
    return t, r


RIPPLE_CUTOFF = 100.0  # |y| beyond which the Pendelloesung ripple is averaged analytically


def _unit_phasor(delta_theta, profile, weight, average_ripple=False):
    """exp(i weight beta), computed from t without forming an angle.

    With ``average_ripple`` the fast Pendelloesung term is replaced by its
    mean over one ripple period. Write t = M (1 + eps e^{i Theta}) with M the
    dominant branch; the ripple average of (t/|t|)^w is (M/|M|)^w
    (1 - w^2 eps^2 / 4 + O(eps^4)), and the neglected oscillating part
    integrates to < 1e-10 for |y| > RIPPLE_CUTOFF.
    """
    if profile.mode == "tabulated":
        return np.exp(1j * weight * dynamical_beta(delta_theta, profile))
    if not average_ripple:
        t, _ = laue_amplitudes(delta_theta, profile)
        return (t / np.abs(t)) ** weight
    A = profile.A
    y = np.asarray(delta_theta, dtype=float) * profile.y_scale
    s = np.sqrt(1 + y * y)
    pos = y >= 0
    big_sum = np.abs(y) + s
    main_phase = np.where(pos, -A / big_sum, A / big_sum)
    big = 1 + np.abs(y) / s
    small = 1 / (s * big_sum)
    eps = small / big
    return np.exp(1j * weight * main_phase) * (1 - weight**2 * eps**2 / 4)


def dynamical_beta(delta_theta, profile):
    """beta = arg t, on the branch continuous in delta_theta (beta(0) in (-pi, pi]).

    Tabulated profiles interpolate linearly and raise RangeError outside the grid.
    """
    x = np.asarray(delta_theta, dtype=float)
    if profile.mode == "tabulated":
        if np.any(x < profile.grid[0]) or np.any(x > profile.grid[-1]):
            raise RangeError(
                f"delta_theta outside tabulated range [{profile.grid[0]:g}, {profile.grid[-1]:g}] rad"
            )
        out = np.interp(x, profile.grid, profile.beta)
        return float(out) if out.ndim == 0 else out
    A = profile.A
    y = x * profile.y_scale
    s = np.sqrt(1 + y * y)
    psi = A * s
    n = round(A / math.pi)
    sign = np.sign(y)
    # arg(cos psi - i q sin psi) continued through the branch cuts of arctan
    core = np.arctan(np.abs(y / s) * np.tan(psi)) + math.pi * np.round(psi / math.pi)
    bracket = np.where(y == 0, -math.pi * n, -sign * core + sign * math.pi * n - math.pi * n)
    beta = A * y + bracket
    # on-Bragg value -pi n moved to the principal branch (0 or pi)
    beta = beta + math.pi * (n + n % 2)
    return float(beta) if np.ndim(beta) == 0 else beta


@dataclass(frozen=True)
class MomentumDistribution:
    """Lorentzian g(dtheta) = (sigma/pi) / (sigma^2 + (dtheta - center)^2).

    With ``width_is_fwhm`` the given ``sigma`` is read as a full width and
    halved.
    """

    sigma: float = C.DARWIN_WIDTH
    center: float = 0.0
    width_is_fwhm: bool = False

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError("Lorentzian width must be positive")
        if not math.isfinite(self.center):
            raise ValidationError("Lorentzian center must be finite")

    @property
    def width(self):
        return self.sigma / 2 if self.width_is_fwhm else self.sigma


def lorentzian_density(delta_theta, dist):
    w = dist.width
    x = np.asarray(delta_theta, dtype=float) - dist.center
    return (w / math.pi) / (w * w + x * x)


def coherence_dd(distribution, weight=2, tol=1e-9):
    """gamma = int dbeta p(beta) exp(i weight beta).

    ``distribution`` is a float (point mass), a frozen ``scipy.stats``
    continuous distribution, or a ``(pdf, lo, hi)`` triple. Densities that
    do not integrate to 1 within 1e-6 are rejected.
    """
    if np.ndim(distribution) == 0 and not callable(distribution) and not hasattr(distribution, "pdf"):
        return complex(np.exp(1j * weight * float(distribution)))
    if hasattr(distribution, "pdf"):
        pdf = distribution.pdf
        lo, hi = distribution.support()
        if not math.isfinite(lo):
            lo = distribution.ppf(1e-13)
        if not math.isfinite(hi):
            hi = distribution.isf(1e-13)
    else:
        pdf, lo, hi = distribution
    norm = adaptive_gk(pdf, lo, hi, 1e-10).value.real
    if abs(norm - 1) > 1e-6:
        raise ValidationError(f"density is not normalized (integral = {norm:.9f})")
    return adaptive_gk(lambda x: pdf(x) * np.exp(1j * weight * x), lo, hi, tol,
                       breakpoints=np.linspace(lo, hi, 17)).value


def coherence_dd_samples(beta_samples, weight=2):
    """(gamma, stderr) as the sample mean of exp(i weight beta)."""
    z = np.exp(1j * weight * np.asarray(beta_samples, dtype=float))
    if z.size < 2:
        return complex(z.mean()), 0.0
    se = math.hypot(np.std(z.real, ddof=1), np.std(z.imag, ddof=1)) / math.sqrt(z.size)
    return complex(z.mean()), float(se)


@dataclass(frozen=True)
class DDAverage:
    A_O: float
    B_O: complex
    weight: int
    truncation_error: float
    quad_error: float = 0.0
    intensity: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def contrast(self):
        return abs(self.B_O) / self.A_O

    @property
    def phase(self):
        return math.atan2(self.B_O.imag, self.B_O.real)


def averaged_interferogram_dd(phi_grid, dist, profile, weight=2, tol=1e-9, truncation=TRUNCATION):
    """Momentum-averaged interferogram for a Lorentzian angular distribution.

    ``weight=1``: one extra crystal in one path; the curve is
    ``A_O - |B_O| cos(phi + arg B_O)``.
    ``weight=2``: four-blade interferometer; the curve is
    ``(1 - |gamma| cos(phi + arg gamma)) / 2`` with ``gamma = B_O / A_O``.

    Raises :class:`ConvergenceError` when the quadrature misses ``tol``.
    """
    if weight not in (1, 2):
        raise ValidationError("weight must be 1 (single beta) or 2 (2 beta)")
    w = dist.width
    lo_x, hi_x = dist.center - truncation * w, dist.center + truncation * w
    if profile.mode == "tabulated":
        lo_x, hi_x = max(lo_x, profile.grid[0]), min(hi_x, profile.grid[-1])
        if lo_x >= hi_x:
            raise RangeError("averaging window does not overlap the tabulated profile")
    u_lo = math.atan((lo_x - dist.center) / w)
    u_hi = math.atan((hi_x - dist.center) / w)
    A_O = (u_hi - u_lo) / math.pi

    cut = [u_lo, u_hi]
    if profile.mode == "analytic":
        edge = RIPPLE_CUTOFF / profile.y_scale
        cut = [min(max(math.atan((x - dist.center) / w), u_lo), u_hi) for x in (-edge, edge)]

    def integrand(u):
        x = dist.center + w * np.tan(u)
        inner = (u >= cut[0]) & (u <= cut[1])
        out = np.empty(u.shape, dtype=complex)
        out[inner] = _unit_phasor(x[inner], profile, weight)
        if not inner.all():
            out[~inner] = _unit_phasor(x[~inner], profile, weight, average_ripple=True)
        return out / math.pi

    breaks = np.concatenate([np.linspace(u_lo, u_hi, 65), np.linspace(cut[0], cut[1], 257)])
    res = adaptive_gk(integrand, u_lo, u_hi, tol, breakpoints=breaks)
    B_O = res.value
    avg = DDAverage(A_O, B_O, weight, truncation_error=1 - A_O, quad_error=res.error)
    if phi_grid is not None:
        phi = np.asarray(phi_grid, dtype=float)
        if weight == 1:
            curve = A_O - abs(B_O) * np.cos(phi + avg.phase)
        else:
            curve = 0.5 * (1 - avg.contrast * np.cos(phi + avg.phase))
        avg = DDAverage(A_O, B_O, weight, avg.truncation_error, res.error, curve)
    return avg


def contrast_vs_misalignment(delta_theta0_grid, width, profile, weight=1, tol=1e-9, width_is_fwhm=False):
    """(contrast, phase) arrays of the momentum average versus distribution center."""
    contrast, phase = [], []
    for center in np.asarray(delta_theta0_grid, dtype=float):
        avg = averaged_interferogram_dd(None, MomentumDistribution(width, center, width_is_fwhm),
                                        profile, weight, tol)
        contrast.append(avg.contrast)
        phase.append(avg.phase)
    return np.array(contrast), np.array(phase)


def four_blade_max_contrast(profile=None, dist=None, tol=1e-9):
    """On-Bragg four-blade contrast |int g exp(2 i beta)| / int g."""
    profile = profile or DDProfile.for_reflection()
    dist = dist or MomentumDistribution()
    return averaged_interferogram_dd(None, dist, profile, 2, tol).contrast
