"""Observable-level results: averaged fringes, contrast, sweeps and density maps.

All averaged intensities insert the coherence functions into the
averaged-intensity forms:

* three-blade O port: (1 + |g| cos(phi + arg g)) / 2
* four-blade H port (the decoherence-free port): (1 + |g| cos(phi + arg g)) / 2
* five-blade H port: (2 - |g| cos(chi - phi + arg g) + |g'| cos(chi + phi + arg g')) / 4

The complementary ports are one minus these.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedContrastError, ValidationError
from .geometry import GeometryKind
from .vibration import Axis, PhysicalParams, coherence

TWO_PI = 2 * math.pi
MIN_FIT_POINTS = 64


def _strictly_increasing(name, grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError(f"{name} must be a 1-d grid with at least 2 points")
    if not np.all(np.isfinite(grid)) or not np.all(np.diff(grid) > 0):
        raise ValidationError(f"{name} must be finite and strictly increasing")
    return grid


def _probabilities(name, values, tol=1e-12):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)) or values.min() < -tol or values.max() > 1 + tol:
        raise ValidationError(f"{name} must lie in [0, 1]")
    return values


@dataclass(frozen=True)
class Interferogram:
    phase_grid: np.ndarray
    intensity: np.ndarray
    port: str
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.port not in ("O", "H"):
            raise ValidationError(f"port must be 'O' or 'H', got {self.port!r}")
        grid = _strictly_increasing("phase_grid", self.phase_grid)
        intensity = _probabilities("intensity", self.intensity)
        if intensity.shape != grid.shape:
            raise ValidationError("phase_grid and intensity lengths differ")
        object.__setattr__(self, "phase_grid", grid)
        object.__setattr__(self, "intensity", intensity)


@dataclass(frozen=True)
class DensityMap:
    """``values[i, j]`` is the H-port intensity at (phi_grid[i], chi_grid[j])."""

    phi_grid: np.ndarray
    chi_grid: np.ndarray
    values: np.ndarray
    omega: float
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        phi = _strictly_increasing("phi_grid", self.phi_grid)
        chi = _strictly_increasing("chi_grid", self.chi_grid)
        values = _probabilities("values", self.values)
        if values.shape != (phi.size, chi.size):
            raise ValidationError(f"values shape {values.shape} != ({phi.size}, {chi.size})")
        object.__setattr__(self, "phi_grid", phi)
        object.__setattr__(self, "chi_grid", chi)
        object.__setattr__(self, "values", values)

    def line(self, mu, slope=-1):
        """(phi, intensity) along chi = slope * phi + mu, using only grid points.

        Requires a uniform periodic grid (as built by :func:`density_map`) on
        which the line passes through grid nodes.
        """
        if slope not in (1, -1):
            raise ValidationError("slope must be +1 or -1")
        n = self.phi_grid.size
        if self.chi_grid.size != n:
            raise ValidationError("line extraction needs a square map")
        shift = mu / (TWO_PI / n)
        k = int(round(shift))
        if abs(shift - k) > 1e-9:
            raise ValidationError(f"line mu={mu!r} does not pass through grid nodes for n={n}")
        i = np.arange(n)
        j = (slope * i + k) % n
        return self.phi_grid, self.values[i, j]


@dataclass(frozen=True)
class SweepCurve:
    omega_grid: np.ndarray
    gamma_abs: dict  # GeometryKind -> array
    axis: Axis
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega_grid, dtype=float)
        object.__setattr__(self, "omega_grid", omega)
        object.__setattr__(self, "axis", Axis.parse(self.axis))
        for kind, values in self.gamma_abs.items():
            values = np.asarray(values, dtype=float)
            if values.shape != omega.shape:
                raise ValidationError(f"{kind}: gamma_abs length differs from omega_grid")
            if np.any(values < 0) or np.any(values > 1 + 1e-9):
                raise ValidationError(f"{kind}: |gamma| outside [0, 1]")


def _refined_extremum(x, y, idx):
    """Vertex of the parabola through the three samples around ``idx``."""
    if idx == 0 or idx == len(y) - 1:
        return y[idx]
    x0, x1, x2 = x[idx - 1 : idx + 2]
    y0, y1, y2 = y[idx - 1 : idx + 2]
    d01, d12 = (y1 - y0) / (x1 - x0), (y2 - y1) / (x2 - x1)
    a = (d12 - d01) / (x2 - x0)
    if a == 0:
        return y1
    b = d01 - a * (x0 + x1)
    xv = min(max(-b / (2 * a), x0), x2)
    return y1 + (xv - x1) * (a * (xv + x1) + b)


def contrast(curve):
    """Visibility (I_max - I_min) / (I_max + I_min) of a sampled fringe.

    Interior extrema are refined by parabolic interpolation, so a sinusoid
    sampled at a few hundred points per period is resolved to ~1e-9.
    ``curve`` is an :class:`Interferogram` or a ``(phase, intensity)`` pair.
    """
    if isinstance(curve, Interferogram):
        x, y = curve.phase_grid, curve.intensity
    else:
        x, y = (np.asarray(v, dtype=float) for v in curve)
    if y.size == 0:
        raise ValidationError("empty curve")
    hi = _refined_extremum(x, y, int(np.argmax(y)))
    lo = _refined_extremum(x, y, int(np.argmin(y)))
    if hi + lo <= 0:
        raise UndefinedContrastError("contrast undefined for an all-zero curve")
    return float(min(max((hi - lo) / (hi + lo), 0.0), 1.0))


def fit_fringe(phase, intensity, harmonic=2):
    """Least-squares fit of ``A + B sin(harmonic * phase + c)``.

    Returns ``(A, B, c)`` with ``B >= 0``. Needs at least 64 uniformly
    spaced points.
    """
    phase = np.asarray(phase, dtype=float)
    intensity = np.asarray(intensity, dtype=float)
    if phase.size < MIN_FIT_POINTS:
        raise ValidationError(f"fringe fit needs >= {MIN_FIT_POINTS} points, got {phase.size}")
    if phase.shape != intensity.shape:
        raise ValidationError("phase and intensity lengths differ")
    design = np.column_stack([np.ones_like(phase), np.sin(harmonic * phase), np.cos(harmonic * phase)])
    (a, s, c), *_ = np.linalg.lstsq(design, intensity, rcond=None)
    return float(a), float(math.hypot(s, c)), float(math.atan2(c, s))


def _gammas(kind, axis, omega, params, amplitude, method, model, tol=1e-9, n=100_000, seed=0):
    res = coherence(kind, axis, omega, params, amplitude, method=method, model=model, tol=tol, n=n, seed=seed)
    return res["sym"], res.get("anti")


def _meta(kind, axis, omega, method, model, g, gp=None):
    meta = {"geometry": kind.name.lower(), "axis": axis.value, "omega": omega, "method": method,
            "model": model, "gamma": g.gamma, "gamma_abs": g.abs}
    if gp is not None:
        meta.update(gamma_prime=gp.gamma, gamma_prime_abs=gp.abs)
    return meta


def five_blade_h(phi, chi, gamma, gamma_prime):
    """Averaged five-blade H-port intensity for given coherence values."""
    phi, chi = np.asarray(phi, dtype=float), np.asarray(chi, dtype=float)
    return 0.25 * (2 - abs(gamma) * np.cos(chi - phi + np.angle(gamma))
                   + abs(gamma_prime) * np.cos(chi + phi + np.angle(gamma_prime)))


def averaged_interferogram(kind, axis, omega, params=PhysicalParams(), port="O", phase_grid=None, *,
                           chi=0.0, amplitude=None, method="quadrature", model="lowfreq", tol=1e-9,
                           n=100_000, seed=0):
    """Noise-averaged fringe versus the loop-1 phase ``phi``.

    ``phase_grid`` defaults to 720 points on [0, 2 pi]. For the five-blade
    geometry ``chi`` fixes the loop-2 phase.
    """
    kind, axis = GeometryKind.parse(kind), Axis.parse(axis)
    if port not in ("O", "H"):
        raise ValidationError(f"port must be 'O' or 'H', got {port!r}")
    phi = np.linspace(0, TWO_PI, 720) if phase_grid is None else np.asarray(phase_grid, dtype=float)
    g, gp = _gammas(kind, axis, omega, params, amplitude, method, model, tol, n, seed)
    if kind is GeometryKind.FIVE:
        h = five_blade_h(phi, chi, g.gamma, gp.gamma)
        values = h if port == "H" else 1 - h
    else:
        # three-blade O and four-blade H carry the fringe 1 + |g| cos(...)
        bright = 0.5 * (1 + g.abs * np.cos(phi + g.arg))
        bright_port = "O" if kind is GeometryKind.THREE else "H"
        values = bright if port == bright_port else 1 - bright
    meta = _meta(kind, axis, omega, method, model, g, gp)
    if kind is GeometryKind.FIVE:
        meta["chi"] = chi
    return Interferogram(phi, values, port, meta)


def refocused_interferogram(phi_grid=None, mu=math.pi, axis="y", omega=0.0, params=PhysicalParams(), *,
                            amplitude=None, method="quadrature", model="lowfreq", tol=1e-9):
    """Five-blade H-port fringe along the decoherence-free line chi = mu - phi.

    Along that line the intensity is
    ``(2 - |g| cos(mu - 2 phi + arg g) + |g'| cos(mu + arg g')) / 4``:
    the symmetric coherence g sets the modulation depth while the
    antisymmetric g' only shifts the mean. Metadata exposes
    ``modulation_depth`` (|g|), ``dc_shift`` ((1 - Re g') / 4 at mu = pi),
    ``background`` (1 - Re g') and ``relative_contrast`` (|g| / (2 - Re g')).
    """
    axis = Axis.parse(axis)
    phi = np.linspace(0, TWO_PI, 720) if phi_grid is None else np.asarray(phi_grid, dtype=float)
    g, gp = _gammas(GeometryKind.FIVE, axis, omega, params, amplitude, method, model, tol)
    values = five_blade_h(phi, mu - phi, g.gamma, gp.gamma)
    level = -abs(gp.gamma) * math.cos(mu + gp.arg)  # equals Re g' at mu = pi
    meta = _meta(GeometryKind.FIVE, axis, omega, method, model, g, gp)
    meta.update(mu=mu, modulation_depth=g.abs, background=1 - level, dc_shift=(1 - level) / 4,
                relative_contrast=g.abs / (2 - level))
    return Interferogram(phi, values, "H", meta)


def density_map(omega, grid_n=128, axis="y", params=PhysicalParams(), *, amplitude=None,
                method="quadrature", model="lowfreq", tol=1e-9, n=100_000, seed=0):
    """Averaged five-blade H-port intensity on an n x n grid over [0, 2 pi)^2."""
    if int(grid_n) != grid_n or grid_n < 16:
        raise ValidationError("grid_n must be an integer >= 16")
    grid_n = int(grid_n)
    axis = Axis.parse(axis)
    grid = np.linspace(0, TWO_PI, grid_n, endpoint=False)
    g, gp = _gammas(GeometryKind.FIVE, axis, omega, params, amplitude, method, model, tol, n, seed)
    values = five_blade_h(grid[:, None], grid[None, :], g.gamma, gp.gamma)
    meta = _meta(GeometryKind.FIVE, axis, omega, method, model, g, gp)
    # |dI| <= (|dg| + |dg'|) / 4, so this bounds the per-pixel sampling error
    meta["stderr"] = (g.stderr + gp.stderr) / 4
    return DensityMap(grid, grid.copy(), values, omega, meta)


def coherence_sweep(kinds, axis, omega_grid, params=PhysicalParams(), method="quadrature", *,
                    amplitude=None, model="lowfreq", tol=1e-9, n=100_000, seed=0, threads=1):
    """|gamma| versus omega for each geometry in ``kinds``.

    Five-blade entries report the symmetric branch, i.e. the modulation depth
    on the decoherence-free line. ``threads`` > 1 evaluates points in
    parallel; 0 picks a worker count automatically. Output order is fixed.
    """
    axis = Axis.parse(axis)
    kinds = [GeometryKind.parse(k) for k in kinds]
    kinds = sorted(set(kinds), key=lambda k: ["THREE", "FOUR", "FIVE"].index(k.name))
    omega = np.asarray(omega_grid, dtype=float)
    if omega.ndim != 1 or omega.size == 0 or not np.all(np.isfinite(omega)) or np.any(omega < 0):
        raise ValidationError("omega_grid must be a non-empty 1-d grid of non-negative values")
    tasks = [(k, w) for k in kinds for w in omega]

    def point(task):
        k, w = task
        return coherence(k, axis, float(w), params, amplitude, method=method, model=model,
                         tol=tol, n=n, seed=seed)["sym"].abs

    if threads == 1:
        results = [point(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=None if threads == 0 else threads) as pool:
            results = list(pool.map(point, tasks))
    results = np.array(results).reshape(len(kinds), omega.size)
    gamma_abs = {k: results[i] for i, k in enumerate(kinds)}
    return SweepCurve(omega, gamma_abs, axis, {"method": method, "model": model})
