"""Command-line entry point ``nirefocus``.

Exit status: 0 on success, 1 on invalid input (config, arguments, data),
2 when a numerical method fails to converge.
"""
import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import averaged_interferogram, coherence_sweep, density_map, refocused_interferogram
from .config import CONFIG_ENV, emit_config, load_config, parse_value
from .dyndiff import (averaged_interferogram_dd, contrast_vs_misalignment, read_profile_table)
from .errors import ConvergenceError, NIError, UsageError
from .geometry import GeometryKind
from .io import compare, read_measured, read_table, write_table
from . import constants as C

TWO_PI = 2 * math.pi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text):
    """``start:step:stop`` (stop inclusive) or a comma list of numbers."""
    try:
        if ":" in text:
            start, step, stop = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(count)
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use start:step:stop or a comma list") from None


def parse_geometries(text):
    if text.strip().lower() == "all":
        return [GeometryKind.THREE, GeometryKind.FOUR, GeometryKind.FIVE]
    return [GeometryKind.parse(t) for t in text.split(",")]


def _common(p):
    p.add_argument("--config", help=f"config file (default: ${CONFIG_ENV} if set, else built-in defaults)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key, e.g. --set 'L=7 cm'")
    p.add_argument("--threads", type=int, help="worker cap for sweeps (0 = auto)")
    p.add_argument("--hz", action="store_true", help="omega inputs are in Hz (multiplied by 2 pi)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--method", choices=["quadrature", "monte_carlo", "closed_form"])
    p.add_argument("--tol", type=float, help="quadrature tolerance")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output", "-o", help="output file (default: stdout)")


def build_parser():
    parser = _Parser(prog="nirefocus", description="Neutron interferometer noise refocusing simulations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="|gamma| versus omega per geometry")
    _common(p)
    p.add_argument("--geometry", default="all", help="all or comma list of 3,4,5")
    p.add_argument("--axis", default="y", choices=["y", "z"])
    p.add_argument("--omega", default="0:2:400", help="start:step:stop or comma list")

    p = sub.add_parser("densitymap", help="five-blade H intensity over (phi, chi)")
    _common(p)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--grid-n", type=int, default=128)
    p.add_argument("--axis", default="y", choices=["y", "z"])

    p = sub.add_parser("interferogram", help="noise-averaged fringe for one geometry")
    _common(p)
    p.add_argument("--geometry", default="3")
    p.add_argument("--axis", default="y", choices=["y", "z"])
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--port", default=None, choices=["O", "H"], help="default: O for 3-blade, H otherwise")
    p.add_argument("--chi", type=float, default=0.0, help="loop-2 phase for the five-blade geometry")
    p.add_argument("--points", type=int, default=720)

    p = sub.add_parser("refocus", help="five-blade H fringe along chi = mu - phi")
    _common(p)
    p.add_argument("--omega", default="0,100,150,200")
    p.add_argument("--mu", type=float, default=math.pi)
    p.add_argument("--axis", default="y", choices=["y", "z"])
    p.add_argument("--points", type=int, default=720)

    p = sub.add_parser("ddscan", help="momentum-averaged contrast versus misalignment")
    _common(p)
    p.add_argument("--center", default="-20:0.5:20", help="delta_theta grid in urad")
    p.add_argument("--weight", type=int, default=1, choices=[1, 2], help="1: one beta, 2: four-blade 2 beta")
    p.add_argument("--profile", help="tabulated beta file (urad, rad) instead of the analytic profile")
    p.add_argument("--thickness")
    p.add_argument("--lambda", dest="wavelength")

    p = sub.add_parser("ddcontrast", help="on-Bragg maximum contrast with the dynamical phase")
    _common(p)
    p.add_argument("--geometry", default="4", help="4 (2 beta) or 3 (single beta)")
    p.add_argument("--profile", help="tabulated beta file (urad, rad)")
    p.add_argument("--thickness")
    p.add_argument("--lambda", dest="wavelength")

    p = sub.add_parser("compare", help="residuals of a measured x,y[,y_err] CSV against a simulated table")
    _common(p)
    p.add_argument("measured")
    p.add_argument("simulated")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")

    p = sub.add_parser("selftest", help="run the acceptance criteria and print a pass/fail table")
    _common(p)
    return parser


def _config(args):
    cfg = load_config(args.config)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, parsed = parse_value(*item.split("=", 1))
        overrides[key] = parsed
    for key, flag in (("dd_thickness", "thickness"), ("dd_wavelength", "wavelength")):
        if getattr(args, flag, None) is not None:
            overrides[key] = parse_value(key, getattr(args, flag))[1]
    for key in ("threads", "seed", "method", "tol", "format", "output"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if args.hz:
        overrides["omega_unit"] = "hz"
    from dataclasses import replace
    return replace(cfg, **overrides).validate()


def _metadata(args, cfg, **extra):
    meta = {"program": "nirefocus", "version": __version__, "command": args.command}
    meta.update({f"config.{k}": v for k, v in cfg.as_dict().items() if k not in ("output", "format")})
    meta.update(extra)
    return meta


def _omega_columns(user, cfg):
    cols = {}
    if cfg.omega_unit == "hz":
        cols["frequency_hz"] = user
    cols["omega"] = user * cfg.omega_factor
    return cols


def _amplitude(cfg, axis):
    return cfg.y_amplitude if axis == "y" else cfg.theta_amplitude


def cmd_sweep(args, cfg):
    user = parse_grid(args.omega)
    cols = _omega_columns(user, cfg)
    kinds = parse_geometries(args.geometry)
    sweep = coherence_sweep(kinds, args.axis, cols["omega"], cfg.physical_params(), cfg.method,
                            amplitude=_amplitude(cfg, args.axis), model=cfg.model, tol=cfg.tol,
                            n=cfg.mc_samples, seed=cfg.seed, threads=cfg.threads)
    for k in kinds:
        cols[f"gamma_abs_{k.value}"] = sweep.gamma_abs[k]
    return cols, {"axis": args.axis}


def cmd_densitymap(args, cfg):
    omega = args.omega * cfg.omega_factor
    m = density_map(omega, args.grid_n, args.axis, cfg.physical_params(), amplitude=_amplitude(cfg, args.axis),
                    method=cfg.method, model=cfg.model, tol=cfg.tol, n=cfg.mc_samples, seed=cfg.seed)
    phi, chi = np.meshgrid(m.phi_grid, m.chi_grid, indexing="ij")
    cols = {"phi": phi.ravel(), "chi": chi.ravel(), "intensity": m.values.ravel()}
    return cols, {"axis": args.axis, "omega": omega, "grid_n": args.grid_n,
                  "gamma": m.metadata["gamma"], "gamma_prime": m.metadata["gamma_prime"]}


def cmd_interferogram(args, cfg):
    kind = GeometryKind.parse(args.geometry)
    port = args.port or ("O" if kind is GeometryKind.THREE else "H")
    omega = args.omega * cfg.omega_factor
    grid = np.linspace(0, TWO_PI, args.points)
    curve = averaged_interferogram(kind, args.axis, omega, cfg.physical_params(), port, grid, chi=args.chi,
                                   amplitude=_amplitude(cfg, args.axis), method=cfg.method, model=cfg.model,
                                   tol=cfg.tol, n=cfg.mc_samples, seed=cfg.seed)
    meta = {k: v for k, v in curve.metadata.items() if k not in ("method", "model")}
    return {"phi": curve.phase_grid, "intensity": curve.intensity}, {"port": port, **meta}


def cmd_refocus(args, cfg):
    user = parse_grid(args.omega)
    grid = np.linspace(0, TWO_PI, args.points)
    cols, meta = {"phi": grid}, {"axis": args.axis, "mu": args.mu}
    for u, omega in zip(user, user * cfg.omega_factor):
        curve = refocused_interferogram(grid, args.mu, args.axis, float(omega), cfg.physical_params(),
                                        amplitude=_amplitude(cfg, args.axis), method=cfg.method,
                                        model=cfg.model, tol=cfg.tol)
        label = f"{u:g}"
        cols[f"intensity_omega_{label}"] = curve.intensity
        for key in ("modulation_depth", "dc_shift", "background", "relative_contrast"):
            meta[f"{key}_omega_{label}"] = curve.metadata[key]
    return cols, meta


def _dd_profile(args, cfg):
    return read_profile_table(args.profile) if args.profile else cfg.dd_profile()


def cmd_ddscan(args, cfg):
    centers = parse_grid(args.center)
    profile = _dd_profile(args, cfg)
    contrast, phase = contrast_vs_misalignment(centers * C.MICRO, cfg.width, profile, args.weight, cfg.tol,
                                               cfg.width_is_fwhm)
    return ({"delta_theta_urad": centers, "contrast": contrast, "phase": phase},
            {"weight": args.weight, "profile": args.profile or "analytic"})


def cmd_ddcontrast(args, cfg):
    kind = GeometryKind.parse(args.geometry)
    if kind is GeometryKind.FIVE:
        raise UsageError("ddcontrast supports geometry 3 (single beta) or 4 (2 beta)")
    weight = 2 if kind is GeometryKind.FOUR else 1
    profile = _dd_profile(args, cfg)
    avg = averaged_interferogram_dd(None, cfg.distribution(), profile, weight, cfg.tol)
    cols = {"geometry": [kind.value], "weight": [weight], "contrast": [avg.contrast], "phase": [avg.phase],
            "A_O": [avg.A_O], "quad_error": [avg.quad_error]}
    meta = {"profile": args.profile or "analytic"}
    if profile.mode == "analytic":
        meta.update(A=profile.A, y_scale=profile.y_scale, pendellosung=profile.pendellosung)
    return cols, meta


def cmd_compare(args, cfg):
    measured = read_measured(args.measured)
    sim_x, sim_y = read_table(args.simulated, args.x_col, args.y_col)
    report = compare(measured, sim_x, sim_y)
    print(f"rms={report.rms:.17g} max_abs={report.max_abs:.17g} n={report.x.size} dropped={report.dropped}",
          file=sys.stderr)
    return report.columns(), {"measured": os.path.basename(args.measured), "simulated": os.path.basename(args.simulated),
                              "rms": report.rms, "max_abs_residual": report.max_abs, "dropped": report.dropped}


COMMANDS = {"sweep": cmd_sweep, "densitymap": cmd_densitymap, "interferogram": cmd_interferogram,
            "refocus": cmd_refocus, "ddscan": cmd_ddscan, "ddcontrast": cmd_ddcontrast, "compare": cmd_compare}


def run_selftest(out):
    from .acceptance import run_all
    results = run_all()
    for r in results:
        out.write(r.line() + "\n")
    passed = sum(r.passed for r in results)
    out.write(f"{passed}/{len(results)} criteria passed\n")
    return 0 if passed == len(results) else 1


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "selftest":
            return run_selftest(sys.stdout)
        cfg = _config(args)
        cols, extra = COMMANDS[args.command](args, cfg)
        write_table(cols, _metadata(args, cfg, **extra), cfg.output, cfg.format, sys.stdout)
        return 0
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key, value in exc.diagnostics.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return 2
    except (NIError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
