"""Flat ``key = value  # comment`` run configuration with unit suffixes.

Lengths accept m, cm, mm, um, nm, angstrom (A); angles accept rad, mrad,
urad, deg, arcsec. A bare number is taken in SI units. Values are stored in
SI, and :func:`emit_config` writes a document that parses back to an equal
config.
"""
import math
import os
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from . import constants as C
from .dyndiff import DDProfile, MomentumDistribution, reflection
from .errors import ParseError, ValidationError
from .vibration import PhysicalParams

CONFIG_ENV = "NIREFOCUS_CONFIG"

LENGTH_UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9, "angstrom": 1e-10, "a": 1e-10}
ANGLE_UNITS = {"rad": 1.0, "mrad": 1e-3, "urad": 1e-6, "deg": math.pi / 180, "arcsec": C.ARCSEC}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)\s*$")


def _quantity(units):
    def parse(text):
        m = _NUMBER.match(text)
        if not m:
            raise ValueError(f"malformed quantity {text!r}")
        value, unit = float(m.group(1)), m.group(2).lower()
        if unit == "":
            return value
        if unit not in units:
            raise ValueError(f"unknown unit {m.group(2)!r} (expected one of {', '.join(units)})")
        return value * units[unit]
    return parse


def _number(text):
    m = _NUMBER.match(text)
    if not m or m.group(2):
        raise ValueError(f"expected a plain number, got {text!r}")
    return float(m.group(1))


def _integer(text):
    value = _number(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _boolean(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _choice(*options):
    def parse(text):
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t
    return parse


def _text(text):
    t = text.strip()
    if not t:
        raise ValueError("empty value")
    return t


def _optional(parser):
    def parse(text):
        return None if text.strip().lower() in ("none", "") else parser(text)
    return parse


_length, _angle = _quantity(LENGTH_UNITS), _quantity(ANGLE_UNITS)

# key -> (parser, SI unit used by emit_config or None)
_SCHEMA = {
    "wavelength": (_length, "m"),
    "reflection": (_optional(_text), None),
    "d_spacing": (_optional(_length), "m"),
    "L": (_length, "m"),
    "y_amplitude": (_length, "m"),
    "theta_amplitude": (_angle, "rad"),
    "dd_wavelength": (_length, "m"),
    "dd_reflection": (_text, None),
    "dd_thickness": (_length, "m"),
    "pendellosung": (_optional(_length), "m"),
    "dd_y_scale": (_optional(_number), None),
    "width": (_angle, "rad"),
    "width_is_fwhm": (_boolean, None),
    "tol": (_number, None),
    "mc_samples": (_integer, None),
    "seed": (_integer, None),
    "method": (_choice("quadrature", "monte_carlo", "closed_form"), None),
    "model": (_choice("lowfreq", "exact"), None),
    "omega_unit": (_choice("rad/s", "hz"), None),
    "threads": (_integer, None),
    "format": (_choice("csv", "json"), None),
    "output": (_optional(_text), None),
}
_ALIASES = {"lambda": "wavelength", "thickness": "dd_thickness", "sigma": "width", "y0": "y_amplitude",
            "theta0": "theta_amplitude", "d": "d_spacing"}


@dataclass(frozen=True)
class RunConfig:
    wavelength: float = C.DEFAULT_WAVELENGTH
    reflection: Optional[str] = "Si111"
    d_spacing: Optional[float] = None  # explicit lattice spacing; overrides ``reflection``
    L: float = C.DEFAULT_BLADE_SEPARATION
    y_amplitude: float = C.DEFAULT_Y_AMPLITUDE
    theta_amplitude: float = C.DEFAULT_THETA_AMPLITUDE
    dd_wavelength: float = C.DEFAULT_DD_WAVELENGTH
    dd_reflection: str = "Si111"
    dd_thickness: float = C.DEFAULT_DD_THICKNESS
    pendellosung: Optional[float] = None  # None: from the reflection table
    dd_y_scale: Optional[float] = None  # None: sin(2 theta_B) Delta_H / lambda
    width: float = C.DARWIN_WIDTH
    width_is_fwhm: bool = False
    tol: float = 1e-9
    mc_samples: int = 100_000
    seed: int = 0
    method: str = "quadrature"
    model: str = "lowfreq"
    omega_unit: str = "rad/s"
    threads: int = 1
    format: str = "csv"
    output: Optional[str] = None

    @property
    def lattice_spacing(self):
        if self.d_spacing is not None:
            return self.d_spacing
        return reflection(self.reflection)["d_spacing"]

    @property
    def omega_factor(self):
        """Multiplier taking user omega values to rad/s."""
        return 2 * math.pi if self.omega_unit == "hz" else 1.0

    def physical_params(self):
        return PhysicalParams(self.wavelength, self.lattice_spacing, self.L)

    def dd_profile(self):
        if self.pendellosung is None:
            return DDProfile.for_reflection(self.dd_reflection, self.dd_wavelength, self.dd_thickness,
                                            self.dd_y_scale)
        d = reflection(self.dd_reflection)["d_spacing"]
        return DDProfile(self.dd_thickness, self.pendellosung, math.asin(self.dd_wavelength / (2 * d)),
                         self.dd_wavelength, y_scale=self.dd_y_scale)

    def distribution(self, center=0.0):
        return MomentumDistribution(self.width, center, self.width_is_fwhm)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def validate(self, lines=None):
        """Cross-field checks; ``lines`` maps keys to source line numbers."""
        lines = lines or {}

        def where(*keys):
            found = [lines[k] for k in keys if k in lines]
            return max(found) if found else None

        try:
            self.physical_params()
        except (ValidationError, KeyError) as exc:
            raise ParseError(str(exc), where("wavelength", "reflection", "d_spacing", "L")) from None
        try:
            self.dd_profile()
            self.distribution()
        except ValidationError as exc:
            raise ParseError(str(exc), where("dd_wavelength", "dd_reflection", "dd_thickness",
                                             "pendellosung", "width")) from None
        checks = [
            ("tol", self.tol > 0, "tol must be positive"),
            ("mc_samples", self.mc_samples >= 1000, "mc_samples must be >= 1000"),
            ("threads", self.threads >= 0, "threads must be >= 0 (0 = auto)"),
            ("y_amplitude", self.y_amplitude >= 0, "y_amplitude must be >= 0"),
            ("theta_amplitude", self.theta_amplitude >= 0, "theta_amplitude must be >= 0"),
        ]
        for key, ok, reason in checks:
            if not ok:
                raise ParseError(reason, lines.get(key))
        return self


def canonical_key(key):
    key = key.strip()
    return _ALIASES.get(key, key)


def parse_value(key, text, line=None):
    """Parse one value for ``key``; raises ParseError naming ``line``."""
    key = canonical_key(key)
    if key not in _SCHEMA:
        raise ParseError(f"unknown key {key!r}", line)
    try:
        return key, _SCHEMA[key][0](text)
    except ValueError as exc:
        raise ParseError(f"{key}: {exc}", line) from None


def parse_config(text, base=None):
    """Parse a configuration document into a validated :class:`RunConfig`."""
    values, lines = {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ParseError(f"expected 'key = value', got {content!r}", number)
        key, value = (part.strip() for part in content.split("=", 1))
        key, parsed = parse_value(key, value, number)
        if key in values:
            raise ParseError(f"duplicate key {key!r} (first set on line {lines[key]})", number)
        values[key], lines[key] = parsed, number
    if "d_spacing" in values and "reflection" not in values:
        values["reflection"] = None
    return replace(base or RunConfig(), **values).validate(lines)


def _format_value(key, value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    unit = _SCHEMA[key][1]
    if isinstance(value, float):
        return f"{value!r} {unit}" if unit else repr(value)
    return str(value)


def emit_config(config):
    """Serialize ``config`` so that ``parse_config(emit_config(c)) == c``."""
    return "".join(f"{k} = {_format_value(k, v)}\n" for k, v in config.as_dict().items())


def load_config(path=None):
    """Read ``path``, else the file named by $NIREFOCUS_CONFIG, else defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
