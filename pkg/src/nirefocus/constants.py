"""CODATA 2018 constants and default instrument parameters (SI units)."""
import math

NEUTRON_MASS = 1.67492749804e-27  # kg
HBAR = 1.054571817e-34  # J s
PLANCK = 6.62607015e-34  # J s

ANGSTROM = 1e-10
MICRO = 1e-6

# Vibration study defaults: Si(111) is the only common reflection that
# satisfies Bragg at 4.4 angstrom.
DEFAULT_WAVELENGTH = 4.4 * ANGSTROM
DEFAULT_D_SPACING = 3.1356 * ANGSTROM
DEFAULT_BLADE_SEPARATION = 0.05  # m
DEFAULT_Y_AMPLITUDE = 0.1 * MICRO  # m
DEFAULT_THETA_AMPLITUDE = 0.1 * MICRO  # rad

# Dynamical-phase study defaults
DEFAULT_DD_WAVELENGTH = 2.71 * ANGSTROM
DEFAULT_DD_THICKNESS = 1e-3  # m
DARWIN_WIDTH = 4.26 * MICRO  # rad, read literally as the Lorentzian width parameter

ARCSEC = math.pi / (180 * 3600)
