"""Three-, four- and five-blade interferometers as operator sequences.

Time order of the elements (first acts first):

    three:  U_B, R_z(phi), R_x(pi), U_B
    four:   U_B, R_z(phi), R_x(pi), R_x(pi), U_B
    five:   U_B, R_z(phi), R_x(pi), U_B, R_x(pi), R_z(chi), U_B

Mirror blades are ideal R_x(pi) (post-selected pi pulses). The chi flag of
the five-blade interferometer sits after the second mirror; that placement
reproduces I_O5 = [2 + cos(chi - phi) - cos(chi + phi)] / 4.

:func:`enumerate_paths` is an independent sum-over-histories route to the
same port amplitudes. It also supports physical 50:50 mirror blades, whose
transmitted branch leaves the interferometer.
"""
import enum
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import su2
from .errors import ValidationError
from .su2 import BladeParams


class GeometryKind(enum.Enum):
    THREE = 3
    FOUR = 4
    FIVE = 5

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "3": cls.THREE, "three": cls.THREE, "threeblade": cls.THREE,
            "4": cls.FOUR, "four": cls.FOUR, "fourblade": cls.FOUR,
            "5": cls.FIVE, "five": cls.FIVE, "fiveblade": cls.FIVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown geometry {value!r}") from None


@dataclass(frozen=True)
class InterferometerSpec:
    kind: GeometryKind
    blade: BladeParams = field(default_factory=BladeParams)
    phi: float = 0.0
    chi: float = 0.0  # ignored unless kind is FIVE
    L: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "kind", GeometryKind.parse(self.kind))
        if not (np.isfinite(self.phi) and np.isfinite(self.chi)):
            raise ValidationError("phase flags must be finite")
        if not self.L > 0:
            raise ValidationError(f"blade separation L must be positive, got {self.L}")


def _elements(kind, alpha, beta, phi, chi, physical_mirrors=False):
    """(role, operator) pairs in time order; role in {blade, mirror, flag}."""
    ub = su2.blade_operator(alpha, beta)
    mirror = su2.blade_operator(np.pi / 2, beta) if physical_mirrors else su2.rot_x(np.pi)
    kind = GeometryKind.parse(kind)
    seq = [("blade", ub), ("flag", su2.rot_z(phi)), ("mirror", mirror)]
    if kind is GeometryKind.THREE:
        seq += [("blade", ub)]
    elif kind is GeometryKind.FOUR:
        seq += [("mirror", mirror), ("blade", ub)]
    else:
        seq += [("blade", ub), ("mirror", mirror), ("flag", su2.rot_z(chi)), ("blade", ub)]
    return seq


def interferometer_operator(kind, alpha, beta, phi, chi=0.0):
    """Vectorized :func:`assemble`: all angle arguments broadcast together."""
    return su2.compose(op for _, op in _elements(kind, alpha, beta, phi, chi))


def assemble(spec):
    """Overall unitary of the ideal-mirror interferometer described by ``spec``."""
    return interferometer_operator(spec.kind, spec.blade.alpha, spec.blade.beta, spec.phi, spec.chi)


def intensities(op, state=su2.PATH_I):
    """(I_O, I_H) = (|<I|op|psi>|^2, |<II|op|psi>|^2); broadcasts over batched ``op``."""
    out = np.asarray(op) @ state.vector
    return np.abs(out[..., 0]) ** 2, np.abs(out[..., 1]) ** 2


def closed_form_intensity(kind, phi, chi=0.0, beta=0.0):
    """Printed 50:50-splitter intensities (I_O, I_H) for input |I>."""
    kind = GeometryKind.parse(kind)
    phi, chi, beta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (phi, chi, beta)))
    if kind is GeometryKind.THREE:
        i_o = 0.5 * (1 + np.cos(phi))
    elif kind is GeometryKind.FOUR:
        i_o = 0.5 * (1 - np.cos(phi + 2 * beta))
    else:
        i_o = 0.25 * (2 + np.cos(chi - phi) - np.cos(chi + phi))
    return i_o, 1 - i_o


@dataclass(frozen=True)
class BeamPath:
    """One classical trajectory: the blade events it took and its amplitude."""

    events: tuple  # ((element_index, "transmit" | "reflect"), ...)
    amplitude: complex
    port: str  # "O", "H" or "loss"

    @property
    def reaches_detector(self):
        return self.port != "loss"


def enumerate_paths(spec, physical_mirrors=False, state=su2.PATH_I):
    """Every trajectory through the blade sequence with its product amplitude.

    Each crystal element branches into its transmitted (label kept) and
    reflected (label swapped) outputs with amplitude ``op[out, in]``. Ideal
    mirrors only reflect. A physical mirror's transmitted branch exits with
    port ``"loss"``. Flags multiply the amplitude without branching.
    """
    if physical_mirrors and not np.isclose(spec.blade.alpha, np.pi / 2, atol=1e-12):
        raise ValidationError("physical 50:50 mirrors require alpha = pi/2")
    seq = _elements(spec.kind, spec.blade.alpha, spec.blade.beta, spec.phi, spec.chi, physical_mirrors)
    # partial paths: (label, amplitude, events)
    live = [(lab, amp, ()) for lab, amp in enumerate(state.vector) if amp != 0]
    done = []
    for index, (role, op) in enumerate(seq):
        step = []
        for lab, amp, events in live:
            if role == "flag":
                step.append((lab, amp * op[lab, lab], events))
                continue
            for out in (0, 1):
                tag = "transmit" if out == lab else "reflect"
                if role == "mirror" and tag == "transmit":
                    if physical_mirrors:
                        done.append(BeamPath(events + ((index, tag),), amp * op[out, lab], "loss"))
                    continue
                step.append((out, amp * op[out, lab], events + ((index, tag),)))
        live = step
    done.extend(BeamPath(events, complex(amp), "OH"[lab]) for lab, amp, events in live)
    return done


def port_intensities(paths):
    """Coherent sum of amplitudes per detector port, squared."""
    total = {"O": 0j, "H": 0j}
    for p in paths:
        if p.reaches_detector:
            total[p.port] += p.amplitude
    return abs(total["O"]) ** 2, abs(total["H"]) ** 2


def trajectory_classes(paths):
    """Group detector-reaching paths by their history before the last blade.

    Returns ``{events_before_last_blade: [paths]}``. For the five-blade
    interferometer there are four classes; see :func:`is_symmetric`.
    """
    classes = defaultdict(list)
    for p in paths:
        if p.reaches_detector:
            classes[p.events[:-1]].append(p)
    return dict(classes)


def is_symmetric(history, kind=GeometryKind.FIVE):
    """Five-blade history in which the middle blade transmitted."""
    if GeometryKind.parse(kind) is not GeometryKind.FIVE:
        raise ValidationError("symmetric/antisymmetric classes are defined for the five-blade geometry")
    middle = dict(history)[3]
    return middle == "transmit"


def throughput(spec, physical_mirrors=False):
    """Fraction of incident neutrons reaching O + H (independent of phi, chi)."""
    return float(sum(port_intensities(enumerate_paths(spec, physical_mirrors))))

