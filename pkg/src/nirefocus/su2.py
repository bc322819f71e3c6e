"""Two-level (path qubit) operator algebra.

Operators are complex numpy arrays of shape ``(..., 2, 2)`` acting on the
basis ``(|I>, |II>)``. All rotation constructors broadcast over array
arguments, so a whole parameter grid can be assembled in one call.

Sign convention: ``R_n(theta) = exp(+i theta n.sigma / 2)``.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DomainError, UsageError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY):
    _m.flags.writeable = False


def _finite(name, *values):
    arrays = [np.asarray(v, dtype=float) for v in values]
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DomainError(f"{name}: non-finite angle {a!r}")
    return arrays if len(arrays) > 1 else arrays[0]


def _frozen(op):
    op.flags.writeable = False
    return op


def rot_z(phi):
    """diag(e^{i phi/2}, e^{-i phi/2})."""
    phi = _finite("rot_z", phi)
    op = np.zeros(phi.shape + (2, 2), dtype=complex)
    op[..., 0, 0] = np.exp(0.5j * phi)
    op[..., 1, 1] = np.exp(-0.5j * phi)
    return _frozen(op)


def rot_x(alpha):
    """cos(alpha/2) 1 + i sin(alpha/2) sigma_x."""
    alpha = _finite("rot_x", alpha)
    c, s = np.cos(0.5 * alpha), np.sin(0.5 * alpha)
    op = np.empty(alpha.shape + (2, 2), dtype=complex)
    op[..., 0, 0] = c
    op[..., 1, 1] = c
    op[..., 0, 1] = 1j * s
    op[..., 1, 0] = 1j * s
    return _frozen(op)


def rot_xy(phi_r, alpha):
    """exp(i alpha (cos phi_r sigma_x + sin phi_r sigma_y) / 2).

    ``rot_xy(0, alpha)`` is entrywise identical to ``rot_x(alpha)``.
    """
    phi_r, alpha = _finite("rot_xy", phi_r, alpha)
    phi_r, alpha = np.broadcast_arrays(phi_r, alpha)
    c, s = np.cos(0.5 * alpha), np.sin(0.5 * alpha)
    op = np.empty(alpha.shape + (2, 2), dtype=complex)
    op[..., 0, 0] = c
    op[..., 1, 1] = c
    op[..., 0, 1] = 1j * s * np.exp(-1j * phi_r)
    op[..., 1, 0] = 1j * s * np.exp(1j * phi_r)
    return _frozen(op)


@dataclass(frozen=True)
class BladeParams:
    """Splitting angle ``alpha`` in [0, pi] and dynamical phase ``beta``."""

    alpha: float = np.pi / 2
    beta: float = 0.0

    def __post_init__(self):
        _finite("BladeParams", self.alpha, self.beta)
        if not 0.0 <= self.alpha <= np.pi:
            raise DomainError(f"alpha must lie in [0, pi], got {self.alpha}")

    @property
    def t(self):
        return float(np.cos(self.alpha / 2))

    @property
    def r(self):
        return float(np.sin(self.alpha / 2))


def blade_operator(alpha, beta=0.0):
    """Crystal blade as the composite rotation R_z(beta) R_x(alpha) R_z(beta).

    Accepts a :class:`BladeParams` or raw (broadcastable) angles. The
    transmission entry is ``e^{i beta} cos(alpha/2)``.
    """
    if isinstance(alpha, BladeParams):
        alpha, beta = alpha.alpha, alpha.beta
    zb = rot_z(beta)
    return _frozen(zb @ rot_x(alpha) @ zb)


def compose(sequence):
    """Product of operators in time order.

    The first element acts first on the state, so ``compose([A, B, C])``
    returns ``C @ B @ A``.
    """
    sequence = list(sequence)
    if not sequence:
        raise UsageError("compose() needs at least one operator")
    return _frozen(np.asarray(reduce(lambda acc, op: op @ acc, sequence[1:], sequence[0])))


def dagger(op):
    return np.conj(np.swapaxes(op, -1, -2))


def unitarity_error(op):
    """max |U^dagger U - 1| over entries (and over any batch axes)."""
    return float(np.max(np.abs(dagger(op) @ op - IDENTITY)))


def equal_up_to_global_phase(a, b, tol=1e-12):
    """True iff ``a ~ c b`` for some unit-modulus ``c`` within ``tol`` (max-norm).

    ``c`` is taken from the ratio at the largest-modulus entry of ``b``.
    """
    if tol <= 0:
        raise UsageError("tol must be positive")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) == 0.0:
        return bool(np.max(np.abs(a)) < tol)
    ratio = a[k] / b[k]
    if ratio == 0:
        return False
    c = ratio / abs(ratio)
    return bool(np.max(np.abs(a - c * b)) < tol)


@dataclass(frozen=True)
class PathState:
    """Normalized pure state a_I |I> + a_II |II>."""

    amplitude_I: complex
    amplitude_II: complex

    def __post_init__(self):
        norm = abs(self.amplitude_I) ** 2 + abs(self.amplitude_II) ** 2
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise DomainError(f"path state not normalized (|a|^2 = {norm!r})")

    @classmethod
    def normalized(cls, a_I, a_II):
        n = np.hypot(abs(a_I), abs(a_II))
        if n == 0:
            raise DomainError("zero vector cannot be normalized")
        return cls(complex(a_I) / n, complex(a_II) / n)

    @property
    def vector(self):
        return np.array([self.amplitude_I, self.amplitude_II], dtype=complex)

    def apply(self, op):
        """Return ``op |self>``; raises DomainError if ``op`` broke the norm."""
        v = np.asarray(op) @ self.vector
        return PathState(complex(v[0]), complex(v[1]))


PATH_I = PathState(1.0 + 0j, 0j)
PATH_II = PathState(0j, 1.0 + 0j)
