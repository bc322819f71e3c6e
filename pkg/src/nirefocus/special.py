"""Bessel function J0 for real arguments.

|x| < 8 uses the Maclaurin series; larger |x| uses Miller's backward
recurrence normalized with J0 + 2 sum_k J_2k = 1, which stays accurate to
~1e-15 absolute for the whole |x| <= 50 working range and beyond.
"""
import math

import numpy as np

_SERIES_LIMIT = 8.0


def _j0_series(x):
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-17 * max(1.0, abs(total)) and k > 2:
            return total


def _j0_miller(x):
    ax = abs(x)
    # start index: even, well beyond the turning point n ~ |x|
    n = 2 * (int(ax + 30 + 12 * ax ** (1 / 3)) // 2 + 1)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    j0 = 0.0
    for k in range(n, 0, -1):
        j_prev = 2 * k / ax * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            j_next *= 1e-250
            j_cur *= 1e-250
            norm *= 1e-250
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2 * j_cur
        if k - 1 == 0:
            j0 = j_cur
    norm += j0
    return j0 / norm


def _j0_scalar(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"bessel_j0: non-finite argument {x}")
    if abs(x) < _SERIES_LIMIT:
        return _j0_series(x)
    return _j0_miller(x)


def bessel_j0(x):
    """J0(x); scalars in, float out; arrays in, array out."""
    if np.ndim(x) == 0:
        return _j0_scalar(x)
    x = np.asarray(x, dtype=float)
    return np.array([_j0_scalar(v) for v in x.ravel()]).reshape(x.shape)
