import math

import numpy as np
from scipy.special import gamma


def is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def sphere_area(d):
    """Area of the unit sphere ``S^(d-1)`` in ``R^d``."""
    return 2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0)


def ball_volume(d):
    """Volume of the unit ball in ``R^d``."""
    return math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)


def sup_norm(arr):
    arr = np.asarray(arr)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def relative_difference(a, b, floor=1e-300):
    return abs(a - b) / max(abs(a), abs(b), floor)


def integrate_series(times, values, a, b):
    """Trapezoid integral of a sampled series over ``[a, b]``.

    Endpoints between samples are linearly interpolated, so the result
    depends only on the samples and the interval.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if b <= a:
        return 0.0
    inner = (times > a) & (times < b)
    t = np.concatenate(([a], times[inner], [b]))
    v = np.concatenate(([np.interp(a, times, values)], values[inner], [np.interp(b, times, values)]))
    return float(np.trapz(v, t))
