import numpy as np


def bisect_increasing(fun, lo, hi, tol, max_iter=200):
    """Elementwise bisection for roots of a nondecreasing function.

    ``fun`` maps an array of points to an array of values; ``lo`` and ``hi``
    must satisfy ``fun(lo) <= 0 <= fun(hi)`` elementwise. Returns the final
    ``(lo, hi)`` brackets, whose width is at most ``tol`` unless ``max_iter``
    ran out first (float resolution reached).
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        stalled = (mid <= lo) | (mid >= hi)
        if np.all(stalled | (hi - lo <= tol)):
            break
        up = np.asarray(fun(mid)) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return lo, hi
