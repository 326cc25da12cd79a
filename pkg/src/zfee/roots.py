"""Bracketed bisection for strictly increasing functions.

Works elementwise on arrays of targets so that fuzz-scale root solving
(tens of thousands of independent equations) stays a handful of numpy
passes instead of a Python loop per equation.
"""

import numpy as np


class BracketError(RuntimeError):
    """Raised when geometric expansion fails to bracket a root."""


def bisect_increasing(func, target, lo=1e-6, hi=1.0, *, xtol=0.0,
                      rtol=4 * np.finfo(float).eps, maxiter=200,
                      max_expand=1100):
    """Solve ``func(x) == target`` for a strictly increasing ``func``.

    Parameters
    ----------
    func : callable
        Vectorized, strictly increasing on ``(0, inf)``.
    target : float or array_like
        Right-hand side(s). Each element is solved independently.
    lo, hi : float
        Initial bracket; grown geometrically (halving ``lo``, doubling
        ``hi``) until it contains every root.
    xtol, rtol : float
        Stop once ``hi - lo <= xtol + rtol * |x|`` for every element.
        The default runs to machine precision, which is what the
        residual tolerances downstream actually need.
    maxiter : int
        Bisection step cap.
    max_expand : int
        Cap on bracket doublings/halvings.

    Returns
    -------
    float or ndarray
        The root(s), shaped like ``target``.
    """
    t = np.asarray(target, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if not np.all(np.isfinite(t)):
        raise BracketError("non-finite target")
    a = np.full(t.shape, float(lo))
    b = np.full(t.shape, float(hi))

    for _ in range(max_expand):
        low = func(a) > t
        if not low.any():
            break
        a = np.where(low, a * 0.5, a)
    else:
        raise BracketError("could not bracket root from below")
    for _ in range(max_expand):
        high = func(b) < t
        if not high.any():
            break
        b = np.where(high, b * 2.0, b)
    else:
        raise BracketError("could not bracket root from above")

    for _ in range(maxiter):
        mid = 0.5 * (a + b)
        below = func(mid) < t
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
        if np.all(b - a <= xtol + rtol * np.abs(mid)):
            break

    fa = np.abs(func(a) - t)
    fb = np.abs(func(b) - t)
    x = np.where(fa <= fb, a, b)
    return float(x[0]) if scalar else x
