"""The auxiliary function ``g`` and its relatives ``s`` and ``h``.

``g(x) = sqrt(x / (2^x - 1)) * (2^x x ln2 - 2^x + 1)`` has a 0/0 form at
the origin and overflows naively well before ``2^x`` itself does, so both
ends get their own branch. All functions accept scalars or arrays.
"""

import math

import numpy as np

LN2 = math.log(2.0)

# below this value of y = x ln2 the bracket term is summed as a power series
_SERIES_Y = 1.0
_N_TERMS = 24
_COEF = np.array([(n - 1) / math.factorial(n) for n in range(2, _N_TERMS + 2)])


def _bracket(y):
    """``e^y y - e^y + 1``, the numerator shared by g and s."""
    # small branch: sum_{n>=2} y^n (n-1)/n!
    ys = np.where(y < _SERIES_Y, y, 0.0)
    acc = np.zeros_like(ys)
    for c in _COEF[::-1]:
        acc = (acc + c) * ys
    small = acc * ys
    with np.errstate(over="ignore", invalid="ignore"):
        big = np.exp(y) * (y - 1.0 + np.exp(-y))
    return np.where(y < _SERIES_Y, small, big)


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def g(x):
    """``sqrt(x/(2^x-1)) (2^x x ln2 - 2^x + 1)``, with ``g(0) = 0``.

    Strictly increasing; behaves like ``(ln2)^(3/2) x^2 / 2`` near zero.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("g is defined for x >= 0")
    y = x * LN2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # sqrt(x / (1 - 2^-x)) * 2^(x/2) * (y - 1 + 2^-x) is the large-x form
        small = np.sqrt(x / np.expm1(y)) * _bracket(y)
        big = (np.sqrt(x / -np.expm1(-y)) * np.exp(0.5 * y)
               * (y - 1.0 + np.exp(-y)))
        out = np.where(y < _SERIES_Y, small, big)
    return _out(np.where(x == 0, 0.0, out))


def g_over_sqrt(x):
    """``g(x) / sqrt(x)``, strictly increasing and unbounded on ``x > 0``."""
    x = np.asarray(x, dtype=float)
    y = x * LN2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        small = _bracket(y) / np.sqrt(np.expm1(y))
        big = np.exp(0.5 * y) * (y - 1.0 + np.exp(-y)) / np.sqrt(-np.expm1(-y))
        out = np.where(y < _SERIES_Y, small, big)
    return _out(np.where(x == 0, 0.0, out))


def s(x):
    """``(2^x - 1) / (2^x x ln2 - 2^x + 1)`` for ``x > 0``; strictly decreasing."""
    x = np.asarray(x, dtype=float)
    y = x * LN2
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = -np.expm1(-y) / (y - 1.0 + np.exp(-y))
        small = np.expm1(y) / _bracket(y)
    return _out(np.where(y < _SERIES_Y, small, big))


def h(x):
    """``(1 + 2 s(x)) / x`` for ``x > 0``; strictly decreasing."""
    x = np.asarray(x, dtype=float)
    return _out((1.0 + 2.0 * np.asarray(s(x))) / x)
