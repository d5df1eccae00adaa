"""Real-argument Bessel and Hankel functions of orders 0, 1, 2.

The Green's tensor of the 2D Navier equation needs ``J_n``, ``Y_n`` and the
first-kind Hankel function ``H_n = J_n + i Y_n`` only for orders ``n`` in
``{0, 1, 2}`` and strictly positive real arguments.  These wrappers enforce
that contract loudly (domain errors instead of NaN propagating into solver
matrices) and are backed by ``scipy.special``, which is accurate to machine
precision over the whole argument range used here (``x <= 1e4``).  The test
suite cross-checks every order against an independent ascending-series
implementation.
"""

from __future__ import annotations

import numpy as np
from scipy import special

SUPPORTED_ORDERS = (0, 1, 2)


def _check_order(n: int) -> None:
    if n not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported order {n!r}; supported orders are {SUPPORTED_ORDERS}")


def _check_argument(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise ValueError("argument must be finite and > 0")
    return x


def bessel_j(n: int, x):
    """Bessel function of the first kind ``J_n(x)`` for ``x > 0``.

    Accepts scalars or arrays; scalar input returns a float.
    """
    _check_order(n)
    x = _check_argument(x)
    out = special.jv(n, x)
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("non-finite J_n value")
    return float(out) if out.ndim == 0 else out


def bessel_y(n: int, x):
    """Bessel function of the second kind ``Y_n(x)`` for ``x > 0``.

    ``Y_n`` diverges (to -inf) as ``x -> 0+``; for any representable positive
    ``x`` the returned value is finite (large negative near zero), never NaN.
    """
    _check_order(n)
    x = _check_argument(x)
    out = special.yv(n, x)
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("non-finite Y_n value")
    return float(out) if out.ndim == 0 else out


def hankel1(n: int, x):
    """Hankel function of the first kind ``H^(1)_n(x) = J_n(x) + i Y_n(x)``."""
    _check_order(n)
    x = _check_argument(x)
    out = special.hankel1(n, x)
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("non-finite H^(1)_n value")
    return complex(out) if out.ndim == 0 else out
