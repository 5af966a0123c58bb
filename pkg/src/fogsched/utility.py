"""Throughput utility functions U(x), their derivatives and inverse derivatives.

Two families are supported:

* ``log1p``:      U(x) = ln(1 + x)
* ``alpha_fair``: U(x) = x**(1 - a) / (1 - a), 0 < a < 1

Both are increasing and concave on x >= 0 and have a closed-form inverse of
U', which keeps the auxiliary-variable step of the scheduler closed-form.
"""

from __future__ import annotations

import numpy as np


def _check_kind(kind: str, alpha: float) -> None:
    if kind == "log1p":
        return
    if kind == "alpha_fair":
        if not 0 < alpha < 1:
            raise ValueError(f"alpha_fair needs 0 < alpha < 1, got {alpha}")
        return
    raise ValueError(f"unknown utility kind {kind!r}")


def utility(kind: str, x, alpha: float = 0.5):
    """U(x) elementwise; ``x`` must be non-negative."""
    _check_kind(kind, alpha)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("utility is defined for x >= 0 only")
    if kind == "log1p":
        out = np.log1p(x)
    else:
        out = x ** (1.0 - alpha) / (1.0 - alpha)
    return out if out.ndim else float(out)


def utility_prime(kind: str, x, alpha: float = 0.5):
    _check_kind(kind, alpha)
    x = np.asarray(x, dtype=float)
    if kind == "log1p":
        out = 1.0 / (1.0 + x)
    else:
        with np.errstate(divide="ignore"):
            out = x ** (-alpha)
    return out if out.ndim else float(out)


def utility_prime_inverse(kind: str, y, alpha: float = 0.5):
    """(U')^{-1}(y), clamped below at zero.

    y = 0 maps to +inf (U' never reaches zero); the caller clamps to the
    admissible range.  Non-finite or negative ``y`` is rejected.
    """
    _check_kind(kind, alpha)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("utility_prime_inverse needs finite y")
    if np.any(y < 0):
        raise ValueError("utility_prime_inverse needs y >= 0")
    with np.errstate(divide="ignore"):
        if kind == "log1p":
            out = np.maximum(1.0 / y - 1.0, 0.0)
        else:
            out = y ** (-1.0 / alpha)
    return out if out.ndim else float(out)
