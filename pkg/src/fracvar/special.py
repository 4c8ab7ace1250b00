"""Gamma function on the positive real axis.

Lanczos approximation with g = 7 and 9 coefficients, combined with the
recurrence Gamma(z) = Gamma(z+1)/z below z = 0.5.  Relative error stays
below 1e-13 on (0, 20], comfortably inside the 1e-12 contract.
"""

from __future__ import annotations

import math

__all__ = ["gamma"]

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma(z: float) -> float:
    """Gamma(z) for real z > 0.

    Raises ValueError for z <= 0 or non-finite z; negative arguments are
    out of scope here (orders live in (0, 1) and power-rule exponents are
    nonnegative, so the reflection formula is never needed).
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"gamma: argument must be finite, got {z!r}")
    if z <= 0.0:
        raise ValueError(f"gamma: argument must be positive, got {z!r}")
    if z < 0.5:
        # one recurrence step moves the argument into Lanczos territory
        return _lanczos(z + 1.0) / z
    return _lanczos(z)


def _lanczos(z: float) -> float:
    # valid for z >= 0.5
    z = z - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * math.exp(-t) * acc
