"""Gamma function via the Lanczos approximation.

Self-contained so the fractional-weight code does not pull in scipy.
The g=7, n=9 coefficient set keeps the relative error near machine
precision over the argument range used here (0 < x <= ~30).
"""

import math

from .errors import DomainError

# Lanczos coefficients for g = 7, n = 9.
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

_MAX_EXACT_INT = 23  # factorial stays within float64 precision headroom


def gamma(x: float) -> float:
    """Gamma(x) for real x > 0.

    Integer arguments up to 23 are returned exactly via the factorial so
    that order-1 weight formulas collapse without rounding residue.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires a positive finite argument, got {x!r}")
    if x == math.floor(x) and x <= _MAX_EXACT_INT:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        # Reflection keeps the series argument in its accurate range.
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc
