"""Real-axis gamma function with first-class negative arguments.

The long-time behaviour of fractional-wave solutions hinges on signs of
gamma at negative non-integer arguments (e.g. Gamma(1 - alpha) < 0 for
alpha in (1, 2)), so reflection is not an afterthought here: ``gamma``
supports the whole real line except the poles, and ``rgamma`` is the
entire reciprocal, returning exact zeros at the poles.
"""

from __future__ import annotations

import math

__all__ = ["GammaPoleError", "gamma", "loggamma", "rgamma", "sinpi"]

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
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

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Above this the direct Lanczos product overflows in intermediates;
# switch to exp(loggamma), which is accurate to ~1e-13 relative there.
_DIRECT_MAX = 130.0


class GammaPoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def sinpi(x: float) -> float:
    """sin(pi*x) with exact integer-argument zeros via argument reduction."""
    m = math.floor(x)
    d = x - m
    if d == 0.0:
        return 0.0
    s = math.sin(math.pi * d)
    return -s if (int(m) & 1) else s


def _lanczos_sum(x: float) -> float:
    s = _LANCZOS_P[0]
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        s += p / (x + i)
    return s


def _gamma_positive(x: float) -> float:
    # valid for x >= 0.5
    if x > _DIRECT_MAX:
        return math.exp(loggamma(x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def gamma(x: float) -> float:
    """Gamma(x) for real x, raising GammaPoleError at 0, -1, -2, ..."""
    if math.isnan(x) or math.isinf(x):
        raise GammaPoleError(f"gamma argument must be finite, got {x}")
    if _is_nonpositive_int(x):
        raise GammaPoleError(f"gamma pole at x = {x}")
    if x == math.floor(x) and 1.0 <= x <= 21.0:
        return float(math.factorial(int(x) - 1))
    if x >= 0.5:
        return _gamma_positive(x)
    # reflection: Gamma(x) = pi / (sin(pi x) * Gamma(1 - x))
    return math.pi / (sinpi(x) * _gamma_positive(1.0 - x))


def rgamma(x: float) -> float:
    """1/Gamma(x), entire; exactly 0.0 at the poles of Gamma."""
    if _is_nonpositive_int(x):
        return 0.0
    if x >= 0.5:
        g = gamma(x)
        if math.isinf(g):
            return 0.0
        return 1.0 / g
    return sinpi(x) * gamma(1.0 - x) / math.pi


def loggamma(x: float) -> float:
    """log Gamma(x) for x > 0 (Lanczos, log form)."""
    if x <= 0.0:
        raise GammaPoleError(f"loggamma requires x > 0, got {x}")
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return (
        0.5 * math.log(2.0 * math.pi)
        + (z + 0.5) * math.log(t)
        - t
        + math.log(_lanczos_sum(z))
    )
