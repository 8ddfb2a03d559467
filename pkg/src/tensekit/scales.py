"""Hertz <-> Bark conversions (Traunmueller's analytic form).

Z = 26.81 / (1 + 1960/f) - 0.53

The forward map is strictly increasing and bounded: Z -> -0.53 as f -> 0+
and Z -> 26.28 as f -> inf, so valid Bark values live in the open interval
(-0.53, 26.28). Conversions are plain double arithmetic; no lookup tables,
so derivative chains built on top stay exact.

Both functions accept floats or numpy arrays and reject out-of-domain
inputs (including NaN) instead of clamping, so upstream extraction bugs
surface here rather than three modules later.
"""

import numpy as np

from .errors import DomainError

# Open-interval bounds of the conversion's range.
BARK_MIN = -0.53
BARK_MAX = 26.28


def hz_to_bark(f):
    """Convert frequency in Hz (> 0) to Bark."""
    arr = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(arr) & (arr > 0.0)):
        raise DomainError(f"frequency must be finite and > 0 Hz, got {f!r}")
    z = 26.81 / (1.0 + 1960.0 / arr) - 0.53
    return float(z) if arr.ndim == 0 else z


def bark_to_hz(z):
    """Invert hz_to_bark. Valid for Bark values in (-0.53, 26.28)."""
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr) & (arr > BARK_MIN) & (arr < BARK_MAX)):
        raise DomainError(
            f"Bark value must lie in ({BARK_MIN}, {BARK_MAX}), got {z!r}"
        )
    f = 1960.0 * (arr + 0.53) / (26.28 - arr)
    return float(f) if arr.ndim == 0 else f
