"""Tenseness indicators from formant trajectories.

Core quantities, all over the 33%-66% vowel window:

  theta1      arctan of the F1 slope in Bark per decisecond
  theta_F1    the same angle computed on raw Hz values
  Z(t)        polynomial model of the Bark-converted trajectory
  dZ/dt       instantaneous tenseness change (arctan of it is the
              instantaneous angle)
  d2Z/dt2     tenseness acceleration; for a cubic fit c3 t^3 + c2 t^2 +
              c1 t + c0 it is exactly 6 c3 t + 2 c2

Input times are milliseconds; durations divide by 100 to land in
deciseconds, the unit all angles and derivatives are expressed in. Fits
measure time from the window start so the normal equations stay well
conditioned; a falling first formant gives a negative angle (tense), a
rising one positive (lax).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError, IndicatorError
from .scales import hz_to_bark


class DegenerateDegreeWarning(UserWarning):
    """Acceleration requested from a model of degree < 2."""


@dataclass
class SegmentLabels:
    vowel_label: str = ""
    class_label: str = ""
    language: str = ""
    source: str = ""


@dataclass
class VowelSegment:
    """A labeled vowel interval with its 33%/66% landmarks.

    d_ds is the 33-66% window length in deciseconds.
    """

    onset_ms: float
    offset_ms: float
    t33_ms: float
    t66_ms: float
    d_ds: float
    labels: SegmentLabels = field(default_factory=SegmentLabels)


def landmarks(onset_ms, offset_ms, labels=None):
    """Build the segment geometry: t33, t66 and the window duration."""
    if not (onset_ms < offset_ms):
        raise DomainError(f"onset {onset_ms} must be < offset {offset_ms}")
    length = offset_ms - onset_ms
    t33 = onset_ms + 0.33 * length
    t66 = onset_ms + 0.66 * length
    return VowelSegment(
        onset_ms, offset_ms, t33, t66, (t66 - t33) / 100.0,
        labels or SegmentLabels(),
    )


def sample_at(track, t_ms, channel):
    """Linearly interpolated channel value at t_ms; NaN if a neighbor is missing."""
    times = track.time_ms
    if t_ms < times[0] or t_ms > times[-1]:
        raise DomainError(
            f"t={t_ms} ms outside track span [{times[0]}, {times[-1]}]"
        )
    values = track.channel(channel)
    idx = int(np.searchsorted(times, t_ms))
    if idx < len(times) and times[idx] == t_ms:
        return float(values[idx])
    lo, hi = idx - 1, idx
    if math.isnan(values[lo]) or math.isnan(values[hi]):
        return float("nan")
    frac = (t_ms - times[lo]) / (times[hi] - times[lo])
    return float(values[lo] + frac * (values[hi] - values[lo]))


def _landmark_pair(track, segment, channel):
    v33 = sample_at(track, segment.t33_ms, channel)
    v66 = sample_at(track, segment.t66_ms, channel)
    if math.isnan(v33) or math.isnan(v66):
        raise IndicatorError(
            f"channel {channel!r} missing at a landmark "
            f"(t33={segment.t33_ms} ms, t66={segment.t66_ms} ms)"
        )
    return v33, v66


def theta_n(track, segment, n):
    """Formant angle arctan((Z_n66 - Z_n33) / d) in radians (Bark-based)."""
    if n not in (1, 2, 3):
        raise DomainError(f"formant index must be 1..3, got {n}")
    v33, v66 = _landmark_pair(track, segment, f"f{n}")
    return math.atan((hz_to_bark(v66) - hz_to_bark(v33)) / segment.d_ds)


def theta_f1_hz(track, segment):
    """Hz-based variant of the angle: arctan((F1_66 - F1_33) / d)."""
    v33, v66 = _landmark_pair(track, segment, "f1")
    return math.atan((v66 - v33) / segment.d_ds)


@dataclass
class PolyModel:
    """Least-squares polynomial Z(t), t in deciseconds from window start.

    coefficients are ascending: c0 (Bark), c1 (Bark/ds), c2 (Bark/ds^2)...
    """

    coefficients: np.ndarray
    degree: int
    window_ms: tuple
    residual_rms: float = 0.0

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.degree < 1:
            raise DomainError(f"degree must be >= 1, got {self.degree}")
        if len(self.coefficients) != self.degree + 1:
            raise DomainError("need degree+1 coefficients")
        if not self.window_ms[1] > self.window_ms[0]:
            raise DomainError(f"degenerate window {self.window_ms}")

    @property
    def window_ds(self):
        """Length of the fit window in deciseconds."""
        return (self.window_ms[1] - self.window_ms[0]) / 100.0


def fit_poly(track, window_ms, degree, channel="f1"):
    """Fit Bark-converted channel values on a time window (ms).

    Needs at least degree+2 frames with the channel present inside the
    window. Time is measured in deciseconds from the window start.
    """
    if degree < 1:
        raise DomainError(f"degree must be >= 1, got {degree}")
    a, b = float(window_ms[0]), float(window_ms[1])
    if not a < b:
        raise DomainError(f"empty window [{a}, {b}]")
    values = track.channel(channel)
    inside = (track.time_ms >= a) & (track.time_ms <= b) & ~np.isnan(values)
    n = int(inside.sum())
    if n < degree + 2:
        raise FitError(
            f"{n} usable frames in window [{a}, {b}] ms; "
            f"a degree-{degree} fit needs {degree + 2}"
        )
    t_ds = (track.time_ms[inside] - a) / 100.0
    z = hz_to_bark(values[inside])
    design = np.vander(t_ds, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(design, z, rcond=None)
    if rank < degree + 1:
        raise FitError(
            f"rank-deficient fit (rank {rank} < {degree + 1}); "
            "times may be nearly coincident"
        )
    residual = design @ coeffs - z
    rms = math.sqrt(float(residual @ residual) / n)
    return PolyModel(coeffs, degree, (a, b), rms)


def _check_inside(model, t_ds):
    if t_ds < 0.0 or t_ds > model.window_ds:
        raise DomainError(
            f"t={t_ds} ds outside fit window [0, {model.window_ds}] "
            "(no extrapolation)"
        )


def poly_value(model, t_ds):
    """Z(t) in Bark at t deciseconds from the window start."""
    _check_inside(model, t_ds)
    return float(np.polynomial.polynomial.polyval(t_ds, model.coefficients))


def z_derivative(model, t_ds):
    """Analytic dZ/dt in Bark per decisecond."""
    _check_inside(model, t_ds)
    c = model.coefficients
    powers = np.arange(1, len(c))
    return float(np.sum(powers * c[1:] * np.asarray(t_ds) ** (powers - 1)))


def instantaneous_theta(model, t_ds):
    """Instantaneous formant angle arctan(dZ/dt) in radians."""
    return math.atan(z_derivative(model, t_ds))


def a_tense(model, t_ds):
    """Tenseness acceleration d2Z/dt2 in Bark per decisecond squared.

    For degree < 2 there is no curvature; returns 0 with a warning.
    """
    _check_inside(model, t_ds)
    if model.degree < 2:
        warnings.warn(
            f"degree-{model.degree} model has zero acceleration",
            DegenerateDegreeWarning,
            stacklevel=2,
        )
        return 0.0
    c = model.coefficients
    powers = np.arange(2, len(c))
    return float(np.sum(powers * (powers - 1) * c[2:] * np.asarray(t_ds) ** (powers - 2)))


def deviation_index(f1_hz, f_neu_hz):
    """|F1 - F_neu| in Hz: distance from the neutral-tract first formant."""
    if f1_hz <= 0 or f_neu_hz <= 0:
        raise DomainError("frequencies must be positive")
    return abs(f1_hz - f_neu_hz)


@dataclass
class TensenessRecord:
    """Per-vowel indicator bundle. Optional fields are None when absent."""

    theta1_rad: float
    theta_f1_rad: float
    f1_33_hz: float
    z1_33_bark: float
    d_ds: float
    f0_33_hz: float | None = None
    f0_66_hz: float | None = None
    delta_f0_hz: float | None = None
    labels: SegmentLabels = field(default_factory=SegmentLabels)


def indicators(track, segment):
    """Assemble the full indicator record for one vowel segment.

    F1 must be present at both landmarks; F0 fields stay None when pitch
    is missing at either landmark (no imputation).
    """
    f1_33, f1_66 = _landmark_pair(track, segment, "f1")
    theta1 = math.atan((hz_to_bark(f1_66) - hz_to_bark(f1_33)) / segment.d_ds)
    theta_f1 = math.atan((f1_66 - f1_33) / segment.d_ds)

    f0_33 = sample_at(track, segment.t33_ms, "f0")
    f0_66 = sample_at(track, segment.t66_ms, "f0")
    have_f0 = not (math.isnan(f0_33) or math.isnan(f0_66))
    return TensenessRecord(
        theta1_rad=theta1,
        theta_f1_rad=theta_f1,
        f1_33_hz=f1_33,
        z1_33_bark=hz_to_bark(f1_33),
        d_ds=segment.d_ds,
        f0_33_hz=None if math.isnan(f0_33) else f0_33,
        f0_66_hz=None if math.isnan(f0_66) else f0_66,
        delta_f0_hz=(f0_66 - f0_33) if have_f0 else None,
        labels=segment.labels,
    )
