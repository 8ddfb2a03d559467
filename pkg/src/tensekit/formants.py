"""LPC formant tracking and autocorrelation F0 estimation from raw audio.

Per-frame pipeline: pre-emphasis, Hamming window, Levinson-Durbin LPC,
polynomial root solving. Candidates inside the formant band become F1..F3.
No inter-frame continuity smoothing is applied; each frame stands alone,
which is a known fidelity limitation versus tracker-style tools.

Identical audio and config give bit-identical tracks.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, TensekitError
from .ingest import AudioBuffer, FormantTrack


class ExtractionError(TensekitError):
    """A single frame's analysis failed (e.g. root finder did not converge)."""


@dataclass
class LpcModel:
    """Forward predictor A(z) = 1 + a1 z^-1 + ... + ap z^-p.

    gain is the square root of the final prediction-error energy from the
    Levinson recursion (autocorrelation units).
    """

    coefficients: np.ndarray
    order: int
    gain: float

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.order < 2:
            raise DomainError(f"LPC order must be >= 2, got {self.order}")
        if len(self.coefficients) != self.order:
            raise DomainError("coefficient count must equal the order")
        if self.gain < 0:
            raise DomainError("gain must be non-negative")

    @property
    def prediction_polynomial(self):
        """[1, a1, ..., ap] — the inverse-filter polynomial."""
        return np.concatenate(([1.0], self.coefficients))


@dataclass
class ExtractionConfig:
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    preemphasis: float = 0.97
    lpc_order: int | None = None  # None: 2 + round(sample_rate/1000)
    max_formant_hz: float = 5500.0
    bandwidth_max_hz: float = 400.0
    f0_min_hz: float = 60.0
    f0_max_hz: float = 400.0
    voicing_threshold: float = 0.3

    def __post_init__(self):
        if not (self.frame_ms > self.hop_ms > 0):
            raise ConfigError(
                f"need frame_ms > hop_ms > 0, got {self.frame_ms}/{self.hop_ms}"
            )
        if not (0 <= self.preemphasis < 1):
            raise ConfigError(f"preemphasis must be in [0, 1), got {self.preemphasis}")
        if not (0 < self.f0_min_hz < self.f0_max_hz):
            raise ConfigError(
                f"need 0 < f0_min < f0_max, got {self.f0_min_hz}/{self.f0_max_hz}"
            )

    def order_for(self, sample_rate_hz):
        return self.lpc_order if self.lpc_order else 2 + round(sample_rate_hz / 1000)

    def validate_for(self, sample_rate_hz):
        """Sanity checks that need the sample rate (lag band, frame size)."""
        if sample_rate_hz / self.f0_max_hz < 2:
            raise ConfigError(
                f"f0_max {self.f0_max_hz} Hz leaves under 2 samples of lag "
                f"at {sample_rate_hz} Hz"
            )
        frame_len = round(sample_rate_hz * self.frame_ms / 1000.0)
        if frame_len <= self.order_for(sample_rate_hz):
            raise ConfigError("frame shorter than the LPC order")


def lpc_coefficients(frame, order):
    """Fit an order-p forward predictor by Levinson-Durbin.

    Returns None for a zero-energy frame (silence indicator). Reflection
    coefficients are clamped to (-1, 1) to keep the recursion stable on
    near-singular autocorrelation sequences.
    """
    frame = np.asarray(frame, dtype=float)
    if order < 2:
        raise DomainError(f"order must be >= 2, got {order}")
    if len(frame) <= order:
        raise DomainError(f"frame length {len(frame)} must exceed order {order}")
    n = len(frame)
    full = np.correlate(frame, frame, mode="full")
    r = full[n - 1 : n + order]
    if r[0] <= 0.0:
        return None

    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    clamp = 1.0 - 1e-12
    for i in range(1, order + 1):
        acc = r[i] + a[1:i] @ r[i - 1 : 0 : -1]
        k = -acc / err
        if k >= clamp:
            k = clamp
        elif k <= -clamp:
            k = -clamp
        prev = a[: i + 1].copy()
        for j in range(1, i):
            a[j] = prev[j] + k * prev[i - j]
        a[i] = k
        err *= 1.0 - k * k
    return LpcModel(a[1:], order, math.sqrt(max(err, 0.0)))


def formants_from_lpc(model, sample_rate_hz, max_formant_hz=5500.0,
                      bandwidth_max_hz=400.0):
    """Formant candidates (frequency_hz, bandwidth_hz) from predictor roots.

    Roots with strictly positive imaginary part map to f = angle*fs/(2*pi)
    and bw = -ln|r|*fs/pi; kept if 50 < f < max_formant_hz and
    bw < bandwidth_max_hz, sorted by frequency.
    """
    fs = float(sample_rate_hz)
    try:
        roots = np.roots(model.prediction_polynomial)
    except np.linalg.LinAlgError as exc:
        raise ExtractionError(f"root finding failed: {exc}") from exc
    roots = roots[roots.imag > 0.0]
    freqs = np.angle(roots) * fs / (2.0 * math.pi)
    mags = np.abs(roots)
    with np.errstate(divide="ignore"):
        bws = -np.log(mags) * fs / math.pi
    keep = (freqs > 50.0) & (freqs < max_formant_hz) & (bws < bandwidth_max_hz)
    pairs = sorted(zip(freqs[keep], bws[keep]))
    return [(float(f), float(b)) for f, b in pairs]


def _frame_grid(n_samples, frame_len, hop):
    n_frames = (n_samples - frame_len) // hop + 1
    return [i * hop for i in range(n_frames)]


def track_formants(audio, config=None):
    """Run the LPC pipeline over an AudioBuffer; returns a FormantTrack.

    Frame times are window centers in ms. Per-frame failures (silence,
    root-finder trouble, no candidates in band) become missing values;
    the track as a whole is always produced.
    """
    config = config or ExtractionConfig()
    fs = audio.sample_rate_hz
    config.validate_for(fs)
    frame_len = round(fs * config.frame_ms / 1000.0)
    hop = round(fs * config.hop_ms / 1000.0)
    x = audio.samples
    if len(x) < frame_len:
        raise DomainError(
            f"audio has {len(x)} samples, needs at least one {frame_len}-sample frame"
        )
    starts = _frame_grid(len(x), frame_len, hop)
    if len(starts) < 2:
        raise DomainError("audio too short for a 2-frame track")

    emphasized = np.concatenate(([x[0]], x[1:] - config.preemphasis * x[:-1]))
    window = np.hamming(frame_len)
    order = config.order_for(fs)

    times = np.empty(len(starts))
    formants = np.full((len(starts), 3), np.nan)
    for i, start in enumerate(starts):
        times[i] = (start + frame_len / 2.0) / fs * 1000.0
        model = lpc_coefficients(window * emphasized[start : start + frame_len], order)
        if model is None:
            continue
        try:
            candidates = formants_from_lpc(
                model, fs, config.max_formant_hz, config.bandwidth_max_hz
            )
        except ExtractionError:
            continue
        for j, (freq, _bw) in enumerate(candidates[:3]):
            formants[i, j] = freq
    f0 = np.full(len(starts), np.nan)
    return FormantTrack(times, formants[:, 0], formants[:, 1], formants[:, 2], f0)


def estimate_f0(audio, config=None):
    """Autocorrelation pitch per frame: list of (time_ms, f0_hz or None).

    The normalized autocorrelation peak inside the lag band
    [fs/f0_max, fs/f0_min] must clear the voicing threshold; the peak lag
    is refined by parabolic interpolation before conversion to Hz.
    """
    config = config or ExtractionConfig()
    fs = audio.sample_rate_hz
    config.validate_for(fs)
    frame_len = round(fs * config.frame_ms / 1000.0)
    hop = round(fs * config.hop_ms / 1000.0)
    x = audio.samples
    if len(x) < frame_len:
        raise DomainError("audio shorter than one frame")

    lag_min = max(2, math.ceil(fs / config.f0_max_hz))
    lag_max = min(frame_len - 1, math.floor(fs / config.f0_min_hz))
    if lag_min >= lag_max:
        raise ConfigError(
            f"lag band [{lag_min}, {lag_max}] empty for frame of {frame_len}"
        )

    out = []
    for start in _frame_grid(len(x), frame_len, hop):
        t_ms = (start + frame_len / 2.0) / fs * 1000.0
        frame = x[start : start + frame_len]
        frame = frame - frame.mean()
        ac = np.correlate(frame, frame, mode="full")[frame_len - 1 :]
        if ac[0] <= 0.0:
            out.append((t_ms, None))
            continue
        norm = ac / ac[0]
        band = norm[lag_min : lag_max + 1]
        peak = int(np.argmax(band)) + lag_min
        if norm[peak] < config.voicing_threshold:
            out.append((t_ms, None))
            continue
        lag = _refine_peak(norm, peak)
        out.append((t_ms, fs / lag))
    return out


def _refine_peak(values, i):
    """Parabolic sub-sample refinement of a peak at index i."""
    if i <= 0 or i >= len(values) - 1:
        return float(i)
    left, mid, right = values[i - 1], values[i], values[i + 1]
    denom = left - 2.0 * mid + right
    if denom == 0.0:
        return float(i)
    delta = 0.5 * (left - right) / denom
    return i + float(np.clip(delta, -0.5, 0.5))


def extract_track(audio, config=None, source_id=""):
    """track_formants + estimate_f0 merged into one FormantTrack.

    Both passes use the same framing, so the F0 estimates line up with the
    formant frames one-to-one.
    """
    config = config or ExtractionConfig()
    track = track_formants(audio, config)
    pitch = estimate_f0(audio, config)
    f0 = np.array([np.nan if f is None else f for _, f in pitch])
    if len(f0) != len(track.time_ms):
        raise ExtractionError("formant and pitch framing disagree")
    return FormantTrack(track.time_ms, track.f1_hz, track.f2_hz, track.f3_hz,
                        f0, source_id)
