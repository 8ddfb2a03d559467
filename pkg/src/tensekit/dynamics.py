"""Articulatory force model and forward simulators.

The force of tenseness is F(t) = m * k * a(t), with a(t) the second time
derivative of the Bark-scaled F1 trajectory. m and k default to 1: the
force is only ever used comparatively, so it is reported in relative
units with the constants echoed in output metadata.

Simulators integrate with fixed-step classical RK4 (deterministic across
platforms, no adaptive stepping). The x-axis simulator treats Bark-space
acceleration as proportional to displacement acceleration via k; the
y-axis helper is a plain harmonic oscillator. synth_track closes the
loop: it double-integrates a prescribed acceleration into a Z(t)
trajectory and emits the corresponding F1 track, giving the analysis
pipeline an input with known ground truth.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SimulationError
from .ingest import FormantTrack
from .scales import BARK_MAX, BARK_MIN, bark_to_hz


@dataclass
class ForceConstants:
    mass_m: float = 1.0
    coeff_k: float = 1.0

    def __post_init__(self):
        for name in ("mass_m", "coeff_k"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")


def f_tense(constants, a_tense_value):
    """Force of tenseness m * k * a (relative units)."""
    return constants.mass_m * constants.coeff_k * a_tense_value


@dataclass
class ForceProfile:
    """Sampled acceleration/force series over a fit window."""

    times_ds: np.ndarray
    a_tense: np.ndarray
    f_tense: np.ndarray
    mass_m: float
    coeff_k: float
    degenerate: bool = False  # model degree < 2: identically zero profile

    def __post_init__(self):
        self.times_ds = np.asarray(self.times_ds, dtype=float)
        self.a_tense = np.asarray(self.a_tense, dtype=float)
        self.f_tense = np.asarray(self.f_tense, dtype=float)
        if not (len(self.times_ds) == len(self.a_tense) == len(self.f_tense)):
            raise DomainError("profile arrays must have equal length")


def force_profile(model, constants, n_samples):
    """Evaluate a_tense and f_tense on a uniform grid over the fit window."""
    if n_samples < 2:
        raise DomainError(f"need at least 2 samples, got {n_samples}")
    grid = np.linspace(0.0, model.window_ds, n_samples)
    c = model.coefficients
    if model.degree < 2:
        accel = np.zeros_like(grid)
        return ForceProfile(grid, accel, accel.copy(),
                            constants.mass_m, constants.coeff_k, degenerate=True)
    powers = np.arange(2, len(c))
    accel = (powers * (powers - 1) * c[2:] * grid[:, None] ** (powers - 2)).sum(axis=1)
    force = constants.mass_m * constants.coeff_k * accel
    return ForceProfile(grid, accel, force, constants.mass_m, constants.coeff_k)


@dataclass
class CavityGeometry:
    """Back-cavity + constriction geometry for the Helmholtz estimate.

    Give areas (cm^2), diameters (cm), or both; when both are present they
    must agree through A = pi (d/2)^2.
    """

    len_back_lb: float
    len_constriction_lc: float
    area_constriction_ac: float | None = None
    area_back_ab: float | None = None
    diam_constriction_d: float | None = None
    diam_back_dd: float | None = None
    speed_of_sound_c: float = 35000.0  # cm/s, moist air at body temperature

    def __post_init__(self):
        given = [
            v for v in (
                self.len_back_lb, self.len_constriction_lc, self.speed_of_sound_c,
                self.area_constriction_ac, self.area_back_ab,
                self.diam_constriction_d, self.diam_back_dd,
            )
            if v is not None
        ]
        if any(not (math.isfinite(v) and v > 0) for v in given):
            raise DomainError("all geometry values must be positive and finite")
        if self.area_constriction_ac is None and self.diam_constriction_d is None:
            raise DomainError("constriction needs an area or a diameter")
        if self.area_back_ab is None and self.diam_back_dd is None:
            raise DomainError("back cavity needs an area or a diameter")
        for area, diam, what in (
            (self.area_constriction_ac, self.diam_constriction_d, "constriction"),
            (self.area_back_ab, self.diam_back_dd, "back cavity"),
        ):
            if area is not None and diam is not None:
                implied = math.pi * (diam / 2.0) ** 2
                if abs(implied - area) > 1e-9 * max(area, implied):
                    raise DomainError(
                        f"{what}: area {area} cm^2 inconsistent with "
                        f"diameter {diam} cm (implies {implied})"
                    )

    @property
    def resolved_areas(self):
        ac = (self.area_constriction_ac
              if self.area_constriction_ac is not None
              else math.pi * (self.diam_constriction_d / 2.0) ** 2)
        ab = (self.area_back_ab
              if self.area_back_ab is not None
              else math.pi * (self.diam_back_dd / 2.0) ** 2)
        return ac, ab


def helmholtz_frequency(geometry):
    """Helmholtz resonance (c/2pi) sqrt(Ac / (Ab lb lc)) in Hz.

    With diameters this equals d*c / (2 pi D sqrt(lb lc)): the two forms
    agree whenever A = pi (d/2)^2.
    """
    ac, ab = geometry.resolved_areas
    return (geometry.speed_of_sound_c / (2.0 * math.pi)) * math.sqrt(
        ac / (ab * geometry.len_back_lb * geometry.len_constriction_lc)
    )


@dataclass
class SimState:
    """State of the articulator mass point. x is palate-to-tongue distance
    along the downward x-axis; y is the anterior-posterior position."""

    x_cm: float = 0.0
    vx: float = 0.0
    y_cm: float = 0.0
    vy: float = 0.0
    t_ds: float = 0.0

    def __post_init__(self):
        for name in ("x_cm", "vx", "y_cm", "vy", "t_ds"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.x_cm < 0:
            raise DomainError(f"x_cm must be >= 0, got {self.x_cm}")


@dataclass
class OscillatorParams:
    spring_p: float
    equilibrium_y0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.spring_p) and self.spring_p > 0):
            raise DomainError(f"spring constant must be positive, got {self.spring_p}")


def _rk4(accel_fn, q0, v0, t0, t_end, step):
    """Classical RK4 on q'' = accel_fn(t, q, v); returns (t, q, v) arrays.

    The span is divided into round(span/step) equal steps so the
    trajectory lands exactly on t_end; times come from the index, not an
    accumulator, so the grid carries no rounding drift.
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    span = t_end - t0
    if span <= 0:
        raise DomainError(f"t_end {t_end} must exceed start time {t0}")
    n = max(1, round(span / step))
    h = span / n
    t = t0 + np.arange(n + 1) * (span / n)
    q = np.empty(n + 1)
    v = np.empty(n + 1)
    q[0], v[0] = q0, v0
    for i in range(n):
        ti, qi, vi = t[i], q[i], v[i]
        k1q = vi
        k1v = accel_fn(ti, qi, vi)
        k2q = vi + 0.5 * h * k1v
        k2v = accel_fn(ti + 0.5 * h, qi + 0.5 * h * k1q, vi + 0.5 * h * k1v)
        k3q = vi + 0.5 * h * k2v
        k3v = accel_fn(ti + 0.5 * h, qi + 0.5 * h * k2q, vi + 0.5 * h * k2v)
        k4q = vi + h * k3v
        k4v = accel_fn(ti + h, qi + h * k3q, vi + h * k3v)
        q[i + 1] = qi + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
        v[i + 1] = vi + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(q[i + 1]) and math.isfinite(v[i + 1])):
            raise SimulationError(f"state became non-finite at t={t[i + 1]} ds")
    return t, q, v


def simulate_x(force_fn, constants, init, t_end_ds, step_ds):
    """Integrate m k x'' = F(t): constant-mass point driven by a force of
    tenseness, no gravity or other external loads.

    force_fn maps time (ds) to force; returns (t_ds, x, vx) arrays.
    """
    mk = constants.mass_m * constants.coeff_k

    def accel(t, _q, _v):
        return force_fn(t) / mk

    return _rk4(accel, init.x_cm, init.vx, init.t_ds, t_end_ds, step_ds)


def simulate_y_oscillator(params, mass, init, t_end_ds, step_ds):
    """Integrate the harmonic oscillator m y'' = -p (y - y0).

    Returns (t_ds, y, vy) arrays. With step <= period/100 the energy
    E = 1/2 m vy^2 + 1/2 p (y-y0)^2 drifts by < 1e-6 relative over ten
    periods.
    """
    if mass <= 0:
        raise DomainError(f"mass must be positive, got {mass}")
    p, y0 = params.spring_p, params.equilibrium_y0

    def accel(t, q, _v):
        return -p * (q - y0) / mass

    return _rk4(accel, init.y_cm, init.vy, init.t_ds, t_end_ds, step_ds)


def synth_track(accel_fn, z_start_bark, zslope_start, duration_ms, frame_step_ms,
                noise_sigma_bark=0.0, seed=0, f0_start_hz=None, f0_end_hz=None,
                source_id="synth"):
    """Forward-generate an F1 track with a prescribed Bark acceleration.

    Z(t) is built by double integration of accel_fn (RK4, exact for
    constant and linear accelerations), then mapped to Hz. Frames are laid
    every frame_step_ms from 0 through duration_ms. Optional Gaussian
    frame noise (sigma in Bark, seeded) lands on Z before conversion;
    optional F0 is a linear ramp between the given endpoints.
    """
    if duration_ms <= 0 or frame_step_ms <= 0:
        raise DomainError("duration and frame step must be positive")
    n_frames = int(math.floor(duration_ms / frame_step_ms + 1e-9)) + 1
    if n_frames < 2:
        raise DomainError("duration too short for 2 frames")
    span_ds = (n_frames - 1) * frame_step_ms / 100.0

    def accel(t, _q, _v):
        return accel_fn(t)

    # one RK4 step per frame is exact for polynomial accelerations of
    # degree <= 1; subdivide for anything wilder
    sub = 4
    t, z, _zdot = _rk4(accel, z_start_bark, zslope_start, 0.0, span_ds,
                       frame_step_ms / 100.0 / sub)
    t, z = t[::sub], z[::sub]

    out_of_range = (z <= BARK_MIN) | (z >= BARK_MAX)
    if np.any(out_of_range):
        t_bad = t[int(np.argmax(out_of_range))]
        raise SimulationError(
            f"Z leaves the Bark range ({BARK_MIN}, {BARK_MAX}) at t={t_bad} ds"
        )
    if noise_sigma_bark:
        rng = np.random.default_rng(seed)
        z = z + rng.normal(0.0, noise_sigma_bark, size=len(z))
        if np.any((z <= BARK_MIN) | (z >= BARK_MAX)):
            raise SimulationError("frame noise pushed Z outside the Bark range")

    time_ms = t * 100.0
    f1 = bark_to_hz(z)
    nan = np.full(len(t), np.nan)
    if f0_start_hz is not None and f0_end_hz is not None:
        f0 = np.linspace(f0_start_hz, f0_end_hz, len(t))
    else:
        f0 = nan.copy()
    return FormantTrack(time_ms, f1, nan.copy(), nan.copy(), f0, source_id)
