"""Feature-map figures rendered to SVG files.

Four kinds mirror the analysis outputs: a one-dimensional strip of the
formant angle by class (with median ticks and a zero line), two scatter
maps (angle vs F1_33, angle vs delta-F0), and acceleration curves per
group. Rendering is deterministic: fixed 800x600 canvas, a fixed SVG hash
salt, no date metadata, groups drawn in sorted order — identical data
yields byte-identical files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402

from .errors import DataError  # noqa: E402

# SVG user units are points (72/inch); this figsize yields an 800 x 600 canvas
FIGSIZE = (800.0 / 72.0, 600.0 / 72.0)
DPI = 100
_HASHSALT = "tensekit"
_MARGIN = 0.05  # fraction of the data range padded on every axis

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _new_axes():
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.margins(_MARGIN)
    return fig, ax


def _save(fig, path, config_hash=""):
    metadata = {"Date": None}
    if config_hash:
        metadata["Title"] = f"tensekit config_hash={config_hash}"
    with plt.rc_context({"svg.hashsalt": _HASHSALT}):
        fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)


def _by_class(records):
    groups = {}
    for r in records:
        groups.setdefault(r.class_label, []).append(r)
    return dict(sorted(groups.items()))


def render_strip1d(records, path, config_hash=""):
    """Angle-by-class strip plot with per-class median ticks."""
    records = [r for r in records if r.theta1_rad is not None]
    if not records:
        raise DataError("strip1d: no records with a formant angle")
    groups = _by_class(records)
    fig, ax = _new_axes()
    for i, (label, rows) in enumerate(groups.items()):
        thetas = sorted(r.theta1_rad for r in rows)
        n = len(thetas)
        # deterministic within-class spread by rank, no random jitter
        offsets = [0.0] if n == 1 else [-0.3 + 0.6 * j / (n - 1) for j in range(n)]
        ax.plot([i + o for o in offsets], thetas, "o",
                color=_COLORS[i % len(_COLORS)], markersize=5, alpha=0.8)
        median = thetas[n // 2] if n % 2 else 0.5 * (thetas[n // 2 - 1] + thetas[n // 2])
        ax.hlines(median, i - 0.35, i + 0.35,
                  color=_COLORS[i % len(_COLORS)], linewidth=2)
    ax.axhline(0.0, color="0.4", linewidth=0.8, linestyle="--")
    ax.set_xticks(range(len(groups)), labels=list(groups))
    ax.set_xlabel("class")
    ax.set_ylabel(r"formant angle $\theta_1$ (rad)")
    ax.set_title("one-dimensional map of the formant angle")
    _save(fig, path, config_hash)


def _scatter(records, path, y_of, y_label, title, kind, config_hash=""):
    pairs = [(r.theta1_rad, y_of(r), r.class_label) for r in records
             if r.theta1_rad is not None and y_of(r) is not None]
    if not pairs:
        raise DataError(f"{kind}: no records carry both coordinates")
    classes = sorted({c for _, _, c in pairs})
    fig, ax = _new_axes()
    handles = []
    for i, cls in enumerate(classes):
        xs = [x for x, _, c in pairs if c == cls]
        ys = [y for _, y, c in pairs if c == cls]
        color = _COLORS[i % len(_COLORS)]
        ax.scatter(xs, ys, s=28, color=color)
        # proxy handles keep data markers the only PathCollections
        handles.append(Line2D([], [], linestyle="", marker="o", color=color,
                              label=cls))
    ax.axvline(0.0, color="0.4", linewidth=0.8, linestyle="--")
    ax.set_xlabel(r"formant angle $\theta_1$ (rad)")
    ax.set_ylabel(y_label)
    ax.set_title(title)
    ax.legend(handles=handles, loc="best")
    _save(fig, path, config_hash)


def render_scatter2d_f1(records, path, config_hash=""):
    """Angle vs first-formant frequency at the 33% landmark."""
    _scatter(records, path, lambda r: r.f1_33_hz, r"$F1_{33}$ (Hz)",
             "two-dimensional map: formant angle vs F1 at 33%", "scatter2d_f1",
             config_hash)


def render_scatter2d_df0(records, path, config_hash=""):
    """Angle vs pitch change F0_66 - F0_33 (records without F0 are skipped)."""
    _scatter(records, path, lambda r: r.delta_f0_hz,
             r"$F0_{66} - F0_{33}$ (Hz)",
             "two-dimensional map: formant angle vs pitch change",
             "scatter2d_df0", config_hash)


def render_curves(profiles, path, config_hash=""):
    """Tenseness-acceleration curves, one line per (label, profile)."""
    profiles = list(profiles)
    if not profiles:
        raise DataError("curves: no force profiles given")
    fig, ax = _new_axes()
    for i, (label, profile) in enumerate(sorted(profiles, key=lambda p: p[0])):
        ax.plot(profile.times_ds, profile.a_tense,
                color=_COLORS[i % len(_COLORS)], label=label)
    ax.axhline(0.0, color="0.4", linewidth=0.8, linestyle="--")
    ax.set_xlabel("time from window start (ds)")
    ax.set_ylabel(r"$a_{tense}(t)$ (Bark/ds$^2$)")
    ax.set_title("acceleration of tenseness")
    ax.legend(loc="best")
    _save(fig, path, config_hash)


RENDERERS = {
    "strip1d": render_strip1d,
    "scatter2d_f1": render_scatter2d_f1,
    "scatter2d_df0": render_scatter2d_df0,
    "curves": render_curves,
}
