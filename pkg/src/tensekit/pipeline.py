"""Batch orchestration over corpus manifests.

run_analyze maps manifest entries to indicator records (WAV entries go
through formant extraction first, track CSVs are ingested directly);
run_stats builds the summary/test report; run_force and run_simulate
cover the force profile and the forward simulator. All file outputs are
deterministic: rows stay in manifest order regardless of worker count,
numbers are serialized with 17 significant digits, and every file embeds
the hash of the configuration that produced it.

A failing corpus entry becomes an error row and the run continues; one
bad file never changes any other row.
"""

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .classify import PairPolicy, classify_pair
from .dynamics import (ForceConstants, OscillatorParams, SimState,
                       force_profile, simulate_y_oscillator, synth_track)
from .errors import ConfigError, DataError, ParseError, TensekitError
from .formants import ExtractionConfig, extract_track
from .ingest import (CorpusManifest, format_track_csv, parse_manifest,
                     parse_track_csv, read_wav)
from .stats import anova2, pearson, summarize, welch_t
from .tenseness import SegmentLabels, fit_poly, indicators, landmarks

RECORD_COLUMNS = (
    "path", "vowel_label", "class_label", "language", "source",
    "d_ds", "theta1_rad", "theta_f1_rad", "f1_33_hz", "z1_33_bark",
    "f0_33_hz", "f0_66_hz", "delta_f0_hz", "status", "error", "config_hash",
)

_NUMERIC_COLUMNS = (
    "d_ds", "theta1_rad", "theta_f1_rad", "f1_33_hz", "z1_33_bark",
    "f0_33_hz", "f0_66_hz", "delta_f0_hz",
)


def _fmt(value):
    """17-significant-digit text for a double; None becomes an empty cell."""
    if value is None:
        return ""
    return format(float(value), ".17g")


@dataclass
class RunConfig:
    """All tunables of a batch run. The hash of this bundle is embedded in
    every output file so rows from different configurations are detectable."""

    fit_degree: int = 3
    f_neu_hz: float = 500.0
    mass_m: float = 1.0
    coeff_k: float = 1.0
    epsilon_rad: float = 0.0
    alpha: float = 0.05
    min_gap_rad: float = 0.1
    seed: int = 0
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)

    def pair_policy(self):
        return PairPolicy(self.alpha, self.min_gap_rad, self.epsilon_rad)

    def config_hash(self):
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class RecordRow:
    """One records.csv row: a TensenessRecord plus provenance, or an error."""

    path: str
    vowel_label: str = ""
    class_label: str = ""
    language: str = ""
    source: str = ""
    d_ds: float | None = None
    theta1_rad: float | None = None
    theta_f1_rad: float | None = None
    f1_33_hz: float | None = None
    z1_33_bark: float | None = None
    f0_33_hz: float | None = None
    f0_66_hz: float | None = None
    delta_f0_hz: float | None = None
    status: str = "ok"
    error: str = ""
    config_hash: str = ""


@dataclass
class RecordsTable:
    rows: list
    config_hash: str

    @property
    def n_errors(self):
        return sum(1 for r in self.rows if r.status != "ok")


def load_track_file(path, extraction=None):
    """Read one corpus file: .wav via formant extraction, else track CSV."""
    path = Path(path)
    if path.suffix.lower() == ".wav":
        audio = read_wav(path.read_bytes())
        return extract_track(audio, extraction or ExtractionConfig(),
                             source_id=path.name)
    return parse_track_csv(path.read_text(encoding="utf-8"), source_id=path.name)


def _analyze_entry(entry, base_dir, config, cfg_hash):
    row = RecordRow(
        path=entry.path, vowel_label=entry.vowel_label,
        class_label=entry.class_label, language=entry.language,
        source=entry.source, config_hash=cfg_hash,
    )
    try:
        track = load_track_file(Path(base_dir) / entry.path, config.extraction)
        segment = landmarks(
            entry.onset_ms, entry.offset_ms,
            SegmentLabels(entry.vowel_label, entry.class_label,
                          entry.language, entry.source),
        )
        record = indicators(track, segment)
    except (TensekitError, OSError) as exc:
        row.status = "error"
        row.error = " ".join(str(exc).split())
        return row
    row.d_ds = record.d_ds
    row.theta1_rad = record.theta1_rad
    row.theta_f1_rad = record.theta_f1_rad
    row.f1_33_hz = record.f1_33_hz
    row.z1_33_bark = record.z1_33_bark
    row.f0_33_hz = record.f0_33_hz
    row.f0_66_hz = record.f0_66_hz
    row.delta_f0_hz = record.delta_f0_hz
    return row


def run_analyze(manifest, config=None, base_dir=".", workers=1):
    """Process every manifest entry; failures become error rows, never aborts.

    Rows come back in manifest order whatever the worker count.
    """
    if isinstance(manifest, str):
        manifest = parse_manifest(manifest)
    if not isinstance(manifest, CorpusManifest):
        raise ConfigError(f"expected a CorpusManifest, got {type(manifest)!r}")
    config = config or RunConfig()
    cfg_hash = config.config_hash()
    if workers <= 1:
        rows = [_analyze_entry(e, base_dir, config, cfg_hash)
                for e in manifest.entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda e: _analyze_entry(e, base_dir, config, cfg_hash),
                manifest.entries,
            ))
    return RecordsTable(rows, cfg_hash)


def format_records_csv(table):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for row in table.rows:
        writer.writerow([
            row.path, row.vowel_label, row.class_label, row.language,
            row.source,
            *(_fmt(getattr(row, c)) for c in _NUMERIC_COLUMNS),
            row.status, row.error, row.config_hash,
        ])
    return buf.getvalue()


def load_records_csv(text):
    """Read a records.csv back into RecordRow objects."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise ParseError("empty records file") from None
    if header != RECORD_COLUMNS:
        raise ParseError(f"unexpected records header {header!r}")
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(RECORD_COLUMNS):
            raise ParseError(
                f"expected {len(RECORD_COLUMNS)} columns, got {len(cells)}",
                line=lineno,
            )
        data = dict(zip(RECORD_COLUMNS, cells))
        for col in _NUMERIC_COLUMNS:
            data[col] = float(data[col]) if data[col] != "" else None
        rows.append(RecordRow(**data))
    config_hash = rows[0].config_hash if rows else ""
    return RecordsTable(rows, config_hash)


# --- statistics report -------------------------------------------------------

_GROUP_FIELDS = {
    "class": "class_label",
    "source": "source",
    "vowel": "vowel_label",
    "language": "language",
}

_SUMMARY_HEADER = ("Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max.")


@dataclass
class StatsReport:
    text: str
    data: dict


def _ordered_groups(rows, fields):
    """Group rows by the given attributes, first-seen order."""
    groups = {}
    for row in rows:
        key = tuple(getattr(row, f) for f in fields)
        groups.setdefault(key, []).append(row)
    return groups


def _summary_dict(summary, n):
    return {
        "n": n,
        "min": summary.minimum, "q1": summary.q1, "median": summary.median,
        "mean": summary.mean, "q3": summary.q3, "max": summary.maximum,
    }


def _test_dict(result):
    d = {"statistic": result.statistic, "df": result.df,
         "p_value": result.p_value, "kind": result.kind}
    if result.df2 is not None:
        d["df2"] = result.df2
    return d


def run_stats(table, group_by=("class",), alpha=0.05, min_gap_rad=0.1,
              epsilon_rad=0.0):
    """Build the statistics report over ok-rows with a formant angle.

    Sections: per-group summaries of the angle in the six-number layout,
    Welch's t between the two class labels, the relative pair
    classification (bifurcation verdict), a (class x source) two-way
    ANOVA when at least two sources are present, and the Pearson
    correlation of angle against delta-F0 when pitch data exists.
    Inapplicable sections are marked, never dropped.
    """
    fields = []
    for name in group_by:
        if name not in _GROUP_FIELDS:
            raise ConfigError(
                f"unknown group-by key {name!r}; choose from "
                f"{sorted(_GROUP_FIELDS)}"
            )
        fields.append(_GROUP_FIELDS[name])
    rows = [r for r in table.rows if r.status == "ok" and r.theta1_rad is not None]
    if not rows:
        raise DataError("no usable rows: every record is an error row")

    hashes = sorted({r.config_hash for r in rows})
    mixed = len(hashes) > 1
    data = {"config_hash": table.config_hash, "alpha": alpha,
            "group_by": list(group_by), "n_rows": len(rows),
            "mixed_configs": mixed}
    lines = [
        "tenseness statistics report",
        f"config_hash: {table.config_hash}   rows: {len(rows)}   alpha: {alpha:g}",
    ]
    if mixed:
        lines.append(
            f"WARNING: rows stem from {len(hashes)} distinct configurations"
        )
    lines += [
        "",
        f"theta_1 summaries by ({', '.join(group_by)}):",
        "  {:<24}{:>4}".format("group", "n")
        + "".join(f"{h:>10}" for h in _SUMMARY_HEADER),
    ]

    groups = _ordered_groups(rows, fields)
    data["groups"] = []
    for key, members in groups.items():
        thetas = [r.theta1_rad for r in members]
        summary = summarize(thetas)
        label = "/".join(key)
        data["groups"].append(
            {"group": dict(zip(group_by, key)),
             **_summary_dict(summary, len(members))}
        )
        lines.append(
            "  {:<24}{:>4}".format(label, len(members))
            + "".join(f"{v:>10.4f}" for v in summary.as_tuple())
        )
    lines.append("")

    # Welch and pair classification between the two class labels,
    # first-seen order
    classes = list(_ordered_groups(rows, ["class_label"]))
    if len(classes) == 2:
        (ca,), (cb,) = classes
        ta = [r.theta1_rad for r in rows if r.class_label == ca]
        tb = [r.theta1_rad for r in rows if r.class_label == cb]
        try:
            result = welch_t(ta, tb)
            data["welch"] = {"classes": [ca, cb], **_test_dict(result)}
            lines.append(
                f"Welch t-test ({ca} vs {cb}): t({result.df:.1f}) = "
                f"{result.statistic:.4f}, p = {result.p_value:.6g}"
            )
        except DataError as exc:
            data["welch"] = {"not_applicable": str(exc)}
            lines.append(f"Welch t-test: not applicable ({exc})")
        try:
            verdict = classify_pair(
                ta, tb, PairPolicy(alpha, min_gap_rad, epsilon_rad)
            )
            ev = verdict.evidence
            data["pair_classification"] = {
                "classes": [ca, cb],
                "label_a": verdict.label_a.value,
                "label_b": verdict.label_b.value,
                "bifurcated": verdict.bifurcated,
                "median_a": ev.median_a, "median_b": ev.median_b,
                "median_gap": ev.median_gap, "welch_p": ev.welch_p,
                "min_gap_rad": min_gap_rad, "epsilon_rad": epsilon_rad,
            }
            lines.append(
                f"Pair classification: {ca}={verdict.label_a.value}, "
                f"{cb}={verdict.label_b.value}, bifurcated="
                f"{'yes' if verdict.bifurcated else 'no'} "
                f"(median gap {ev.median_gap:.4f} rad, min_gap "
                f"{min_gap_rad:g}, epsilon {epsilon_rad:g})"
            )
        except DataError as exc:
            data["pair_classification"] = {"not_applicable": str(exc)}
            lines.append(f"Pair classification: not applicable ({exc})")
    else:
        reason = f"need exactly 2 class labels, found {len(classes)}"
        data["welch"] = {"not_applicable": reason}
        data["pair_classification"] = {"not_applicable": reason}
        lines.append(f"Welch t-test: not applicable ({reason})")
        lines.append(f"Pair classification: not applicable ({reason})")

    # two-way ANOVA over class x source
    sources = {r.source for r in rows}
    if len(sources) >= 2 and len(classes) >= 2:
        triples = [(r.class_label, r.source, r.theta1_rad) for r in rows]
        try:
            try:
                result = anova2(triples, interaction=True)
                mode = "interaction"
            except ConfigError:
                result = anova2(triples, interaction=False)
                mode = "main-effects-only (empty cells)"
            data["anova"] = {
                "mode": mode,
                "class": _test_dict(result.factor_a),
                "source": _test_dict(result.factor_b),
                "interaction": (_test_dict(result.interaction)
                                if result.interaction else None),
                "residual_df": result.residual_df,
            }
            lines.append(f"Two-way ANOVA on theta_1 (class x source), {mode}:")
            for name, res in (("class", result.factor_a),
                              ("source", result.factor_b),
                              ("interaction", result.interaction)):
                if res is None:
                    continue
                lines.append(
                    f"  {name:<12} F({res.df:g}, {res.df2:g}) = "
                    f"{res.statistic:.4f}, p = {res.p_value:.6g}"
                )
        except DataError as exc:
            data["anova"] = {"not_applicable": str(exc)}
            lines.append(f"Two-way ANOVA: not applicable ({exc})")
    else:
        reason = (f"need >= 2 sources and >= 2 classes, found "
                  f"{len(sources)} source(s), {len(classes)} class(es)")
        data["anova"] = {"not_applicable": reason}
        lines.append(f"Two-way ANOVA: not applicable ({reason})")

    # Pearson theta_1 vs delta F0
    paired = [(r.theta1_rad, r.delta_f0_hz) for r in rows
              if r.delta_f0_hz is not None]
    if len(paired) >= 3:
        try:
            r_val, result = pearson([p[0] for p in paired], [p[1] for p in paired])
            data["pearson"] = {"r": r_val, "n": len(paired), **_test_dict(result)}
            lines.append(
                f"Pearson theta_1 vs delta_F0 (n={len(paired)}): r = {r_val:.4f}, "
                f"t({result.df:g}) = {result.statistic:.4f}, "
                f"p = {result.p_value:.6g}"
            )
        except DataError as exc:
            data["pearson"] = {"not_applicable": str(exc)}
            lines.append(f"Pearson theta_1 vs delta_F0: not applicable ({exc})")
    else:
        reason = f"only {len(paired)} row(s) carry delta_F0; need >= 3"
        data["pearson"] = {"not_applicable": reason}
        lines.append(f"Pearson theta_1 vs delta_F0: not applicable ({reason})")

    return StatsReport("\n".join(lines) + "\n", data)


def stats_json(report):
    return json.dumps(report.data, indent=2) + "\n"


# --- force profiles ----------------------------------------------------------

def run_force(track, config=None, n_samples=101, window_ms=None):
    """Fit the track and tabulate a_tense / f_tense over the window.

    Defaults: the whole track span, config.fit_degree, 101 grid points.
    Returns (ForceProfile, csv_text); the CSV carries the constants and
    degree as commented echo rows.
    """
    config = config or RunConfig()
    if window_ms is None:
        window_ms = track.span_ms
    model = fit_poly(track, window_ms, config.fit_degree)
    constants = ForceConstants(config.mass_m, config.coeff_k)
    profile = force_profile(model, constants, n_samples)

    lines = [
        f"# mass_m = {_fmt(constants.mass_m)}",
        f"# coeff_k = {_fmt(constants.coeff_k)}",
        f"# fit_degree = {config.fit_degree}",
        f"# window_ms = {_fmt(window_ms[0])},{_fmt(window_ms[1])}",
        f"# config_hash = {config.config_hash()}",
        "t_ds,a_tense,f_tense,warning",
    ]
    flag = "degenerate_degree" if profile.degenerate else ""
    for t, a, f in zip(profile.times_ds, profile.a_tense, profile.f_tense):
        lines.append(f"{_fmt(t)},{_fmt(a)},{_fmt(f)},{flag}")
    return profile, "\n".join(lines) + "\n"


def load_force_csv(text):
    """Read a force CSV back: returns (meta dict, times_ds, a_tense, f_tense)."""
    meta = {}
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#"):
            if "=" in raw:
                key, _, value = raw[1:].partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not raw.strip():
            continue
        if not header_seen:
            if raw.strip() != "t_ds,a_tense,f_tense,warning":
                raise ParseError(f"unexpected force header {raw!r}", line=lineno)
            header_seen = True
            continue
        cells = raw.split(",")
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", line=lineno)
        rows.append((float(cells[0]), float(cells[1]), float(cells[2])))
    if not header_seen or not rows:
        raise ParseError("force file has no data rows")
    arr = np.array(rows)
    return meta, arr[:, 0], arr[:, 1], arr[:, 2]


# --- simulator scenarios -----------------------------------------------------

_SCENARIO_KEYS = {
    "accel", "z_start", "zslope_start", "duration_ms", "frame_step_ms",
    "m", "k", "oscillator", "seed", "noise_sigma_bark",
}


def parse_accel_spec(spec):
    """Parse 'const:a' or 'linear:a,b' into a time->acceleration function."""
    if not isinstance(spec, str) or ":" not in spec:
        raise ConfigError(f"accel must look like 'const:0.8' or 'linear:a,b', got {spec!r}")
    kind, _, args = spec.partition(":")
    try:
        values = [float(v) for v in args.split(",")]
    except ValueError:
        raise ConfigError(f"bad accel parameters in {spec!r}") from None
    if kind == "const" and len(values) == 1:
        alpha = values[0]
        return lambda t: alpha
    if kind == "linear" and len(values) == 2:
        alpha, beta = values
        return lambda t: alpha + beta * t
    raise ConfigError(f"unsupported accel spec {spec!r}")


def run_simulate(scenario, config=None):
    """Generate a synthetic track CSV from a scenario mapping.

    Keys: accel ('const:a' | 'linear:a,b'), z_start, zslope_start,
    duration_ms, frame_step_ms, m, k, oscillator {p, y0[, y_init, vy_init]},
    seed, noise_sigma_bark. The CSV is consumable by run_analyze; an
    oscillator scenario appends y_osc,vy_osc columns.
    """
    config = config or RunConfig()
    unknown = set(scenario) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario key(s): {sorted(unknown)}")
    for key in ("accel", "z_start", "duration_ms", "frame_step_ms"):
        if key not in scenario:
            raise ConfigError(f"scenario is missing required key {key!r}")

    accel_fn = parse_accel_spec(scenario["accel"])
    track = synth_track(
        accel_fn,
        z_start_bark=float(scenario["z_start"]),
        zslope_start=float(scenario.get("zslope_start", 0.0)),
        duration_ms=float(scenario["duration_ms"]),
        frame_step_ms=float(scenario["frame_step_ms"]),
        noise_sigma_bark=float(scenario.get("noise_sigma_bark", 0.0)),
        seed=int(scenario.get("seed", config.seed)),
        source_id="scenario",
    )
    csv_text = format_track_csv(track)

    osc = scenario.get("oscillator")
    if osc:
        params = OscillatorParams(float(osc["p"]), float(osc.get("y0", 0.0)))
        mass = float(scenario.get("m", config.mass_m))
        init = SimState(
            y_cm=float(osc.get("y_init", params.equilibrium_y0 + 1.0)),
            vy=float(osc.get("vy_init", 0.0)),
        )
        span_ds = float(track.time_ms[-1]) / 100.0
        n_frames = len(track.time_ms)
        frame_ds = span_ds / (n_frames - 1)
        sub = max(1, math.ceil(1000 / (n_frames - 1)))
        _, y, vy = simulate_y_oscillator(params, mass, init, span_ds,
                                         frame_ds / sub)
        y, vy = y[::sub], vy[::sub]
        out_lines = []
        for i, line in enumerate(csv_text.splitlines()):
            if i == 0:
                out_lines.append(line + ",y_osc,vy_osc")
            else:
                out_lines.append(f"{line},{_fmt(y[i - 1])},{_fmt(vy[i - 1])}")
        csv_text = "\n".join(out_lines) + "\n"
    return csv_text, track
