"""Command-line interface.

Subcommands: bark, extract, analyze, fit, force, simulate, stats, report.
Exit codes: 0 success, 1 usage or configuration error, 2 total input
failure, 3 partial failure (some corpus entries became error rows).
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, DataError, ParseError, TensekitError
from .formants import ExtractionConfig, extract_track
from .ingest import format_track_csv, parse_manifest, read_wav
from .pipeline import (RunConfig, format_records_csv, load_force_csv,
                       load_records_csv, load_track_file, run_analyze,
                       run_force, run_simulate, run_stats, stats_json)
from .scales import hz_to_bark
from .tenseness import fit_poly


class _Parser(argparse.ArgumentParser):
    """argparse exits usage errors with status 2; the toolkit reserves 2
    for total input failure, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _window_pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start,end in ms, got {text!r}"
        ) from None
    return a, b


def build_parser():
    parser = _Parser(prog="tensekit",
                     description="vowel tenseness quantification toolkit")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("bark", help="convert frequencies (Hz) to Bark")
    p.add_argument("hz", nargs="+", type=float)

    p = sub.add_parser("extract", help="formant/F0 track from a WAV file")
    p.add_argument("wav")
    p.add_argument("--out", help="track CSV path (default: stdout)")
    _extraction_flags(p)

    p = sub.add_parser("analyze", help="run the pipeline over a manifest")
    p.add_argument("manifest")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--degree", type=int, default=3, help="trajectory fit degree")
    p.add_argument("--fneu", type=float, default=500.0,
                   help="neutral-tract F1 in Hz")
    p.add_argument("--workers", type=int, default=1)
    _extraction_flags(p)

    p = sub.add_parser("fit", help="polynomial Bark-trajectory fit of a track")
    p.add_argument("track")
    p.add_argument("--window", type=_window_pair, required=True,
                   metavar="START,END", help="fit window in ms")
    p.add_argument("--degree", type=int, default=3)

    p = sub.add_parser("force", help="tenseness acceleration/force profile")
    p.add_argument("track")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--window", type=_window_pair, metavar="START,END",
                   help="fit window in ms (default: whole track)")
    p.add_argument("--out", help="force CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="forward-simulate a track scenario")
    p.add_argument("scenario", help="JSON scenario file")
    p.add_argument("--out", help="track CSV path (default: stdout)")

    p = sub.add_parser("stats", help="summaries and tests over records.csv")
    p.add_argument("records")
    p.add_argument("--group-by", default="class",
                   help="comma list of class,source,vowel,language")
    p.add_argument("--alpha", type=float, default=0.05,
                   help="significance level for tests and bifurcation")
    p.add_argument("--min-gap", type=float, default=0.1,
                   help="median gap (rad) required to call a pair bifurcated")
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="stable band (rad) around zero for the sign rule")
    p.add_argument("--out-dir", help="also write stats.txt and stats.json here")

    p = sub.add_parser("report", help="render an SVG feature map")
    p.add_argument("inputs", nargs="+",
                   help="records.csv (or force CSVs for --kind curves)")
    p.add_argument("--kind", required=True,
                   choices=("strip1d", "scatter2d_f1", "scatter2d_df0", "curves"))
    p.add_argument("--out", help="SVG path (default: <kind>.svg)")
    return parser


def _extraction_flags(p):
    p.add_argument("--frame-ms", type=float, default=25.0)
    p.add_argument("--hop-ms", type=float, default=10.0)
    p.add_argument("--preemphasis", type=float, default=0.97)
    p.add_argument("--lpc-order", type=int, default=None)
    p.add_argument("--max-formant", type=float, default=5500.0)
    p.add_argument("--f0-min", type=float, default=60.0)
    p.add_argument("--f0-max", type=float, default=400.0)


def _extraction_config(args):
    return ExtractionConfig(
        frame_ms=args.frame_ms, hop_ms=args.hop_ms,
        preemphasis=args.preemphasis, lpc_order=args.lpc_order,
        max_formant_hz=args.max_formant,
        f0_min_hz=args.f0_min, f0_max_hz=args.f0_max,
    )


def _write_or_print(text, out_path):
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_bark(args):
    for hz in args.hz:
        print(f"{hz:g}\t{format(hz_to_bark(hz), '.17g')}")
    return 0


def _cmd_extract(args):
    config = _extraction_config(args)
    audio = read_wav(Path(args.wav).read_bytes())
    track = extract_track(audio, config, source_id=Path(args.wav).name)
    echo = (
        f"# extraction: frame_ms={config.frame_ms:g} hop_ms={config.hop_ms:g} "
        f"preemphasis={config.preemphasis:g} "
        f"lpc_order={config.order_for(audio.sample_rate_hz)} "
        f"max_formant_hz={config.max_formant_hz:g} "
        f"f0_band_hz={config.f0_min_hz:g}-{config.f0_max_hz:g}\n"
    )
    _write_or_print(echo + format_track_csv(track), args.out)
    return 0


def _cmd_analyze(args):
    config = RunConfig(fit_degree=args.degree, f_neu_hz=args.fneu,
                       extraction=_extraction_config(args))
    manifest_path = Path(args.manifest)
    try:
        manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    except (OSError, ParseError) as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return 2
    table = run_analyze(manifest, config, base_dir=manifest_path.parent,
                        workers=args.workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "records.csv"
    out_path.write_text(format_records_csv(table), encoding="utf-8")
    n = len(table.rows)
    print(f"{n} rows ({table.n_errors} errors) -> {out_path}")
    for row in table.rows:
        if row.status != "ok":
            print(f"  error row {row.path}: {row.error}", file=sys.stderr)
    if table.n_errors == n:
        return 2
    return 3 if table.n_errors else 0


def _cmd_fit(args):
    track = load_track_file(args.track)
    model = fit_poly(track, args.window, args.degree)
    payload = {
        "coefficients": list(model.coefficients),
        "degree": model.degree,
        "window_ms": list(model.window_ms),
        "time_unit": "deciseconds from window start",
        "residual_rms_bark": model.residual_rms,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_force(args):
    config = RunConfig(fit_degree=args.degree, mass_m=args.mass,
                       coeff_k=args.k)
    track = load_track_file(args.track)
    _, text = run_force(track, config, n_samples=args.samples,
                        window_ms=args.window)
    _write_or_print(text, args.out)
    return 0


def _cmd_simulate(args):
    try:
        scenario = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    if not isinstance(scenario, dict):
        raise ConfigError("scenario JSON must be an object of keys")
    text, _ = run_simulate(scenario)
    _write_or_print(text, args.out)
    return 0


def _cmd_stats(args):
    try:
        table = load_records_csv(Path(args.records).read_text(encoding="utf-8"))
    except (OSError, ParseError) as exc:
        print(f"error: cannot read records: {exc}", file=sys.stderr)
        return 2
    group_by = tuple(g.strip() for g in args.group_by.split(",") if g.strip())
    try:
        report = run_stats(table, group_by=group_by, alpha=args.alpha,
                           min_gap_rad=args.min_gap, epsilon_rad=args.epsilon)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.text)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "stats.txt").write_text(report.text, encoding="utf-8")
        (out_dir / "stats.json").write_text(stats_json(report), encoding="utf-8")
    return 0


def _cmd_report(args):
    from . import figures

    out = args.out or f"{args.kind}.svg"
    if args.kind == "curves":
        from .dynamics import ForceProfile

        profiles = []
        hashes = set()
        for path in args.inputs:
            meta, times, accel, force = load_force_csv(
                Path(path).read_text(encoding="utf-8")
            )
            hashes.add(meta.get("config_hash", ""))
            profiles.append((Path(path).stem,
                             ForceProfile(times, accel, force, 1.0, 1.0)))
        config_hash = hashes.pop() if len(hashes) == 1 else "mixed"
        figures.render_curves(profiles, out, config_hash)
    else:
        if len(args.inputs) != 1:
            raise ConfigError(f"--kind {args.kind} takes exactly one records.csv")
        table = load_records_csv(Path(args.inputs[0]).read_text(encoding="utf-8"))
        ok_rows = [r for r in table.rows if r.status == "ok"]
        figures.RENDERERS[args.kind](ok_rows, out, table.config_hash)
    print(f"wrote {out}")
    return 0


_COMMANDS = {
    "bark": _cmd_bark,
    "extract": _cmd_extract,
    "analyze": _cmd_analyze,
    "fit": _cmd_fit,
    "force": _cmd_force,
    "simulate": _cmd_simulate,
    "stats": _cmd_stats,
    "report": _cmd_report,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TensekitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
