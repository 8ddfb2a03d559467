#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus under corpus/.

Twelve formant tracks with known tenseness geometry: six falling-F1
(tense, negative angle) and six rising-F1 (lax), spread over three
sources and two languages, with F0 ramps that co-vary with the angle so
the correlation section of the stats report has signal. Everything is
seeded; rerunning this script reproduces the files byte for byte.
"""

import math
from pathlib import Path

from tensekit import synth_track
from tensekit.ingest import format_track_csv

DURATION_MS = 300.0
STEP_MS = 5.0
ONSET_MS = 30.0
OFFSET_MS = 270.0
NOISE_SIGMA = 0.01  # Bark

# name, vowel, class, language, source, target angle (rad),
# z_start (Bark), accel (Bark/ds^2), f0 start->end (Hz)
FIXTURES = [
    ("tense_01", "i:", "tense", "en", "srcA", -0.28, 3.10, -0.10, (132, 120)),
    ("tense_02", "i:", "tense", "en", "srcB", -0.52, 3.00, -0.15, (128, 112)),
    ("tense_03", "i:", "tense", "en", "srcC", -0.40, 3.20, +0.10, (125, 110)),
    ("tense_04", "u:", "tense", "en", "srcA", -0.69, 3.45, -0.20, (118, 100)),
    ("tense_05", "u:", "tense", "en", "srcB", -0.60, 3.55, +0.12, (122, 106)),
    ("tense_06", "uR", "tense", "ja", "srcC", -0.33, 3.40, -0.08, (130, 117)),
    ("lax_01", "ɪ", "lax", "en", "srcA", +0.52, 3.60, +0.15, (112, 126)),
    ("lax_02", "ɪ", "lax", "en", "srcB", +0.40, 3.70, -0.10, (115, 127)),
    ("lax_03", "ɪ", "lax", "en", "srcC", +0.28, 3.55, +0.08, (118, 128)),
    ("lax_04", "ʊ", "lax", "en", "srcA", +0.45, 3.85, -0.12, (110, 124)),
    ("lax_05", "ʊ", "lax", "en", "srcB", +0.35, 3.95, +0.10, (114, 125)),
    ("lax_06", "uR", "lax", "ja", "srcC", +0.60, 3.75, +0.14, (108, 126)),
]


def main():
    out_dir = Path(__file__).resolve().parent.parent / "corpus"
    out_dir.mkdir(exist_ok=True)
    manifest_lines = [
        "path,vowel_label,class_label,language,source,onset_ms,offset_ms"
    ]
    for i, (name, vowel, cls, lang, source, theta, z_start, accel,
            (f0_a, f0_b)) in enumerate(FIXTURES):
        # the prescribed accel shifts the window-average slope by
        # accel * t_mid; compensate so the measured angle hits the target
        t_mid_ds = (ONSET_MS + 0.495 * (OFFSET_MS - ONSET_MS)) / 100.0
        slope = math.tan(theta) - accel * t_mid_ds
        track = synth_track(
            lambda t, a=accel: a,
            z_start_bark=z_start,
            zslope_start=slope,
            duration_ms=DURATION_MS,
            frame_step_ms=STEP_MS,
            noise_sigma_bark=NOISE_SIGMA,
            seed=100 + i,
            f0_start_hz=f0_a,
            f0_end_hz=f0_b,
            source_id=name,
        )
        (out_dir / f"{name}.csv").write_text(format_track_csv(track),
                                             encoding="utf-8")
        manifest_lines.append(
            f"{name}.csv,{vowel},{cls},{lang},{source},"
            f"{ONSET_MS:g},{OFFSET_MS:g}"
        )
    (out_dir / "manifest.csv").write_text("\n".join(manifest_lines) + "\n",
                                          encoding="utf-8")
    print(f"wrote {len(FIXTURES)} tracks + manifest to {out_dir}")


if __name__ == "__main__":
    main()
