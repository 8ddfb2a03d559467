import json
import math

import numpy as np
import pytest

from conftest import CORPUS_DIR
from tensekit.errors import ConfigError, ParseError
from tensekit.ingest import parse_manifest, parse_track_csv
from tensekit.pipeline import (RunConfig, format_records_csv, load_force_csv,
                               load_records_csv, parse_accel_spec, run_analyze,
                               run_force, run_simulate, run_stats, stats_json)


@pytest.fixture(scope="module")
def corpus_table(manifest_text):
    manifest = parse_manifest(manifest_text)
    return run_analyze(manifest, RunConfig(), base_dir=CORPUS_DIR)


@pytest.fixture(scope="module")
def manifest_text():
    return (CORPUS_DIR / "manifest.csv").read_text(encoding="utf-8")


class TestRunAnalyze:
    def test_bundled_corpus_clean(self, corpus_table):
        assert len(corpus_table.rows) == 12
        assert corpus_table.n_errors == 0
        for row in corpus_table.rows:
            assert row.config_hash == corpus_table.config_hash
            if row.class_label == "tense":
                assert row.theta1_rad < 0
            else:
                assert row.theta1_rad > 0

    def test_rows_in_manifest_order(self, corpus_table, manifest_text):
        manifest = parse_manifest(manifest_text)
        assert [r.path for r in corpus_table.rows] == [
            e.path for e in manifest.entries
        ]

    def test_missing_file_becomes_error_row(self, tmp_path):
        (tmp_path / "ok.csv").write_text(
            "time_ms,f1_hz,f2_hz,f3_hz,f0_hz\n0,500,,,\n150,520,,,\n300,510,,,\n"
        )
        manifest = parse_manifest(
            "path,vowel_label,class_label,language,source,onset_ms,offset_ms\n"
            "ok.csv,i:,tense,en,s,0,300\n"
            "gone.csv,i:,lax,en,s,0,300\n"
        )
        table = run_analyze(manifest, RunConfig(), base_dir=tmp_path)
        assert table.rows[0].status == "ok"
        assert table.rows[1].status == "error"
        assert table.rows[1].error != ""
        assert table.n_errors == 1

    def test_bad_entry_does_not_disturb_others(self, tmp_path, manifest_text):
        import shutil

        for f in CORPUS_DIR.glob("*.csv"):
            shutil.copy(f, tmp_path / f.name)
        clean = run_analyze(parse_manifest(manifest_text), RunConfig(),
                            base_dir=tmp_path)
        spiked = manifest_text + "missing.csv,i:,tense,en,srcA,0,100\n"
        dirty = run_analyze(parse_manifest(spiked), RunConfig(),
                            base_dir=tmp_path)
        assert dirty.n_errors == 1
        for a, b in zip(clean.rows, dirty.rows[:-1]):
            assert a.theta1_rad == b.theta1_rad
            assert a.f1_33_hz == b.f1_33_hz

    def test_worker_count_does_not_change_output(self, manifest_text):
        manifest = parse_manifest(manifest_text)
        seq = run_analyze(manifest, RunConfig(), base_dir=CORPUS_DIR, workers=1)
        par = run_analyze(manifest, RunConfig(), base_dir=CORPUS_DIR, workers=6)
        assert format_records_csv(seq) == format_records_csv(par)

    def test_records_csv_round_trip(self, corpus_table):
        text = format_records_csv(corpus_table)
        back = load_records_csv(text)
        assert len(back.rows) == len(corpus_table.rows)
        for a, b in zip(corpus_table.rows, back.rows):
            assert a.path == b.path
            assert a.theta1_rad == b.theta1_rad  # 17g digits: bit exact
            assert a.delta_f0_hz == b.delta_f0_hz

    def test_wav_entry_goes_through_extraction(self, tmp_path):
        import sys

        sys.path.insert(0, str(CORPUS_DIR.parent / "tests"))
        from oracles import resonator_vowel
        from tensekit.ingest import write_wav

        audio = resonator_vowel([350.0, 1800.0, 2700.0], [60.0, 90.0, 120.0],
                                120.0, 10000, 0.4)
        (tmp_path / "vowel.wav").write_bytes(write_wav(audio))
        manifest = parse_manifest(
            "path,vowel_label,class_label,language,source,onset_ms,offset_ms\n"
            "vowel.wav,u:,tense,en,s,50,350\n"
        )
        table = run_analyze(manifest, RunConfig(), base_dir=tmp_path)
        assert table.rows[0].status == "ok"
        assert abs(table.rows[0].f1_33_hz - 350.0) <= 40.0
        assert table.rows[0].f0_33_hz == pytest.approx(120.0, abs=3.0)


class TestRunStats:
    def test_report_sections(self, corpus_table):
        report = run_stats(corpus_table)
        assert "Welch t-test" in report.text
        assert "Two-way ANOVA" in report.text
        assert "Pearson" in report.text
        assert report.data["welch"]["p_value"] < 0.05
        assert report.data["anova"]["class"]["p_value"] < 0.05
        assert report.data["pearson"]["r"] > 0.5
        assert report.data["pearson"]["p_value"] < 0.001

    def test_summary_layout(self, corpus_table):
        report = run_stats(corpus_table)
        assert "Min." in report.text and "3rd Qu." in report.text
        groups = {tuple(g["group"].items()): g for g in report.data["groups"]}
        assert (("class", "tense"),) in groups
        tense = groups[(("class", "tense"),)]
        assert tense["n"] == 6
        assert tense["median"] < 0

    def test_group_by_source_and_class(self, corpus_table):
        report = run_stats(corpus_table, group_by=("source", "class"))
        assert len(report.data["groups"]) == 6  # 3 sources x 2 classes

    def test_single_source_marks_anova_na(self, corpus_table):
        rows = [r for r in corpus_table.rows if r.source == "srcA"]
        table = type(corpus_table)(rows, corpus_table.config_hash)
        report = run_stats(table)
        assert "not_applicable" in report.data["anova"]

    def test_no_f0_marks_pearson_na(self, corpus_table):
        from dataclasses import replace

        rows = [replace(r, delta_f0_hz=None) for r in corpus_table.rows]
        table = type(corpus_table)(rows, corpus_table.config_hash)
        report = run_stats(table)
        assert "not_applicable" in report.data["pearson"]

    def test_json_serializable_and_stable(self, corpus_table):
        report = run_stats(corpus_table)
        a = stats_json(report)
        b = stats_json(run_stats(corpus_table))
        assert a == b
        assert json.loads(a)["n_rows"] == 12

    def test_unknown_group_key(self, corpus_table):
        with pytest.raises(ConfigError):
            run_stats(corpus_table, group_by=("speaker",))

    def test_pair_classification_section(self, corpus_table):
        report = run_stats(corpus_table)
        pair = report.data["pair_classification"]
        assert pair["bifurcated"] is True
        assert pair["label_a"] == "Tense"
        assert pair["label_b"] == "Lax"
        assert "Pair classification" in report.text

    def test_pair_policy_thresholds_respected(self, corpus_table):
        strict = run_stats(corpus_table, min_gap_rad=5.0)
        assert strict.data["pair_classification"]["bifurcated"] is False

    def test_reference_median_targets_reproduced(self):
        # a two-class table whose theta medians sit exactly on the
        # reference pair (-0.2810, 0.5170) must echo them in the summary
        from tensekit.pipeline import RecordRow, RecordsTable

        tense_thetas = [-0.9, -0.51, -0.2810, -0.12, 0.05]
        lax_thetas = [-0.2, 0.31, 0.5170, 0.80, 1.1]
        rows = [
            RecordRow(path=f"t{i}", class_label="tense", source="s",
                      theta1_rad=v, config_hash="h")
            for i, v in enumerate(tense_thetas)
        ] + [
            RecordRow(path=f"l{i}", class_label="lax", source="s",
                      theta1_rad=v, config_hash="h")
            for i, v in enumerate(lax_thetas)
        ]
        report = run_stats(RecordsTable(rows, "h"))
        groups = {g["group"]["class"]: g for g in report.data["groups"]}
        assert groups["tense"]["median"] == pytest.approx(-0.2810, abs=1e-12)
        assert groups["lax"]["median"] == pytest.approx(0.5170, abs=1e-12)
        assert report.data["welch"]["p_value"] < 0.05

    def test_mixed_config_rows_flagged(self, corpus_table):
        from dataclasses import replace

        rows = list(corpus_table.rows)
        rows[0] = replace(rows[0], config_hash="other")
        table = type(corpus_table)(rows, corpus_table.config_hash)
        report = run_stats(table)
        assert report.data["mixed_configs"] is True
        assert "WARNING" in report.text


class TestRunForce:
    def test_cubic_echo(self):
        from tensekit.dynamics import synth_track

        track = synth_track(lambda t: 1.2, z_start_bark=7.0, zslope_start=-1.0,
                            duration_ms=300.0, frame_step_ms=5.0)
        profile, text = run_force(track, RunConfig(), n_samples=5)
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert lines[0] == "t_ds,a_tense,f_tense,warning"
        assert len(lines) == 6
        meta, t, a, f = load_force_csv(text)
        np.testing.assert_allclose(a, 1.2, rtol=1e-6)
        np.testing.assert_array_equal(a, f)  # m = k = 1
        assert meta["mass_m"] == "1"

    def test_two_samples_are_endpoints(self):
        from tensekit.dynamics import synth_track

        track = synth_track(lambda t: 0.5, z_start_bark=7.0, zslope_start=0.0,
                            duration_ms=200.0, frame_step_ms=10.0)
        profile, _ = run_force(track, RunConfig(), n_samples=2)
        np.testing.assert_allclose(profile.times_ds, [0.0, 2.0])

    def test_degenerate_degree_warning_column(self):
        from tensekit.dynamics import synth_track

        track = synth_track(lambda t: 0.0, z_start_bark=7.0, zslope_start=0.1,
                            duration_ms=200.0, frame_step_ms=10.0)
        _, text = run_force(track, RunConfig(fit_degree=1), n_samples=3)
        data = [l for l in text.splitlines()
                if not l.startswith("#") and not l.startswith("t_ds")]
        assert all(l.endswith(",degenerate_degree") for l in data)


class TestRunSimulate:
    def test_round_trip_constant_accel(self):
        csv_text, _ = run_simulate({
            "accel": "const:0.8", "z_start": 8.0, "zslope_start": -0.5,
            "duration_ms": 300, "frame_step_ms": 5,
        })
        track = parse_track_csv(csv_text)
        _, force_text = run_force(track, RunConfig(), n_samples=11)
        _, _, a, _ = load_force_csv(force_text)
        assert np.max(np.abs(a - 0.8)) / 0.8 <= 0.01

    def test_zero_accel_flat(self):
        csv_text, _ = run_simulate({
            "accel": "const:0", "z_start": 6.0, "duration_ms": 200,
            "frame_step_ms": 10,
        })
        track = parse_track_csv(csv_text)
        assert np.ptp(track.f1_hz) <= 1e-9

    def test_oscillator_columns_and_period(self):
        p, m = 4.0, 1.0
        csv_text, _ = run_simulate({
            "accel": "const:0", "z_start": 6.0,
            "duration_ms": 2.0 * math.pi * math.sqrt(m / p) * 100.0,
            "frame_step_ms": 1.0,
            "m": m, "oscillator": {"p": p, "y0": 0.0},
        })
        header, *rows = csv_text.splitlines()
        assert header.endswith(",y_osc,vy_osc")
        y = np.array([float(r.split(",")[5]) for r in rows])
        # one full period: back to the initial displacement
        assert y[0] == 1.0
        assert abs(y[-1] - 1.0) <= 1e-4
        # parse_track_csv still accepts the file
        parse_track_csv(csv_text)

    def test_linear_accel_spec(self):
        fn = parse_accel_spec("linear:0.5,2.0")
        assert fn(0.0) == 0.5
        assert fn(1.5) == 3.5
        with pytest.raises(ConfigError):
            parse_accel_spec("quad:1,2,3")
        with pytest.raises(ConfigError):
            parse_accel_spec("const:a")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            run_simulate({"accel": "const:0", "z_start": 6.0,
                          "duration_ms": 100, "frame_step_ms": 5,
                          "turbulence": 1})

    def test_missing_key_rejected(self):
        with pytest.raises(ConfigError, match="z_start"):
            run_simulate({"accel": "const:0", "duration_ms": 100,
                          "frame_step_ms": 5})

    def test_seeded_noise_reproducible(self):
        scenario = {"accel": "const:0", "z_start": 6.0, "duration_ms": 100,
                    "frame_step_ms": 5, "noise_sigma_bark": 0.05, "seed": 9}
        a, _ = run_simulate(scenario)
        b, _ = run_simulate(scenario)
        assert a == b


class TestConfigHash:
    def test_stable_and_sensitive(self):
        a = RunConfig()
        b = RunConfig()
        c = RunConfig(fit_degree=4)
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != c.config_hash()

    def test_embedded_in_outputs(self, corpus_table):
        text = format_records_csv(corpus_table)
        assert corpus_table.config_hash in text


class TestLoadRecords:
    def test_rejects_foreign_header(self):
        with pytest.raises(ParseError):
            load_records_csv("a,b,c\n1,2,3\n")

    def test_empty_file(self):
        with pytest.raises(ParseError):
            load_records_csv("")
