import re

import numpy as np
import pytest

from tensekit import figures
from tensekit.dynamics import ForceProfile
from tensekit.errors import DataError
from tensekit.pipeline import RecordRow


def _rows(n_tense=4, n_lax=4, with_f0=True):
    rng = np.random.default_rng(9)
    rows = []
    for i in range(n_tense + n_lax):
        tense = i < n_tense
        theta = float(rng.normal(-0.4 if tense else 0.4, 0.1))
        rows.append(RecordRow(
            path=f"r{i}.csv", vowel_label="i:" if tense else "I",
            class_label="tense" if tense else "lax", language="en",
            source="srcA", d_ds=0.8, theta1_rad=theta, theta_f1_rad=theta,
            f1_33_hz=float(rng.uniform(280, 420)),
            z1_33_bark=3.0,
            delta_f0_hz=float(rng.normal(0, 5)) if with_f0 else None,
            config_hash="abc",
        ))
    return rows


def _marker_count(path, group_prefix):
    text = path.read_text()
    total = 0
    for m in re.finditer(rf'<g id="{group_prefix}_\d+">(.*?)</g>', text, re.S):
        total += m.group(1).count("<use ")
    return total


class TestStrip1d:
    def test_structure(self, tmp_path):
        out = tmp_path / "strip.svg"
        figures.render_strip1d(_rows(), out)
        text = out.read_text()
        assert text.lstrip().startswith("<?xml")
        assert "tense" in text and "lax" in text  # two class columns

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        rows = _rows()
        figures.render_strip1d(rows, a)
        figures.render_strip1d(rows, b)
        assert a.read_bytes() == b.read_bytes()

    def test_empty_selection(self, tmp_path):
        with pytest.raises(DataError, match="strip1d"):
            figures.render_strip1d([], tmp_path / "x.svg")


class TestScatter:
    def test_marker_cardinality(self, tmp_path):
        rows = _rows(5, 3)
        out = tmp_path / "sc.svg"
        figures.render_scatter2d_f1(rows, out)
        assert _marker_count(out, "PathCollection") == len(rows)

    def test_df0_skips_missing(self, tmp_path):
        rows = _rows(4, 4)
        rows[0].delta_f0_hz = None
        out = tmp_path / "df0.svg"
        figures.render_scatter2d_df0(rows, out)
        assert _marker_count(out, "PathCollection") == len(rows) - 1

    def test_df0_all_missing(self, tmp_path):
        with pytest.raises(DataError, match="scatter2d_df0"):
            figures.render_scatter2d_df0(_rows(with_f0=False), tmp_path / "x.svg")

    def test_byte_identical(self, tmp_path):
        rows = _rows()
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        figures.render_scatter2d_f1(rows, a)
        figures.render_scatter2d_f1(rows, b)
        assert a.read_bytes() == b.read_bytes()


class TestCurves:
    def _profiles(self):
        t = np.linspace(0.0, 2.0, 50)
        return [
            ("english", ForceProfile(t, 6.0 * t, 6.0 * t, 1.0, 1.0)),
            ("japanese", ForceProfile(t, 0.6 * t, 0.6 * t, 1.0, 1.0)),
        ]

    def test_renders_lines(self, tmp_path):
        out = tmp_path / "curves.svg"
        figures.render_curves(self._profiles(), out)
        text = out.read_text()
        assert "english" in text and "japanese" in text

    def test_empty(self, tmp_path):
        with pytest.raises(DataError, match="curves"):
            figures.render_curves([], tmp_path / "x.svg")


def test_config_hash_embedded(tmp_path):
    out = tmp_path / "h.svg"
    figures.render_strip1d(_rows(), out, config_hash="deadbeef0123")
    assert "deadbeef0123" in out.read_text()


def test_canvas_is_800_by_600(tmp_path):
    out = tmp_path / "c.svg"
    figures.render_strip1d(_rows(), out)
    head = out.read_text()[:800]
    assert 'width="800pt"' in head or 'width="800"' in head
    assert 'height="600pt"' in head or 'height="600"' in head
