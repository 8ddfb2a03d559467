import math
from pathlib import Path

import numpy as np
import pytest

from tensekit.ingest import FormantTrack
from tensekit.scales import bark_to_hz

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"
DATA_DIR = Path(__file__).resolve().parent / "data"


def track_from_bark_line(z0, slope_per_ds, duration_ms=300.0, step_ms=3.0,
                         f0=None):
    """Track whose F1 is exactly bark_to_hz(z0 + slope * t_ds).

    With step 3 ms the 33%/66% landmarks of a [0, 300] segment (99 and
    198 ms) fall on frame times, so no interpolation error enters.
    """
    times = np.arange(0.0, duration_ms + step_ms / 2, step_ms)
    z = z0 + slope_per_ds * times / 100.0
    f1 = bark_to_hz(z)
    nan = np.full(len(times), np.nan)
    f0_arr = np.full(len(times), float(f0)) if f0 is not None else nan.copy()
    return FormantTrack(times, f1, nan.copy(), nan.copy(), f0_arr, "bark-line")


def track_from_bark_poly(coeffs, duration_ms=300.0, step_ms=3.0):
    """Track with F1 = bark_to_hz(polynomial in t_ds), ascending coeffs."""
    times = np.arange(0.0, duration_ms + step_ms / 2, step_ms)
    t_ds = times / 100.0
    z = sum(c * t_ds**i for i, c in enumerate(coeffs))
    nan = np.full(len(times), np.nan)
    return FormantTrack(times, bark_to_hz(z), nan.copy(), nan.copy(),
                        nan.copy(), "bark-poly")


@pytest.fixture(scope="session")
def corpus_dir():
    assert CORPUS_DIR.is_dir(), "bundled corpus missing; run scripts/make_corpus.py"
    return CORPUS_DIR


@pytest.fixture(scope="session")
def manifest_text(corpus_dir):
    return (corpus_dir / "manifest.csv").read_text(encoding="utf-8")


def assert_close(actual, expected, tol, what=""):
    assert math.isfinite(actual), f"{what}: got {actual}"
    assert abs(actual - expected) <= tol, (
        f"{what}: {actual} vs {expected} (|diff|={abs(actual - expected):.3g} "
        f"> {tol:g})"
    )
