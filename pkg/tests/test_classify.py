import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensekit.classify import (PairPolicy, TensenessClass, classify_pair,
                               classify_theta, relative_by_deviation)
from tensekit.errors import DataError, DomainError


class TestClassifyTheta:
    def test_table_mapping(self):
        assert classify_theta(-0.3, 0.01) is TensenessClass.TENSE
        assert classify_theta(0.0) is TensenessClass.STABLE
        assert classify_theta(0.4) is TensenessClass.LAX

    def test_tolerance_band(self):
        assert classify_theta(0.005, 0.01) is TensenessClass.STABLE
        assert classify_theta(-0.005, 0.01) is TensenessClass.STABLE
        assert classify_theta(0.011, 0.01) is TensenessClass.LAX

    def test_default_epsilon_zero(self):
        assert classify_theta(-1e-12) is TensenessClass.TENSE
        assert classify_theta(1e-12) is TensenessClass.LAX

    def test_invalid(self):
        with pytest.raises(DomainError):
            classify_theta(float("nan"))
        with pytest.raises(DomainError):
            classify_theta(0.1, epsilon_rad=-0.01)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=-1.5, max_value=1.5),
           st.floats(min_value=-1.5, max_value=1.5),
           st.floats(min_value=0.0, max_value=0.2))
    def test_monotone_in_theta(self, t1, t2, eps):
        order = {TensenessClass.TENSE: 0, TensenessClass.STABLE: 1,
                 TensenessClass.LAX: 2}
        lo, hi = min(t1, t2), max(t1, t2)
        assert order[classify_theta(lo, eps)] <= order[classify_theta(hi, eps)]


def _samples(median, n=30, spread=0.08, seed=0):
    rng = np.random.default_rng(seed)
    return median + spread * rng.standard_normal(n)


class TestClassifyPair:
    PAPER_MEDIAN_PAIRS = [
        (-0.2810, 0.5170),    # English close front pair
        (-0.69243, 0.4031),   # English close back pair
        (-0.18350, 0.2810),   # Japanese long-vowel accent pair
    ]

    @pytest.mark.parametrize("med_a,med_b", PAPER_MEDIAN_PAIRS)
    def test_bifurcated_pairs(self, med_a, med_b):
        verdict = classify_pair(_samples(med_a, seed=1), _samples(med_b, seed=2))
        assert verdict.bifurcated
        assert verdict.label_a is TensenessClass.TENSE
        assert verdict.label_b is TensenessClass.LAX
        assert verdict.evidence.welch_p < 0.05
        assert verdict.evidence.median_gap >= 0.1

    def test_point_mass_pair(self):
        # zero-variance groups separate by median alone
        verdict = classify_pair([-0.2810] * 5, [0.5170] * 5)
        assert verdict.bifurcated
        assert (verdict.label_a, verdict.label_b) == (
            TensenessClass.TENSE, TensenessClass.LAX
        )

    def test_identical_distributions_not_bifurcated(self):
        xs = _samples(0.01, seed=3)
        verdict = classify_pair(xs, xs)
        assert not verdict.bifurcated
        assert verdict.label_a is verdict.label_b

    def test_same_sign_close_pair_still_bifurcates(self):
        # both medians positive: relative classification, not absolute
        a = _samples(0.05, spread=0.02, seed=4)
        b = _samples(0.35, spread=0.02, seed=5)
        verdict = classify_pair(a, b)
        assert verdict.bifurcated
        assert verdict.label_a is TensenessClass.TENSE
        assert verdict.label_b is TensenessClass.LAX

    def test_small_gap_not_bifurcated(self):
        a = _samples(0.00, spread=0.005, seed=6)
        b = _samples(0.05, spread=0.005, seed=7)
        verdict = classify_pair(a, b)  # significant but gap < 0.1 rad
        assert verdict.evidence.welch_p < 0.05
        assert not verdict.bifurcated

    def test_symmetry(self):
        a, b = _samples(-0.3, seed=8), _samples(0.4, seed=9)
        v1 = classify_pair(a, b)
        v2 = classify_pair(b, a)
        assert (v1.label_a, v1.label_b) == (v2.label_b, v2.label_a)
        assert v1.bifurcated == v2.bifurcated

    def test_translation_invariance(self):
        a, b = _samples(-0.3, seed=10), _samples(0.2, seed=11)
        v1 = classify_pair(a, b)
        v2 = classify_pair(a + 0.7, b + 0.7)
        assert v1.bifurcated == v2.bifurcated
        assert v2.evidence.welch_p == pytest.approx(v1.evidence.welch_p, rel=1e-9)
        assert v2.evidence.median_gap == pytest.approx(v1.evidence.median_gap,
                                                       abs=1e-12)
        # relative ordering preserved
        assert (v1.evidence.median_a < v1.evidence.median_b) == (
            v2.evidence.median_a < v2.evidence.median_b
        )

    def test_policy_thresholds(self):
        a, b = _samples(-0.02, spread=0.01, seed=12), _samples(0.03, spread=0.01, seed=13)
        strict = classify_pair(a, b, PairPolicy(min_gap_rad=0.1))
        loose = classify_pair(a, b, PairPolicy(min_gap_rad=0.01))
        assert not strict.bifurcated
        assert loose.bifurcated

    def test_insufficient_data(self):
        with pytest.raises(DataError):
            classify_pair([0.1], [0.2, 0.3])


class TestRelativeByDeviation:
    def test_paper_inequality(self):
        assert relative_by_deviation(300.0, 450.0, 500.0) == "a"

    def test_tie_at_neutral(self):
        assert relative_by_deviation(500.0, 500.0, 500.0) == "tie"

    def test_direction_agnostic(self):
        # deviations 200 vs 150, opposite directions
        assert relative_by_deviation(700.0, 350.0, 500.0) == "a"

    def test_reflection_invariance(self):
        # reflecting both F1 values about F_neu preserves the ordering
        f_neu = 500.0
        for fa, fb in ((300.0, 450.0), (520.0, 700.0), (410.0, 590.0)):
            direct = relative_by_deviation(fa, fb, f_neu)
            reflected = relative_by_deviation(2 * f_neu - fa, 2 * f_neu - fb, f_neu)
            assert direct == reflected

    def test_positive_only(self):
        with pytest.raises(DomainError):
            relative_by_deviation(-300.0, 450.0, 500.0)
