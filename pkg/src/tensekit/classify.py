"""Tense/stable/lax classification from the formant angle.

For close vowels a negative angle means constriction (tense), zero means
a stable tract, positive means expansion (lax). Pairs of vowels are
classified relatively: if the two angle distributions are bifurcated —
significantly separated AND at least a minimum median gap apart — the
lower-median vowel is the tense one, whatever the absolute signs. Both
thresholds are policy, echoed in every verdict.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, DomainError
from .stats import welch_t


class TensenessClass(Enum):
    TENSE = "Tense"
    STABLE = "Stable"
    LAX = "Lax"


def classify_theta(theta1_rad, epsilon_rad=0.0):
    """Sign rule with an optional tolerance band around zero."""
    if not math.isfinite(theta1_rad):
        raise DomainError(f"theta must be finite, got {theta1_rad}")
    if epsilon_rad < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon_rad}")
    if theta1_rad < -epsilon_rad:
        return TensenessClass.TENSE
    if theta1_rad > epsilon_rad:
        return TensenessClass.LAX
    return TensenessClass.STABLE


@dataclass
class PairPolicy:
    alpha: float = 0.05
    min_gap_rad: float = 0.1
    epsilon_rad: float = 0.0


@dataclass
class PairEvidence:
    median_a: float
    median_b: float
    welch_t: float
    welch_p: float
    median_gap: float


@dataclass
class PairVerdict:
    label_a: TensenessClass
    label_b: TensenessClass
    bifurcated: bool
    evidence: PairEvidence


def classify_pair(thetas_a, thetas_b, policy=None):
    """Relative classification of two vowels from their angle samples.

    Bifurcated means Welch p < alpha and a median gap of at least
    min_gap_rad; then the lower median is Tense and the higher Lax.
    Otherwise each vowel gets the absolute sign rule on its median.
    Point-mass groups (zero variance in both) are separated by their
    medians directly.
    """
    policy = policy or PairPolicy()
    xa = np.asarray(list(thetas_a), dtype=float)
    xb = np.asarray(list(thetas_b), dtype=float)
    if len(xa) < 2 or len(xb) < 2:
        raise DataError("each vowel needs at least 2 angle samples")
    median_a = float(np.median(xa))
    median_b = float(np.median(xb))
    gap = abs(median_a - median_b)
    try:
        test = welch_t(xa, xb)
        t_stat, p = test.statistic, test.p_value
    except DataError:
        # two point masses: trivially separated unless they coincide
        p = 1.0 if gap == 0.0 else 0.0
        t_stat = 0.0 if gap == 0.0 else math.copysign(math.inf, median_a - median_b)
    evidence = PairEvidence(median_a, median_b, t_stat, p, gap)

    bifurcated = p < policy.alpha and gap >= policy.min_gap_rad and gap > 0.0
    if bifurcated:
        if median_a < median_b:
            labels = (TensenessClass.TENSE, TensenessClass.LAX)
        else:
            labels = (TensenessClass.LAX, TensenessClass.TENSE)
    else:
        labels = (
            classify_theta(median_a, policy.epsilon_rad),
            classify_theta(median_b, policy.epsilon_rad),
        )
    return PairVerdict(labels[0], labels[1], bifurcated, evidence)


def relative_by_deviation(f1_a_hz, f1_b_hz, f_neu_hz):
    """Which of two vowels deviates more from the neutral F1.

    Returns 'a', 'b', or 'tie'; the larger |F1 - F_neu| marks the
    relatively more tense vowel, direction of deviation ignored.
    """
    if min(f1_a_hz, f1_b_hz, f_neu_hz) <= 0:
        raise DomainError("frequencies must be positive")
    dev_a = abs(f1_a_hz - f_neu_hz)
    dev_b = abs(f1_b_hz - f_neu_hz)
    if dev_a > dev_b:
        return "a"
    if dev_b > dev_a:
        return "b"
    return "tie"
