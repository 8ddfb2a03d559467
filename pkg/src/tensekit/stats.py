"""Descriptive summaries and the inferential battery: Welch's t-test,
two-way ANOVA (Type II sums of squares), Pearson correlation.

Tail probabilities come from a self-contained regularized incomplete beta
(modified Lentz continued fraction, 1e-12 convergence): bit-stable and
free of external math dependencies. Quartiles default to linear
interpolation (Hyndman-Fan type 7), the convention of the usual
statistical environments; other variants are selectable.

Type II sums of squares are used for the two-way ANOVA because the
designs this serves are unbalanced; each main effect is adjusted for the
other, the interaction for both, and F tests share the full model's
residual mean square.
"""

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ConfigError, DataError


@dataclass
class SixNumberSummary:
    """Min. / 1st Qu. / Median / Mean / 3rd Qu. / Max."""

    minimum: float
    q1: float
    median: float
    mean: float
    q3: float
    maximum: float

    def as_tuple(self):
        return (self.minimum, self.q1, self.median, self.mean, self.q3,
                self.maximum)


@dataclass
class TestResult:
    """statistic with degrees of freedom and two-sided p.

    df2 is the denominator df for F statistics; None for t statistics.
    """

    statistic: float
    df: float
    p_value: float
    kind: str
    df2: float | None = None


def summarize(values, quantile_method="linear"):
    """Six-number summary with type-7 (linear interpolation) quartiles."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise DataError("cannot summarize an empty list")
    if not np.all(np.isfinite(arr)):
        raise DataError("values must be finite")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75], method=quantile_method)
    lo, hi = float(arr.min()), float(arr.max())
    # summation rounding can push the mean one ulp outside [min, max]
    mean = min(max(float(arr.mean()), lo), hi)
    return SixNumberSummary(lo, float(q1), float(med), mean, float(q3), hi)


# --- regularized incomplete beta -------------------------------------------

_BETA_TOL = 1e-12
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 500


def _beta_cf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise DataError(f"incomplete beta failed to converge for a={a} b={b} x={x}")


def betainc_reg(a, b, x):
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise DataError(f"shape parameters must be positive, got a={a} b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_tail_two_sided(t, df):
    """Two-sided p for Student's t: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)."""
    if df <= 0:
        raise DataError(f"df must be positive, got {df}")
    if t == 0.0:
        return 1.0
    return betainc_reg(df / 2.0, 0.5, df / (df + t * t))


def f_tail(f, df1, df2):
    """Upper-tail p for the F distribution: P(F' >= f)."""
    if df1 <= 0 or df2 <= 0:
        raise DataError(f"degrees of freedom must be positive, got {df1}, {df2}")
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc_reg(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f))


# --- tests ------------------------------------------------------------------

def welch_t(a, b):
    """Welch's unequal-variance t-test, two-sided.

    t = (mean_a - mean_b) / sqrt(s2_a/n_a + s2_b/n_b), with the
    Welch-Satterthwaite degrees of freedom.
    """
    xa = np.asarray(list(a), dtype=float)
    xb = np.asarray(list(b), dtype=float)
    if len(xa) < 2 or len(xb) < 2:
        raise DataError("each group needs at least 2 values")
    va, vb = xa.var(ddof=1), xb.var(ddof=1)
    if va == 0.0 and vb == 0.0:
        raise DataError("both groups have zero variance")
    na, nb = len(xa), len(xb)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    t = (xa.mean() - xb.mean()) / math.sqrt(se2)
    df = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    return TestResult(float(t), float(df), t_tail_two_sided(t, df), "welch_t")


def pearson(x, y):
    """Sample correlation with two-sided significance via
    t = r sqrt((n-2)/(1-r^2)). Returns (r, TestResult)."""
    xs = np.asarray(list(x), dtype=float)
    ys = np.asarray(list(y), dtype=float)
    if len(xs) != len(ys):
        raise DataError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise DataError("need at least 3 paired values")
    dx, dy = xs - xs.mean(), ys - ys.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DataError("zero variance in one of the variables")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if 1.0 - r * r <= 0.0:
        return r, TestResult(math.copysign(math.inf, r), df, 0.0, "pearson_t")
    t = r * math.sqrt(df / (1.0 - r * r))
    return r, TestResult(t, float(df), t_tail_two_sided(t, df), "pearson_t")


@dataclass
class Anova2Result:
    factor_a: TestResult
    factor_b: TestResult
    interaction: TestResult | None
    residual_df: float


def _rss(design, y):
    coeffs, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coeffs
    return float(resid @ resid)


def _dummies(labels, levels):
    """Treatment-coded indicator columns (first level dropped)."""
    return np.column_stack(
        [(labels == lv).astype(float) for lv in levels[1:]]
    ) if len(levels) > 1 else np.empty((len(labels), 0))


def anova2(records, interaction=True):
    """Fixed-effects two-way ANOVA with Type II sums of squares.

    records: iterable of (factor_a_label, factor_b_label, value). With
    interaction=True every cell of the design must be occupied; sparse
    designs should rerun with interaction=False (main effects only).
    """
    rows = list(records)
    if not rows:
        raise DataError("no observations")
    a_labels = np.array([str(r[0]) for r in rows])
    b_labels = np.array([str(r[1]) for r in rows])
    y = np.array([float(r[2]) for r in rows])
    if not np.all(np.isfinite(y)):
        raise DataError("values must be finite")
    a_levels = sorted(set(a_labels))
    b_levels = sorted(set(b_labels))
    if len(a_levels) < 2 or len(b_levels) < 2:
        raise DataError("each factor needs at least 2 levels")
    if interaction:
        cells = set(zip(a_labels, b_labels))
        missing = [c for c in product(a_levels, b_levels) if c not in cells]
        if missing:
            raise ConfigError(
                f"empty design cell(s) {missing}; rerun with interaction=False "
                "(main effects only)"
            )

    n = len(y)
    ones = np.ones((n, 1))
    da = _dummies(a_labels, a_levels)
    db = _dummies(b_labels, b_levels)
    dab = np.column_stack([
        da[:, i] * db[:, j] for i in range(da.shape[1]) for j in range(db.shape[1])
    ]) if interaction else np.empty((n, 0))

    rss_a = _rss(np.hstack([ones, da]), y)
    rss_b = _rss(np.hstack([ones, db]), y)
    rss_main = _rss(np.hstack([ones, da, db]), y)
    df_a = len(a_levels) - 1
    df_b = len(b_levels) - 1
    ss_a = max(0.0, rss_b - rss_main)
    ss_b = max(0.0, rss_a - rss_main)

    if interaction:
        rss_full = _rss(np.hstack([ones, da, db, dab]), y)
        df_ab = df_a * df_b
        ss_ab = max(0.0, rss_main - rss_full)
        model_df = 1 + df_a + df_b + df_ab
    else:
        rss_full = rss_main
        model_df = 1 + df_a + df_b
    df_res = n - model_df
    if df_res <= 0:
        raise DataError(f"no residual degrees of freedom (n={n}, model={model_df})")
    ms_res = rss_full / df_res

    def effect(ss, df_eff, name):
        if ms_res == 0.0:
            f = 0.0 if ss <= 0.0 else math.inf
        else:
            f = (ss / df_eff) / ms_res
        return TestResult(f, float(df_eff), f_tail(f, df_eff, df_res), name,
                          df2=float(df_res))

    return Anova2Result(
        factor_a=effect(ss_a, df_a, "anova_f"),
        factor_b=effect(ss_b, df_b, "anova_f"),
        interaction=effect(ss_ab, df_ab, "anova_f") if interaction else None,
        residual_df=float(df_res),
    )
