"""Evaluation measures: speed-up, reduction, score error, predictive accuracy.

All measures compare an accelerated verdict table against a vanilla one over
the same mutant set.  Metrics whose denominator vanishes are reported as
None (rendered "N/A" in reports) rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .errors import ValidationError
from .testing import VerdictTable, mutation_score


@dataclass(frozen=True)
class MeasureReport:
    score_vanilla: float
    score_accel: float
    score_error: float | None  # |MS_V - MS_0| / MS_V; None when MS_V == 0
    speed_up: float  # (T_V - T_0) / T_V
    mutant_reduction: float  # (|M| - N_0) / |M|
    tested_vanilla: int
    tested_accel: int
    seconds_vanilla: float
    seconds_accel: float


def measures(accel: VerdictTable, vanilla: VerdictTable) -> MeasureReport:
    if set(accel.verdicts) != set(vanilla.verdicts):
        raise ValidationError("verdict tables cover different mutant sets")
    ms_v = mutation_score(vanilla)
    ms_0 = mutation_score(accel)
    t_v = vanilla.timing.total_seconds
    t_0 = accel.timing.total_seconds
    n_mutants = len(vanilla.verdicts)
    return MeasureReport(
        score_vanilla=ms_v,
        score_accel=ms_0,
        score_error=None if ms_v == 0 else abs(ms_v - ms_0) / ms_v,
        speed_up=(t_v - t_0) / t_v if t_v > 0 else 0.0,
        mutant_reduction=(n_mutants - accel.timing.tested_count) / n_mutants,
        tested_vanilla=vanilla.timing.tested_count,
        tested_accel=accel.timing.tested_count,
        seconds_vanilla=t_v,
        seconds_accel=t_0,
    )


@dataclass(frozen=True)
class PredictiveReport:
    mae: float
    rmae: float | None  # MAE / mean actual count; None when the mean is 0
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float | None
    recall: float | None
    f1: float | None
    mcc: float | None  # None on zero denominator


def predictive_metrics(accel: VerdictTable, vanilla: VerdictTable) -> PredictiveReport:
    """Predicted-vs-actual quality of verdict propagation.

    MAE/RMAE compare killing-label counts; the confusion matrix uses the
    classical killed/survived statuses (predicted = accelerated table,
    actual = vanilla table).  Mutants without an accelerated count (e.g.
    unselected under subset baselines) are skipped.
    """
    ids = [
        m
        for m, v in sorted(accel.verdicts.items())
        if v.killing_count is not None
    ]
    if not ids:
        raise ValidationError("no scored mutants to evaluate")
    predicted_counts = np.array([accel.verdicts[m].killing_count for m in ids], dtype=float)
    actual_counts = np.array([vanilla.verdicts[m].killing_count for m in ids], dtype=float)
    mae = float(np.mean(np.abs(actual_counts - predicted_counts)))
    mean_actual = float(np.mean(actual_counts))
    rmae = None if mean_actual == 0 else mae / mean_actual

    predicted_killed = np.array([accel.verdicts[m].killed for m in ids])
    actual_killed = np.array([vanilla.verdicts[m].killed for m in ids])
    tp = int(np.sum(predicted_killed & actual_killed))
    fp = int(np.sum(predicted_killed & ~actual_killed))
    tn = int(np.sum(~predicted_killed & ~actual_killed))
    fn = int(np.sum(~predicted_killed & actual_killed))

    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = None
    mcc_den = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    mcc = (tp * tn - fp * fn) / mcc_den if mcc_den else None
    return PredictiveReport(mae, rmae, tp, fp, tn, fn, precision, recall, f1, mcc)


def spearman_rho(xs, ys) -> float | None:
    """Rank correlation with average ranks for ties; None when either input
    is constant (undefined correlation)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("inputs must be 1-D and of equal length")
    if x.size < 2:
        raise ValidationError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return None
    return float(spearmanr(x, y)[0])
