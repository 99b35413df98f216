"""Plume-class confusion metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from plumedt.errors import PlumeInputError

METRIC_NAMES = ("accuracy", "precision", "recall", "iou")


@dataclass(frozen=True)
class ClassMetrics:
    """Accuracy plus plume-class precision, recall and IoU.

    Ratios with a zero denominator are reported as 0 and set `degenerate`.
    """

    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    iou: float
    degenerate: bool

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int) -> ClassMetrics:
        tp, fp, tn, fn = int(tp), int(fp), int(tn), int(fn)
        total = tp + fp + tn + fn
        degenerate = False

        def ratio(num, den):
            nonlocal degenerate
            if den == 0:
                degenerate = True
                return 0.0
            return num / den

        return cls(
            tp, fp, tn, fn,
            accuracy=ratio(tp + tn, total),
            precision=ratio(tp, tp + fp),
            recall=ratio(tp, tp + fn),
            iou=ratio(tp, tp + fp + fn),
            degenerate=degenerate,
        )

    def __add__(self, other: ClassMetrics) -> ClassMetrics:
        return ClassMetrics.from_counts(
            self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn
        )

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def classification_metrics(pred, truth) -> ClassMetrics:
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise PlumeInputError(f"prediction shape {pred.shape} != truth shape {truth.shape}")
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    tn = pred.size - tp - fp - fn
    return ClassMetrics.from_counts(tp, fp, tn, fn)


def mean_metrics(metrics) -> dict:
    """Unweighted mean of each ratio over a list of ClassMetrics."""
    metrics = list(metrics)
    if not metrics:
        return {name: 0.0 for name in METRIC_NAMES}
    return {name: float(np.mean([getattr(m, name) for m in metrics])) for name in METRIC_NAMES}
