"""OTB-style scoring: success curves, AUC, precision, attribute reports."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BoundingBox, center_error, iou

SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 21)
PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class SuccessCurve:
    thresholds: np.ndarray  # the 21 values {0, 0.05, ..., 1.0}
    success_rate: np.ndarray


@dataclass(frozen=True, eq=False)
class PrecisionCurve:
    thresholds: np.ndarray  # 0..50 px, step 1
    rate: np.ndarray


@dataclass(frozen=True)
class SequenceScore:
    auc: float
    precision: float


@dataclass(frozen=True, eq=False)
class EvalReport:
    per_sequence: dict[str, SequenceScore]
    mean_auc: float
    mean_precision: float
    attribute_auc: dict[str, float]
    attribute_precision: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "per_sequence": {
                k: {"auc": v.auc, "precision": v.precision}
                for k, v in sorted(self.per_sequence.items())
            },
            "mean_auc": self.mean_auc,
            "mean_precision": self.mean_precision,
            "attribute_auc": dict(sorted(self.attribute_auc.items())),
            "attribute_precision": dict(sorted(self.attribute_precision.items())),
        }


def _check_lengths(pred, gt) -> None:
    if len(pred) != len(gt):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(gt)} ground truths")
    if len(pred) == 0:
        raise ValueError("empty box lists")


def success_curve(pred: list[BoundingBox], gt: list[BoundingBox]) -> SuccessCurve:
    """Fraction of frames with IoU strictly above each threshold."""
    _check_lengths(pred, gt)
    ious = np.array([iou(p, g) for p, g in zip(pred, gt)])
    rates = np.array([float(np.mean(ious > thr)) for thr in SUCCESS_THRESHOLDS])
    return SuccessCurve(SUCCESS_THRESHOLDS.copy(), rates)


def auc(curve: SuccessCurve) -> float:
    """Arithmetic mean of the 21 success rates."""
    return float(np.mean(curve.success_rate))


def precision_curve(pred: list[BoundingBox], gt: list[BoundingBox]) -> PrecisionCurve:
    """Fraction of frames with center error <= each pixel threshold."""
    _check_lengths(pred, gt)
    errs = np.array([center_error(p, g) for p, g in zip(pred, gt)])
    rates = np.array([float(np.mean(errs <= thr)) for thr in PRECISION_THRESHOLDS])
    return PrecisionCurve(PRECISION_THRESHOLDS.copy(), rates)


def precision_at(curve: PrecisionCurve, px: int = 20) -> float:
    idx = int(np.searchsorted(curve.thresholds, float(px)))
    if idx >= len(curve.thresholds) or curve.thresholds[idx] != float(px):
        raise ValueError(f"threshold {px} not on the curve")
    return float(curve.rate[idx])


def score_sequence(pred: list[BoundingBox], gt: list[BoundingBox]) -> SequenceScore:
    return SequenceScore(
        auc=auc(success_curve(pred, gt)),
        precision=precision_at(precision_curve(pred, gt), 20),
    )


def attribute_report(
    scores: dict[str, SequenceScore],
    tags: dict[str, tuple[str, ...]],
) -> EvalReport:
    """Aggregate per-sequence scores; attribute means cover exactly the
    sequences carrying each tag (sequence-macro averaging)."""
    if not scores:
        raise ValueError("no per-sequence results")
    aucs = [s.auc for s in scores.values()]
    precisions = [s.precision for s in scores.values()]
    attr_auc: dict[str, float] = {}
    attr_pre: dict[str, float] = {}
    all_tags = sorted({t for ts in tags.values() for t in ts})
    for tag in all_tags:
        members = [seq for seq in scores if tag in tags.get(seq, ())]
        if members:
            attr_auc[tag] = float(np.mean([scores[s].auc for s in members]))
            attr_pre[tag] = float(np.mean([scores[s].precision for s in members]))
    return EvalReport(
        per_sequence=dict(scores),
        mean_auc=float(np.mean(aucs)),
        mean_precision=float(np.mean(precisions)),
        attribute_auc=attr_auc,
        attribute_precision=attr_pre,
    )


def format_report_table(report: EvalReport) -> str:
    """Plain-text table of the report."""
    lines = [f"{'sequence':<24} {'AUC':>8} {'Pre@20':>8}"]
    for seq in sorted(report.per_sequence):
        s = report.per_sequence[seq]
        lines.append(f"{seq:<24} {s.auc:>8.4f} {s.precision:>8.4f}")
    lines.append(f"{'mean':<24} {report.mean_auc:>8.4f} {report.mean_precision:>8.4f}")
    if report.attribute_auc:
        lines.append("")
        lines.append(f"{'attribute':<24} {'AUC':>8} {'Pre@20':>8}")
        for tag in sorted(report.attribute_auc):
            lines.append(
                f"{tag:<24} {report.attribute_auc[tag]:>8.4f} "
                f"{report.attribute_precision[tag]:>8.4f}"
            )
    return "\n".join(lines)
