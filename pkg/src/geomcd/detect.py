"""Object-detection interface, ground-truth oracle, cropping, and mAP evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import BoxOutOfFrame
from .harness import GroundTruth
from .types import BoundingBox, Detection, GrayFrame, iou


class DetectorPort(Protocol):
    """Behavioral interface every detector backend satisfies."""

    def detect(self, frame: GrayFrame) -> list[Detection]: ...


def crop(frame: GrayFrame, bbox: BoundingBox) -> np.ndarray:
    """The exact pixel sub-rectangle [x_min, x_max) x [y_min, y_max)."""
    if not bbox.within(frame.width, frame.height):
        raise BoxOutOfFrame(f"{bbox} exceeds frame {frame.width}x{frame.height}")
    x0, y0 = int(bbox.x_min), int(bbox.y_min)
    x1, y1 = int(np.ceil(bbox.x_max)), int(np.ceil(bbox.y_max))
    return frame.pixels[y0:y1, x0:x1].copy()


@dataclass
class OracleDetector:
    """Reads harness ground truth; optional box jitter and dropout for robustness tests."""

    truth: GroundTruth
    jitter_px: float = 0.0
    dropout: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)

    def detect(self, frame: GrayFrame) -> list[Detection]:
        ft = self.truth.frames[frame.index]
        out: list[Detection] = []
        for oid, box in ft.boxes.items():
            if self.dropout > 0.0 and self._rng.random() < self.dropout:
                continue
            x0, y0, x1, y1 = box.as_list()
            if self.jitter_px > 0.0:
                dx0, dy0, dx1, dy1 = self._rng.normal(0.0, self.jitter_px, size=4)
                x0 = min(max(x0 + dx0, 0.0), frame.width - 1.0)
                y0 = min(max(y0 + dy0, 0.0), frame.height - 1.0)
                x1 = min(max(x1 + dx1, x0 + 1.0), float(frame.width))
                y1 = min(max(y1 + dy1, y0 + 1.0), float(frame.height))
            out.append(
                Detection(
                    class_label=ft.labels[oid],
                    bbox=BoundingBox(x0, y0, x1, y1),
                    confidence=1.0 if self.jitter_px == 0.0 else float(self._rng.uniform(0.7, 1.0)),
                )
            )
        return out


@dataclass(frozen=True)
class LabeledBox:
    """A ground-truth box for evaluation."""

    class_label: str
    bbox: BoundingBox


@dataclass(frozen=True)
class EvalReport:
    per_class_ap: dict[str, float]
    mAP: float
    pr_curves: dict[str, list[tuple[float, float]]]  # class -> [(recall, precision)]
    undefined_classes: tuple[str, ...] = ()


def _average_precision(
    matches: list[tuple[float, bool]], n_gt: int
) -> tuple[float, list[tuple[float, float]]]:
    """AP by all-points interpolation from (confidence, is_tp) pairs."""
    matches = sorted(matches, key=lambda t: -t[0])
    tp = np.cumsum([1.0 if m else 0.0 for _, m in matches])
    fp = np.cumsum([0.0 if m else 1.0 for _, m in matches])
    recall = tp / n_gt
    precision = tp / np.maximum(tp + fp, 1e-12)
    curve = list(zip(recall.tolist(), precision.tolist()))
    # Monotone envelope from the right, then sum rectangle areas.
    r = np.concatenate([[0.0], recall, [recall[-1] if len(recall) else 0.0]])
    p = np.concatenate([[0.0], precision, [0.0]])
    for i in range(len(p) - 2, -1, -1):
        p[i] = max(p[i], p[i + 1])
    ap = 0.0
    for i in range(1, len(r)):
        ap += (r[i] - r[i - 1]) * p[i]
    return float(ap), curve


def evaluate_map(
    predictions: dict[int, list[Detection]],
    ground_truth: dict[int, list[LabeledBox]],
    iou_threshold: float = 0.5,
) -> EvalReport:
    """Greedy confidence-ordered matching per class, then all-points AP.

    Classes present in predictions but absent from ground truth have undefined
    AP; they are excluded from the mean and reported separately.
    """
    gt_classes = {b.class_label for boxes in ground_truth.values() for b in boxes}
    pred_classes = {d.class_label for dets in predictions.values() for d in dets}

    per_class_ap: dict[str, float] = {}
    pr_curves: dict[str, list[tuple[float, float]]] = {}
    for cls in sorted(gt_classes):
        gt_by_img = {
            img: [b.bbox for b in boxes if b.class_label == cls]
            for img, boxes in ground_truth.items()
        }
        n_gt = sum(len(v) for v in gt_by_img.values())
        preds = [
            (img, d)
            for img, dets in predictions.items()
            for d in dets
            if d.class_label == cls
        ]
        preds.sort(key=lambda t: -t[1].confidence)
        matched: dict[int, set[int]] = {img: set() for img in ground_truth}
        results: list[tuple[float, bool]] = []
        for img, det in preds:
            candidates = gt_by_img.get(img, [])
            best_iou, best_j = 0.0, -1
            for j, gt_box in enumerate(candidates):
                if j in matched.get(img, set()):
                    continue
                v = iou(det.bbox, gt_box)
                if v > best_iou:
                    best_iou, best_j = v, j
            if best_j >= 0 and best_iou >= iou_threshold:
                matched.setdefault(img, set()).add(best_j)
                results.append((det.confidence, True))
            else:
                results.append((det.confidence, False))
        if not results:
            ap, curve = 0.0, []
        else:
            ap, curve = _average_precision(results, n_gt)
        per_class_ap[cls] = ap
        pr_curves[cls] = curve

    undefined = tuple(sorted(pred_classes - gt_classes))
    m_ap = float(np.mean(list(per_class_ap.values()))) if per_class_ap else 0.0
    return EvalReport(
        per_class_ap=per_class_ap, mAP=m_ap, pr_curves=pr_curves,
        undefined_classes=undefined,
    )
