"""Score a detector with mean average precision over a synthetic scenario.

Compares a perfect oracle detector against jittered and dropout-prone
variants of itself.
"""

import geomcd as g
from geomcd.detect import LabeledBox, OracleDetector, evaluate_map

frames, truth = g.generate(g.preset("baseline"))
ground_truth = {
    t: [LabeledBox(ft.labels[oid], ft.boxes[oid]) for oid in ft.boxes]
    for t, ft in enumerate(truth.frames)
}

for name, det in [
    ("exact", OracleDetector(truth)),
    ("jitter 2px", OracleDetector(truth, jitter_px=2.0, seed=0)),
    ("jitter 4px + 20% dropout", OracleDetector(truth, jitter_px=4.0, dropout=0.2, seed=0)),
]:
    preds = {t: det.detect(frames[t]) for t in range(len(frames))}
    report = evaluate_map(preds, ground_truth, iou_threshold=0.5)
    print(f"{name}: mAP = {report.mAP:.3f}")
    for cls, curve in report.pr_curves.items():
        head = ", ".join(f"(r={r:.2f}, p={p:.2f})" for r, p in curve[:3])
        print(f"  class {cls!r}: AP = {report.per_class_ap[cls]:.3f}, PR curve starts {head}")
