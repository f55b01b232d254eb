"""Talk to an external model process over the line-delimited JSON protocol.

Launches the bundled Node adapter (if built) with a fixture backend and runs
a detect/estimate-pose exchange through the same client the pipeline uses.
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from geomcd.types import GrayFrame
from geomcd.wire import AdapterClient, AdapterDetector, AdapterPoseEstimator

adapter = Path(__file__).resolve().parent.parent / "adapter" / "dist" / "main.js"
if not adapter.exists():
    sys.exit("adapter not built; run `npm install && npm run build` in adapter/ first")

fixture = {
    "backend": "fixture",
    "detections": [[{"label": "block", "bbox": [10, 10, 24, 24], "confidence": 0.87}]],
    "poses": [{"azimuth": 395.0, "elevation": 20.0, "inplane": 15.0}],
}

with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "fixture.json"
    cfg.write_text(json.dumps(fixture))
    with AdapterClient(["node", str(adapter), str(cfg)]) as client:
        print(f"adapter capabilities: {client.capabilities}")

        frame = GrayFrame.from_array(np.zeros((32, 32)))
        detections = AdapterDetector(client).detect(frame)
        print(f"detections: {detections}")

        pose = AdapterPoseEstimator(client).estimate(np.zeros((14, 14)), "cube.obj")
        print(f"pose (azimuth wrapped from 395 into canonical range): {pose}")
