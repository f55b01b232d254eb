"""Protocol conformance of the subprocess adapter, driven from the client side.

Skipped when the adapter has not been built (`npm run build` in adapter/);
the rest of the suite never depends on it.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from geomcd.errors import ProtocolError
from geomcd.types import GrayFrame
from geomcd.wire import AdapterClient, AdapterDetector, AdapterPoseEstimator

ADAPTER = Path(__file__).resolve().parent.parent / "adapter" / "dist" / "main.js"

pytestmark = pytest.mark.skipif(
    not ADAPTER.exists(), reason="adapter not built (run `npm run build` in adapter/)"
)


def command(config_path=None):
    cmd = ["node", str(ADAPTER)]
    if config_path is not None:
        cmd.append(str(config_path))
    return cmd


def blank_frame():
    return GrayFrame.from_array(np.zeros((8, 8)))


def fixture_config(tmp_path, **kwargs):
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps({"backend": "fixture", **kwargs}))
    return path


class TestHandshake:
    def test_capabilities(self):
        with AdapterClient(command()) as client:
            assert client.capabilities == ("detect", "estimate_pose")

    def test_bad_config_refuses_startup(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"backend": "quantum"}')
        with pytest.raises(ProtocolError):
            AdapterClient(command(bad))


class TestDetect:
    def test_empty_scene(self):
        with AdapterClient(command()) as client:
            assert AdapterDetector(client).detect(blank_frame()) == []

    def test_fixture_detections_parse(self, tmp_path):
        cfg = fixture_config(tmp_path, detections=[
            [{"label": "block", "bbox": [1, 2, 5, 6], "confidence": 0.9}],
        ])
        with AdapterClient(command(cfg)) as client:
            out = AdapterDetector(client).detect(blank_frame())
            assert len(out) == 1
            assert out[0].class_label == "block"
            assert out[0].bbox.as_list() == [1.0, 2.0, 5.0, 6.0]


class TestEstimatePose:
    def test_angles_always_canonical(self, tmp_path):
        cfg = fixture_config(tmp_path, poses=[
            {"azimuth": 370.0, "elevation": 95.0, "inplane": 190.0},
            {"azimuth": -5.0, "elevation": -95.0, "inplane": -200.0},
        ])
        with AdapterClient(command(cfg)) as client:
            estimator = AdapterPoseEstimator(client)
            for _ in range(2):
                pose = estimator.estimate(np.zeros((8, 8)), "cube.obj")
                assert 0.0 <= pose.azimuth < 360.0
                assert -90.0 <= pose.elevation <= 90.0
                assert -180.0 <= pose.inplane < 180.0


class TestRobustness:
    def test_malformed_request_recovery(self):
        with AdapterClient(command()) as client:
            # inject a raw garbage line past the typed client
            client._proc.stdin.write("this is not json\n")
            client._proc.stdin.flush()
            response = json.loads(client._proc.stdout.readline())
            assert "error" in response
            # the session survives and keeps answering
            assert AdapterDetector(client).detect(blank_frame()) == []

    def test_unknown_op_is_error_not_exit(self):
        with AdapterClient(command()) as client:
            with pytest.raises(ProtocolError):
                client.request({"op": "transmogrify"})
            assert client.request({"op": "hello"})["protocol"] == 1

    def test_n_in_n_out_ordering(self, tmp_path):
        n = 20
        cfg = fixture_config(tmp_path, detections=[
            [{"label": f"c{i}", "bbox": [0, 0, 1, 1], "confidence": 0.5}] for i in range(n)
        ])
        with AdapterClient(command(cfg)) as client:
            det = AdapterDetector(client)
            labels = [det.detect(blank_frame())[0].class_label for _ in range(n)]
            assert labels == [f"c{i}" for i in range(n)]
