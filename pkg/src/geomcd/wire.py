"""Newline-delimited JSON protocol to an external model subprocess.

One request line in, one response line out, over the adapter's stdin/stdout.
The first exchange is a handshake: {"op":"hello"} ->
{"protocol":1,"capabilities":[...]}. A response of {"error": ...} maps to
ProtocolError. Requests are serialized: one in flight at a time.
"""

from __future__ import annotations

import base64
import json
import subprocess
import threading

from .errors import ProtocolError
from .frameio import png_bytes
from .types import BoundingBox, Detection, GrayFrame, Pose, normalize_pose

PROTOCOL_VERSION = 1


def image_payload(frame: GrayFrame) -> dict:
    return {"format": "png-base64", "data": base64.b64encode(png_bytes(frame)).decode("ascii")}


class AdapterClient:
    """Owns the adapter subprocess and the request/response framing."""

    def __init__(self, command: list[str]):
        try:
            self._proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise ProtocolError(f"cannot launch adapter {command!r}: {e}") from e
        self._lock = threading.Lock()
        hello = self.request({"op": "hello"})
        if hello.get("protocol") != PROTOCOL_VERSION:
            raise ProtocolError(f"adapter spoke protocol {hello.get('protocol')!r}, need {PROTOCOL_VERSION}")
        self.capabilities = tuple(hello.get("capabilities", ()))

    def request(self, payload: dict) -> dict:
        with self._lock:
            if self._proc.poll() is not None:
                raise ProtocolError("adapter process has exited")
            try:
                self._proc.stdin.write(json.dumps(payload) + "\n")
                self._proc.stdin.flush()
                line = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as e:
                raise ProtocolError(f"adapter pipe failed: {e}") from e
        if not line:
            raise ProtocolError("adapter closed its stdout mid-conversation")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as e:
            raise ProtocolError(f"adapter emitted malformed JSON: {line!r}") from e
        if not isinstance(response, dict):
            raise ProtocolError(f"adapter response is not an object: {line!r}")
        if "error" in response:
            raise ProtocolError(f"adapter error: {response['error']}")
        return response

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class AdapterDetector:
    """DetectorPort implementation speaking the wire protocol."""

    def __init__(self, client: AdapterClient):
        self._client = client

    def detect(self, frame: GrayFrame) -> list[Detection]:
        response = self._client.request({"op": "detect", "image": image_payload(frame)})
        try:
            return [
                Detection(
                    class_label=d["label"],
                    bbox=BoundingBox(*[float(v) for v in d["bbox"]]),
                    confidence=float(d["confidence"]),
                )
                for d in response["detections"]
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise ProtocolError(f"bad detect response: {response!r}") from e


class AdapterPoseEstimator:
    """PoseEstimatorPort implementation speaking the wire protocol."""

    def __init__(self, client: AdapterClient):
        self._client = client

    def estimate(self, crop_pixels, mesh_ref: str, *, frame_index: int | None = None,
                 object_id: str | None = None) -> Pose:
        frame = GrayFrame.from_array(crop_pixels)
        response = self._client.request(
            {"op": "estimate_pose", "image": image_payload(frame), "mesh_ref": mesh_ref}
        )
        try:
            return normalize_pose(
                float(response["azimuth"]),
                float(response["elevation"]),
                float(response["inplane"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ProtocolError(f"bad estimate_pose response: {response!r}") from e
