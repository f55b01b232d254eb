"""Append-only, replayable change-event log.

File format (schema_version 1): one record per line, "LEN CRC JSON\\n" where
LEN is the decimal byte length of the JSON payload and CRC its CRC32 as eight
hex digits. The first record is the header (scene id, creation time, initial
scene state); every later record is one change event. The framing makes
mid-record truncation detectable while keeping the log human-inspectable.

Evidence frames are PNG files in a sibling directory, named by the SHA-256 of
their bytes; the log stores only the hash.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass
from pathlib import Path

from .errors import CorruptLog, IoFailure, OutOfOrderEvent, UnknownObject
from .types import ChangeEvent, SceneState, apply_delta

SCHEMA_VERSION = 1


def _frame_record(payload: dict) -> bytes:
    body = json.dumps(payload, separators=(",", ":")).encode("utf-8")
    crc = zlib.crc32(body) & 0xFFFFFFFF
    return f"{len(body)} {crc:08x} ".encode("ascii") + body + b"\n"


def _parse_records(data: bytes) -> list[dict]:
    """Decode all records; raises CorruptLog on any framing or checksum violation."""
    records = []
    pos = 0
    n = len(data)
    while pos < n:
        sp1 = data.find(b" ", pos)
        if sp1 < 0 or sp1 - pos > 10:
            raise CorruptLog(f"bad length field at byte {pos}")
        try:
            length = int(data[pos:sp1])
        except ValueError as e:
            raise CorruptLog(f"non-numeric length at byte {pos}") from e
        sp2 = sp1 + 9
        if sp2 >= n or data[sp2:sp2 + 1] != b" ":
            raise CorruptLog(f"bad checksum field at byte {sp1 + 1}")
        crc_hex = data[sp1 + 1:sp2]
        try:
            crc = int(crc_hex, 16)
        except ValueError as e:
            raise CorruptLog(f"non-hex checksum at byte {sp1 + 1}") from e
        body_start = sp2 + 1
        body_end = body_start + length
        if body_end + 1 > n:
            raise CorruptLog(f"truncated record at byte {pos}")
        body = data[body_start:body_end]
        if data[body_end:body_end + 1] != b"\n":
            raise CorruptLog(f"missing record terminator at byte {body_end}")
        if (zlib.crc32(body) & 0xFFFFFFFF) != crc:
            raise CorruptLog(f"checksum mismatch at byte {pos}")
        try:
            records.append(json.loads(body))
        except json.JSONDecodeError as e:
            raise CorruptLog(f"unparsable payload at byte {pos}") from e
        pos = body_end + 1
    return records


@dataclass(frozen=True)
class LogHeader:
    schema_version: int
    scene_id: str
    created_at: str
    initial_state: SceneState


class EventLog:
    """Single-writer append log; reads always see a consistent record prefix."""

    def __init__(self, path: Path | str, evidence_dir: Path | str | None = None):
        self.path = Path(path)
        self.evidence_dir = (
            Path(evidence_dir) if evidence_dir is not None
            else self.path.parent / "evidence"
        )

    # -- writing ------------------------------------------------------------

    def create(self, scene_id: str, created_at: str, initial_state: SceneState) -> None:
        if self.path.exists():
            raise IoFailure(f"log {self.path} already exists")
        self.evidence_dir.mkdir(parents=True, exist_ok=True)
        header = {
            "schema_version": SCHEMA_VERSION,
            "scene_id": scene_id,
            "created_at": created_at,
            "initial_state": initial_state.as_dict(),
        }
        with open(self.path, "wb") as fh:
            fh.write(_frame_record(header))
            fh.flush()

    def store_evidence(self, data: bytes) -> str:
        """Content-address the bytes; returns the SHA-256 hex name."""
        digest = hashlib.sha256(data).hexdigest()
        target = self.evidence_dir / f"{digest}.png"
        if not target.exists():
            target.write_bytes(data)
        return digest

    def append_event(self, event: ChangeEvent) -> None:
        """Durable append: the record is flushed before this returns."""
        header, events = self.read()
        if events and event.frame_index < events[-1].frame_index:
            raise OutOfOrderEvent(
                f"frame_index {event.frame_index} < last {events[-1].frame_index}"
            )
        if event.object_id not in header.initial_state.objects:
            raise UnknownObject(f"object {event.object_id!r} not in initial state")
        try:
            with open(self.path, "ab") as fh:
                fh.write(_frame_record(event.as_dict()))
                fh.flush()
        except OSError as e:
            raise IoFailure(f"append to {self.path} failed: {e}") from e

    # -- reading ------------------------------------------------------------

    def read(self) -> tuple[LogHeader, list[ChangeEvent]]:
        try:
            data = self.path.read_bytes()
        except OSError as e:
            raise IoFailure(f"cannot read log {self.path}: {e}") from e
        records = _parse_records(data)
        if not records:
            raise CorruptLog("log has no header record")
        head = records[0]
        try:
            if head["schema_version"] != SCHEMA_VERSION:
                raise CorruptLog(f"unsupported schema_version {head['schema_version']}")
            header = LogHeader(
                schema_version=head["schema_version"],
                scene_id=head["scene_id"],
                created_at=head["created_at"],
                initial_state=SceneState.from_dict(head["initial_state"]),
            )
            events = [ChangeEvent.from_dict(r) for r in records[1:]]
        except (KeyError, TypeError, ValueError) as e:
            raise CorruptLog(f"schema violation: {e}") from e
        last = None
        for ev in events:
            if last is not None and ev.frame_index < last:
                raise CorruptLog("events out of frame order")
            last = ev.frame_index
        return header, events

    def verify_evidence(self, event: ChangeEvent) -> bytes:
        """Load and hash-check the archived frame for an event."""
        target = self.evidence_dir / f"{event.evidence}.png"
        try:
            data = target.read_bytes()
        except OSError as e:
            raise CorruptLog(f"missing evidence {event.evidence}") from e
        if hashlib.sha256(data).hexdigest() != event.evidence:
            raise CorruptLog(f"evidence {event.evidence} fails its hash")
        return data

    def replay(self, as_of_frame: int) -> SceneState:
        """Initial state plus every delta with frame_index <= as_of_frame."""
        header, events = self.read()
        state = header.initial_state
        for ev in events:
            if ev.frame_index > as_of_frame:
                break
            if ev.object_id not in state.objects:
                raise CorruptLog(f"event references unknown object {ev.object_id!r}")
            pose = apply_delta(state.objects[ev.object_id].pose, ev.delta)
            state = state.with_pose(ev.object_id, pose, as_of_frame)
        return SceneState(objects=state.objects, as_of_frame=as_of_frame)


@dataclass(frozen=True)
class StorageFootprint:
    event_bytes: int
    evidence_bytes: int
    hypothetical_full_archive_bytes: int


def storage_footprint(
    log: EventLog, total_stream_frames: int, frame_width: int, frame_height: int
) -> StorageFootprint:
    """Measured log + evidence size versus storing every 8-bit frame raw."""
    header, events = log.read()
    evidence_bytes = 0
    for digest in {ev.evidence for ev in events}:
        target = log.evidence_dir / f"{digest}.png"
        if target.exists():
            evidence_bytes += target.stat().st_size
    return StorageFootprint(
        event_bytes=log.path.stat().st_size,
        evidence_bytes=evidence_bytes,
        hypothetical_full_archive_bytes=frame_width * frame_height * total_stream_frames,
    )
