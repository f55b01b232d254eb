"""Geometric change detection for digital twins.

Motion detection by dynamic mode decomposition, object localization and pose
interfaces, and an append-only change log from which the 3D scene state can be
replayed at any past frame.
"""

from .types import (
    BoundingBox,
    ChangeEvent,
    Detection,
    GrayFrame,
    Pose,
    PoseDelta,
    SceneObject,
    SceneState,
    apply_delta,
    iou,
    normalize_pose,
)
from .dmd import (
    DmdModel,
    ModePartition,
    RankPolicy,
    SnapshotMatrices,
    background_frame,
    build_snapshots,
    classify_modes,
    compute_dmd,
    foreground_mask,
    foreground_residual,
    reconstruct,
)
from .pose import (
    AngleAxis,
    AngleBinCode,
    decode_angle,
    encode_angle,
    percentage_error,
    pose_delta,
    pose_to_rotation,
    rotation_to_pose,
)
from .mesh import TriangleMesh, parse_obj, parse_stl, transform_mesh, write_obj
from .pipeline import MotionInterval, PipelineConfig, preprocess, segment_stream, window_motion_score
from .detect import EvalReport, LabeledBox, OracleDetector, crop, evaluate_map
from .estimators import OraclePoseEstimator
from .changelog import EventLog, StorageFootprint, storage_footprint
from .harness import GroundTruth, ScenarioConfig, generate, preset

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
