"""Streaming motion front end: preprocessing, windowed DMD scoring, interval segmentation.

Frames are gray-scaled and downscaled before the linear algebra; the archived
last frame of each motion episode keeps full resolution because detection and
pose estimation need the detail.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import dmd
from .errors import EmptyImage, InvalidConfig, TooFewFrames
from .types import GrayFrame

LUMA = np.array([0.299, 0.587, 0.114])

# Frame-mean jump treated as a global lighting step rather than motion.
LIGHTING_JUMP = 0.2


@dataclass(frozen=True)
class PipelineConfig:
    rescale_factor: float = 0.25
    window_len: int = 30
    window_stride: int = 15
    motion_pixel_fraction: float = 0.005
    mask_threshold: float = 0.1
    quiescent_windows_to_close: int = 2
    rank_energy: float = dmd.DEFAULT_ENERGY
    mode_epsilon: float = dmd.DEFAULT_EPSILON
    lighting_guard: bool = False

    def __post_init__(self):
        if not 0.0 < self.rescale_factor <= 1.0:
            raise InvalidConfig("rescale_factor must lie in (0, 1]")
        if self.window_len < 2:
            raise InvalidConfig("window_len must be >= 2")
        if not 1 <= self.window_stride <= self.window_len:
            raise InvalidConfig("window_stride must lie in [1, window_len]")
        if not 0.0 < self.motion_pixel_fraction < 1.0:
            raise InvalidConfig("motion_pixel_fraction must lie in (0, 1)")
        if not 0.0 < self.mask_threshold < 1.0:
            raise InvalidConfig("mask_threshold must lie in (0, 1)")
        if self.quiescent_windows_to_close < 1:
            raise InvalidConfig("quiescent_windows_to_close must be >= 1")


@dataclass(frozen=True)
class MotionInterval:
    """One motion episode; only its last frame is retained."""

    t1: int
    t2: int
    last_frame: GrayFrame
    score_trace: tuple[tuple[int, float], ...] = ()
    lighting_suspect: bool = False


def _box_weights(n_in: int, n_out: int) -> np.ndarray:
    """Area-average resampling weights: W[o, i] = overlap of output cell o with input cell i."""
    scale = n_in / n_out
    W = np.zeros((n_out, n_in))
    for o in range(n_out):
        lo, hi = o * scale, (o + 1) * scale
        i0, i1 = int(np.floor(lo)), int(np.ceil(hi))
        for i in range(i0, min(i1, n_in)):
            W[o, i] = max(0.0, min(hi, i + 1) - max(lo, i)) / scale
    return W


def rescale_gray(frame: GrayFrame, factor: float) -> GrayFrame:
    """Downscale by box (area-average) resampling; output dims floor(dim*factor), min 1."""
    if factor == 1.0:
        return frame
    out_w = max(1, int(np.floor(frame.width * factor)))
    out_h = max(1, int(np.floor(frame.height * factor)))
    if frame.height % out_h == 0 and frame.width % out_w == 0:
        bh, bw = frame.height // out_h, frame.width // out_w
        small = frame.pixels.reshape(out_h, bh, out_w, bw).mean(axis=(1, 3))
    else:
        Wr = _box_weights(frame.height, out_h)
        Wc = _box_weights(frame.width, out_w)
        small = Wr @ frame.pixels @ Wc.T
    return GrayFrame.from_array(np.clip(small, 0.0, 1.0), index=frame.index)


def preprocess(rgb_frame: np.ndarray, rescale_factor: float = 0.25, index: int = 0) -> GrayFrame:
    """Convert a (H, W, 3) or (H, W) image with channels in [0, 1] to a rescaled gray frame."""
    img = np.asarray(rgb_frame, dtype=np.float64)
    if img.size == 0:
        raise EmptyImage("cannot preprocess an empty image")
    if img.ndim == 3:
        gray = img @ LUMA
    elif img.ndim == 2:
        gray = img
    else:
        raise EmptyImage(f"expected a 2D or 3D image, got shape {img.shape}")
    frame = GrayFrame.from_array(np.clip(gray, 0.0, 1.0), index=index)
    return rescale_gray(frame, rescale_factor)


def _window_residual(window: list[GrayFrame], cfg: PipelineConfig) -> np.ndarray:
    """Signed residual of the window's last frame against the DMD background."""
    if len(window) < 2:
        raise TooFewFrames("a scoring window needs at least 2 frames")
    snap = dmd.build_snapshots(window)
    model = dmd.compute_dmd(snap, dmd.RankPolicy(energy=cfg.rank_energy))
    partition = dmd.classify_modes(model, epsilon=cfg.mode_epsilon)
    last = window[-1]
    background = dmd.background_frame(
        model, partition, k=len(window) - 1, width=last.width, height=last.height
    )
    return dmd.foreground_residual(last, background)


def window_motion_score(window: list[GrayFrame], cfg: PipelineConfig) -> float:
    """Fraction of foreground-mask pixels set on the window's last frame."""
    residual = _window_residual(window, cfg)
    mask = dmd.foreground_mask(residual, cfg.mask_threshold)
    return float(mask.mean())


def _lighting_suspect(window: list[GrayFrame], residual: np.ndarray, cfg: PipelineConfig) -> bool:
    means = np.array([f.pixels.mean() for f in window])
    jump = np.abs(np.diff(means)).max(initial=0.0)
    return jump > LIGHTING_JUMP and float(residual.std()) < cfg.mask_threshold


def segment_stream(frames, cfg: PipelineConfig | None = None) -> list[MotionInterval]:
    """Slide DMD windows over the stream and emit one interval per motion episode.

    Motion opens when a window's score reaches motion_pixel_fraction and closes
    after quiescent_windows_to_close consecutive quiet windows. Only the
    full-resolution frame at each episode's last motion window is retained.
    """
    cfg = cfg or PipelineConfig()
    window: deque[GrayFrame] = deque(maxlen=cfg.window_len)
    intervals: list[MotionInterval] = []

    open_ = False
    t1 = t2 = -1
    last_full: GrayFrame | None = None
    quiet = 0
    trace: list[tuple[int, float]] = []
    suspect = False
    count = 0

    def close():
        nonlocal open_, quiet, trace, suspect, last_full
        intervals.append(
            MotionInterval(
                t1=t1, t2=t2, last_frame=last_full, score_trace=tuple(trace),
                lighting_suspect=suspect,
            )
        )
        open_, quiet, trace, suspect, last_full = False, 0, [], False, None

    for full in frames:
        small = rescale_gray(full, cfg.rescale_factor)
        window.append(small)
        count += 1
        if len(window) < cfg.window_len and count < cfg.window_len:
            continue
        if (count - cfg.window_len) % cfg.window_stride != 0:
            continue
        win = list(window)
        residual = _window_residual(win, cfg)
        score = float(dmd.foreground_mask(residual, cfg.mask_threshold).mean())
        end_idx = full.index
        moving = score >= cfg.motion_pixel_fraction
        if moving and cfg.lighting_guard and _lighting_suspect(win, residual, cfg):
            moving = False
            suspect = True
        if moving:
            if not open_:
                open_ = True
                t1 = end_idx
            t2 = end_idx
            last_full = full
            quiet = 0
            trace.append((end_idx, score))
        elif open_:
            quiet += 1
            trace.append((end_idx, score))
            if quiet >= cfg.quiescent_windows_to_close:
                close()
    if open_:
        close()
    return intervals
