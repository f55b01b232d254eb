"""Standard dynamic mode decomposition on frame snapshots.

Builds the paired snapshot matrices, computes a truncated-SVD reduced operator,
its eigendecomposition, spatial modes and initial amplitudes, and classifies
modes into near-stationary background and moving foreground by eigenvalue
modulus and oscillation frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateData,
    DimensionMismatch,
    IndexOutOfRange,
    RankTooLarge,
    TooFewFrames,
)
from .types import GrayFrame

# Retained singular values below this fraction of the largest are numerical
# noise; inverting them would explode.
SINGULAR_VALUE_FLOOR = 1e-12

DEFAULT_ENERGY = 0.999
DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class SnapshotMatrices:
    """Paired data matrices: columns of Xp are the columns of X shifted one step ahead."""

    n: int
    m: int
    X: np.ndarray   # n x (m-1)
    Xp: np.ndarray  # n x (m-1)


@dataclass(frozen=True)
class DmdModel:
    """Decomposition output: rank, modes, eigenvalues, amplitudes.

    The truncated SVD factors are retained so tests can check orthonormality;
    the algebra itself only ever consumes them internally.
    """

    r: int
    modes: np.ndarray           # n x r, complex
    eigenvalues: np.ndarray     # length r, complex
    amplitudes: np.ndarray      # length r, complex
    reduced_operator: np.ndarray  # r x r, complex
    svd_u: np.ndarray           # n x r
    svd_s: np.ndarray           # length r
    svd_v: np.ndarray           # (m-1) x r
    x0: np.ndarray              # first snapshot, length n

    @property
    def n(self) -> int:
        return self.modes.shape[0]


@dataclass(frozen=True)
class ModePartition:
    """Background/foreground split of the mode indices {0..r-1}."""

    background_indices: frozenset[int]
    foreground_indices: frozenset[int]


@dataclass(frozen=True)
class RankPolicy:
    """Truncation rule: a fixed rank, or the smallest rank reaching an energy level.

    Energy is cumulative squared singular values as a fraction of the total.
    """

    fixed: int | None = None
    energy: float = DEFAULT_ENERGY

    def __post_init__(self):
        if self.fixed is not None and self.fixed < 1:
            raise ValueError("fixed rank must be >= 1")
        if not 0.0 < self.energy <= 1.0:
            raise ValueError("energy threshold must lie in (0, 1]")


def build_snapshots(frames: Sequence[GrayFrame]) -> SnapshotMatrices:
    """Flatten an ordered frame sequence into the paired snapshot matrices."""
    if len(frames) < 2:
        raise TooFewFrames(f"need at least 2 frames, got {len(frames)}")
    w, h = frames[0].width, frames[0].height
    for f in frames[1:]:
        if f.width != w or f.height != h:
            raise DimensionMismatch(
                f"frame {f.index} is {f.width}x{f.height}, expected {w}x{h}"
            )
    data = np.column_stack([f.flatten() for f in frames])
    return SnapshotMatrices(n=w * h, m=len(frames), X=data[:, :-1], Xp=data[:, 1:])


def _truncation_rank(s: np.ndarray, policy: RankPolicy, max_rank: int) -> int:
    if s[0] <= 0.0:
        raise DegenerateData("all singular values are zero")
    if policy.fixed is not None:
        r = policy.fixed
        if r > max_rank:
            raise RankTooLarge(f"rank {r} exceeds min(n, m-1) = {max_rank}")
        if s[r - 1] < SINGULAR_VALUE_FLOOR * s[0]:
            raise DegenerateData(
                f"singular value {r - 1} is below {SINGULAR_VALUE_FLOOR} of the largest"
            )
        return r
    energy = np.cumsum(s**2) / np.sum(s**2)
    r = int(np.searchsorted(energy, policy.energy - 1e-14)) + 1
    r = min(r, max_rank)
    # Drop numerically-zero tail the energy rule may still have caught.
    while r > 1 and s[r - 1] < SINGULAR_VALUE_FLOOR * s[0]:
        r -= 1
    return r


def compute_dmd(snap: SnapshotMatrices, policy: RankPolicy | None = None) -> DmdModel:
    """Run standard DMD on snapshot matrices.

    Thin SVD of X, truncation per the rank policy, reduced operator
    ``U* Xp V / s``, its eigendecomposition, modes ``Xp V / s W``, and
    amplitudes as the least-squares solution of ``modes @ b = x0``.
    """
    policy = policy or RankPolicy()
    U, s, Vh = np.linalg.svd(snap.X, full_matrices=False)
    max_rank = min(snap.n, snap.m - 1)
    r = _truncation_rank(s, policy, max_rank)

    Ur = U[:, :r]
    sr = s[:r]
    Vr = Vh[:r].conj().T
    atilde = Ur.conj().T @ snap.Xp @ (Vr / sr)
    eigvals, W = np.linalg.eig(atilde)
    modes = snap.Xp @ (Vr / sr) @ W
    x0 = snap.X[:, 0]
    amplitudes, *_ = np.linalg.lstsq(modes, x0.astype(complex), rcond=None)
    return DmdModel(
        r=r,
        modes=modes,
        eigenvalues=eigvals,
        amplitudes=amplitudes,
        reduced_operator=atilde,
        svd_u=Ur,
        svd_s=sr,
        svd_v=Vr,
        x0=x0,
    )


def _log_eigenvalue(lam: complex) -> complex:
    # |lambda| = 0 has infinitely fast decay; map it to a huge finite log.
    if abs(lam) == 0.0:
        return complex(-1e30, 0.0)
    return complex(np.log(lam))


def classify_modes(model: DmdModel, epsilon: float = DEFAULT_EPSILON) -> ModePartition:
    """Split modes into near-stationary background and moving foreground.

    Background modes have eigenvalue modulus within ``epsilon`` of 1 and
    oscillation frequency |Im(ln lambda)| at most ``epsilon``. If no mode
    qualifies, the single mode minimizing |ln lambda| is taken as background.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    lams = model.eigenvalues
    background = {
        j
        for j, lam in enumerate(lams)
        if abs(abs(lam) - 1.0) <= epsilon and abs(_log_eigenvalue(lam).imag) <= epsilon
    }
    if not background:
        background = {int(np.argmin([abs(_log_eigenvalue(lam)) for lam in lams]))}
    foreground = set(range(model.r)) - background
    return ModePartition(
        background_indices=frozenset(background), foreground_indices=frozenset(foreground)
    )


def reconstruct(
    model: DmdModel, k: int, subset: Iterable[int] | None = None
) -> np.ndarray:
    """Predicted real state at step ``k`` from a subset of modes (default: all).

    Returns Re(sum_j modes_j * lambda_j^k * b_j); the data is real, so complex
    modes cancel in conjugate pairs.
    """
    if k < 0:
        raise IndexOutOfRange(f"step index {k} must be >= 0")
    if subset is None:
        idx = np.arange(model.r)
    else:
        idx = np.fromiter(sorted(set(subset)), dtype=int, count=-1)
        if idx.size and (idx.min() < 0 or idx.max() >= model.r):
            raise IndexOutOfRange(f"mode indices {idx.tolist()} outside 0..{model.r - 1}")
        if idx.size == 0:
            return np.zeros(model.n)
    lam_k = model.eigenvalues[idx] ** k
    return np.real(model.modes[:, idx] @ (lam_k * model.amplitudes[idx]))


def reconstruct_complex(model: DmdModel, k: int) -> np.ndarray:
    """Full-mode prediction without the real-part projection (for tests)."""
    lam_k = model.eigenvalues**k
    return model.modes @ (lam_k * model.amplitudes)


def background_frame(
    model: DmdModel, partition: ModePartition, k: int, width: int, height: int
) -> GrayFrame:
    """Reconstruct the background modes at step ``k`` as a frame, clamped to [0, 1]."""
    if width * height != model.n:
        raise DimensionMismatch(f"{width}x{height} != state dimension {model.n}")
    vec = reconstruct(model, k, subset=partition.background_indices)
    pixels = np.clip(vec.reshape(height, width), 0.0, 1.0)
    return GrayFrame(width=width, height=height, pixels=pixels, index=k)


def foreground_residual(frame: GrayFrame, background: GrayFrame) -> np.ndarray:
    """Signed residual frame minus background, flattened row-major."""
    if (frame.width, frame.height) != (background.width, background.height):
        raise DimensionMismatch("frame and background dimensions differ")
    return frame.flatten() - background.flatten()


def foreground_mask(residual: np.ndarray, threshold: float) -> np.ndarray:
    """Binary mask: pixels whose absolute residual reaches the threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return np.abs(residual) >= threshold
