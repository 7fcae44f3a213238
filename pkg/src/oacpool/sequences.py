"""Frame-level feature sequences and the preprocessing steps applied before pooling.

A sequence is a T x K matrix: row t is the K-dimensional feature vector of
frame t.  Everything here is an immutable value; operations are pure
functions and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError

# Vectors with L2 norm at or below this are left unnormalized.
ZERO_NORM_EPS = 1e-12


def _validated_frames(values) -> np.ndarray:
    frames = np.array(values, dtype=np.float64, order="C")
    if frames.ndim != 2:
        raise ValueError(f"frames must be a 2-D (T x K) array, got shape {frames.shape}")
    if frames.shape[0] < 1 or frames.shape[1] < 1:
        raise ValueError(f"frames must have at least one frame and one feature, got shape {frames.shape}")
    if not np.isfinite(frames).all():
        raise ValueError("frames contain NaN or infinite values")
    frames.flags.writeable = False
    return frames


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """A length-T sequence of K-dimensional frame feature vectors.

    The array is copied to double precision on construction and frozen
    read-only, so a sequence can be shared freely between threads.
    """

    frames: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frames", _validated_frames(self.frames))

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_features(self) -> int:
        return self.frames.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureSequence):
            return NotImplemented
        return self.frames.shape == other.frames.shape and bool(
            np.array_equal(self.frames, other.frames)
        )

    def __repr__(self) -> str:
        return f"FeatureSequence(T={self.num_frames}, K={self.num_features})"


@dataclass(frozen=True)
class LabeledSequence:
    """A feature sequence together with its class index."""

    sequence: FeatureSequence
    label: int

    def __post_init__(self):
        if isinstance(self.label, bool) or not isinstance(self.label, (int, np.integer)):
            raise TypeError(f"label must be an integer, got {type(self.label).__name__}")
        if self.label < 0:
            raise ValueError(f"label must be nonnegative, got {self.label}")
        object.__setattr__(self, "label", int(self.label))


def sample_frames(seq: FeatureSequence, rate: int) -> FeatureSequence:
    """Keep frames 0, rate, 2*rate, ...; the result has ceil(T / rate) frames."""
    if rate < 1:
        raise ValueError(f"sampling rate must be >= 1, got {rate}")
    return FeatureSequence(seq.frames[::rate])


def l2_normalize_block(v) -> np.ndarray:
    """Scale a vector to unit L2 norm; vectors with norm <= ZERO_NORM_EPS pass through."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("vector contains NaN or infinite values")
    norm = float(np.sqrt(np.dot(v, v)))
    if norm <= ZERO_NORM_EPS:
        return v.copy()
    return v / norm


def l2_normalize_frames(seq: FeatureSequence) -> FeatureSequence:
    """Apply l2_normalize_block to every frame of a sequence."""
    rows = [l2_normalize_block(frame) for frame in seq.frames]
    return FeatureSequence(np.stack(rows))


def concat_frame_features(a: FeatureSequence, b: FeatureSequence) -> FeatureSequence:
    """Concatenate two sequences frame-wise: frame t becomes [a_t ; b_t].

    Callers are expected to normalize each block beforehand when combining
    heterogeneous feature sources.
    """
    if a.num_frames != b.num_frames:
        raise ShapeMismatchError(
            f"frame counts differ: {a.num_frames} vs {b.num_frames}"
        )
    return FeatureSequence(np.hstack([a.frames, b.frames]))


def replicate_pad(seq: FeatureSequence, min_frames: int) -> FeatureSequence:
    """Extend a sequence to at least min_frames by repeating its last frame."""
    if min_frames < 1:
        raise ValueError(f"min_frames must be >= 1, got {min_frames}")
    if seq.num_frames >= min_frames:
        return seq
    pad = np.tile(seq.frames[-1], (min_frames - seq.num_frames, 1))
    return FeatureSequence(np.vstack([seq.frames, pad]))
