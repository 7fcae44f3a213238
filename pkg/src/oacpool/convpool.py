"""Per-dimension 1D convolutional filter banks over the temporal axis.

Each feature dimension gets its own bank of n_filters length-l filters.
The bank slides along that dimension's 1D signal, a ReLU is applied, and
the response sequence is aggregated with temporal pyramid pooling.  This
keeps the parameter count at l*K*n + K*n instead of the l*K*n + n of a
single joint convolution over all K dimensions with n >> n_filters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeMismatchError, TooShortSequenceError
from .pooling import PyramidConfig, segment_ranges
from .sequences import FeatureSequence


def _as_param_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


@dataclass(eq=False)
class FilterBank:
    """One dimension's filters: weights (n_filters, interval) and biases (n_filters,)."""

    weights: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        self.weights = _as_param_array(self.weights, 2, "weights")
        self.biases = _as_param_array(self.biases, 1, "biases")
        if self.biases.shape[0] != self.weights.shape[0]:
            raise ShapeMismatchError(
                f"{self.weights.shape[0]} filters but {self.biases.shape[0]} biases"
            )

    @property
    def n_filters(self) -> int:
        return self.weights.shape[0]

    @property
    def interval(self) -> int:
        """Filter length l, in (sampled) frames."""
        return self.weights.shape[1]


@dataclass(eq=False)
class FilterBankSet:
    """One filter bank per feature dimension, all sharing (interval, n_filters).

    weights has shape (num_dims, n_filters, interval) and biases
    (num_dims, n_filters).  The arrays are the trainable parameters and are
    mutated in place by the SGD loop; treat a set as immutable elsewhere.
    """

    weights: np.ndarray
    biases: np.ndarray
    stride: int = 1

    def __post_init__(self):
        self.weights = _as_param_array(self.weights, 3, "weights")
        self.biases = _as_param_array(self.biases, 2, "biases")
        if self.biases.shape != self.weights.shape[:2]:
            raise ShapeMismatchError(
                f"biases shape {self.biases.shape} does not match "
                f"weights shape {self.weights.shape}"
            )
        self.stride = int(self.stride)
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")

    @classmethod
    def from_banks(cls, banks, stride: int = 1) -> "FilterBankSet":
        banks = list(banks)
        if not banks:
            raise ValueError("need at least one filter bank")
        shape = banks[0].weights.shape
        for i, bank in enumerate(banks):
            if bank.weights.shape != shape:
                raise ShapeMismatchError(
                    f"bank 0 has shape {shape} but bank {i} has {bank.weights.shape}"
                )
        return cls(
            weights=np.stack([b.weights for b in banks]),
            biases=np.stack([b.biases for b in banks]),
            stride=stride,
        )

    @property
    def num_dims(self) -> int:
        return self.weights.shape[0]

    @property
    def n_filters(self) -> int:
        return self.weights.shape[1]

    @property
    def interval(self) -> int:
        return self.weights.shape[2]

    @property
    def banks(self) -> list[FilterBank]:
        """Per-dimension banks as independent copies."""
        return [FilterBank(self.weights[k], self.biases[k]) for k in range(self.num_dims)]

    @property
    def parameter_count(self) -> int:
        """l*K*n + K*n: every weight plus every per-dimension bias."""
        assert self.weights.size + self.biases.size == param_count_perdim(
            self.num_dims, self.interval, self.n_filters
        )
        return self.weights.size + self.biases.size


@dataclass(eq=False)
class ResponseSequence:
    """Post-ReLU responses of one dimension's bank: (num_steps, n_filters), all >= 0."""

    responses: np.ndarray

    def __post_init__(self):
        self.responses = np.asarray(self.responses, dtype=np.float64)
        if self.responses.ndim != 2:
            raise ValueError(f"responses must be 2-D, got shape {self.responses.shape}")
        if not np.isfinite(self.responses).all():
            raise ValueError("responses contain NaN or infinite values")
        if (self.responses < 0).any():
            raise ValueError("responses must be nonnegative (post-ReLU)")

    @property
    def num_steps(self) -> int:
        return self.responses.shape[0]

    @property
    def n_filters(self) -> int:
        return self.responses.shape[1]


def num_output_steps(num_frames: int, interval: int, stride: int) -> int:
    """T_out = floor((T - l) / stride) + 1."""
    return (num_frames - interval) // stride + 1


def conv_dim_forward(signal, bank: FilterBank, stride: int = 1) -> ResponseSequence:
    """Slide one dimension's bank along its 1D signal and apply ReLU.

    responses[t][j] = max(0, sum_i weights[j][i] * signal[t*stride + i] + biases[j]).
    The inner sum accumulates taps in ascending i order so results are
    reproducible bit-for-bit regardless of BLAS backend.
    """
    signal = np.asarray(signal, dtype=np.float64)
    if signal.ndim != 1:
        raise ValueError(f"signal must be 1-D, got shape {signal.shape}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    interval = bank.interval
    if signal.shape[0] < interval:
        raise TooShortSequenceError(
            f"signal has {signal.shape[0]} frames but the filters need {interval}"
        )
    windows = sliding_window_view(signal, interval)[::stride]  # (T_out, l)
    acc = np.zeros((windows.shape[0], bank.n_filters))
    for i in range(interval):
        acc += windows[:, i, None] * bank.weights[None, :, i]
    acc += bank.biases[None, :]
    return ResponseSequence(np.maximum(acc, 0.0))


def conv_responses(frames: np.ndarray, banks: FilterBankSet) -> np.ndarray:
    """Pre-activation responses (T_out, K, n_filters) for all dimensions at once.

    Tap accumulation order matches conv_dim_forward, so evaluating the K
    dimensions together is bit-identical to evaluating them one by one.
    """
    num_frames = frames.shape[0]
    interval = banks.interval
    if num_frames < interval:
        raise TooShortSequenceError(
            f"sequence has {num_frames} frames but the filters need {interval}"
        )
    windows = sliding_window_view(frames, interval, axis=0)[:: banks.stride]
    acc = np.zeros((windows.shape[0], banks.num_dims, banks.n_filters))
    for i in range(interval):
        acc += windows[:, :, i, None] * banks.weights[None, :, :, i]
    acc += banks.biases[None, :, :]
    return acc


class OacpForward(NamedTuple):
    """Everything the forward pass produces that backpropagation needs."""

    pooled: np.ndarray          # (K * n_filters * M,)
    pre_activation: np.ndarray  # (T_out, K, n_filters)
    responses: np.ndarray       # (T_out, K, n_filters), post-ReLU
    windows: np.ndarray         # (T_out, K, interval) view of the input frames
    segment_argmax: np.ndarray  # (M, K, n_filters) absolute response-row indices
    ranges: list[tuple[int, int]]


def oacp_forward_details(
    seq: FeatureSequence, banks: FilterBankSet, cfg: PyramidConfig
) -> OacpForward:
    if seq.num_features != banks.num_dims:
        raise ShapeMismatchError(
            f"sequence has {seq.num_features} dimensions but the bank set has {banks.num_dims}"
        )
    pre = conv_responses(seq.frames, banks)
    responses = np.maximum(pre, 0.0)
    windows = sliding_window_view(seq.frames, banks.interval, axis=0)[:: banks.stride]
    ranges = segment_ranges(responses.shape[0], cfg)
    maxima = np.stack([responses[a:b].max(axis=0) for a, b in ranges])
    argmax = np.stack([a + responses[a:b].argmax(axis=0) for a, b in ranges])
    # (M, K, n) -> dimension-major: k outermost, then (level, segment), then channel
    pooled = maxima.transpose(1, 0, 2).ravel()
    return OacpForward(pooled, pre, responses, windows, argmax, ranges)


def oacp_forward(
    seq: FeatureSequence, banks: FilterBankSet, cfg: PyramidConfig
) -> np.ndarray:
    """Convolve every dimension, ReLU, pyramid-pool the responses, concatenate.

    Output layout: dimension k outermost, then level, then segment, then
    filter channel; length K * n_filters * M.
    """
    return oacp_forward_details(seq, banks, cfg).pooled


def param_count_joint(num_dims: int, interval: int, n_filters: int) -> int:
    """Parameter count of a single joint convolution over all dimensions: l*K*n + n.

    Analysis only; the joint layer is intentionally not implemented because
    it needs a huge n to be useful and the count explodes.
    """
    if min(num_dims, interval, n_filters) < 1:
        raise ValueError("all arguments must be >= 1")
    return interval * num_dims * n_filters + n_filters


def param_count_perdim(num_dims: int, interval: int, n_filters: int) -> int:
    """Parameter count of per-dimension banks: l*K*n + K*n.

    Equals FilterBankSet.parameter_count for matching shapes.  Note the
    K*n bias term: quoting only the weight count (l*K*n) understates this
    by one bias per filter per dimension.
    """
    if min(num_dims, interval, n_filters) < 1:
        raise ValueError("all arguments must be >= 1")
    return interval * num_dims * n_filters + num_dims * n_filters
