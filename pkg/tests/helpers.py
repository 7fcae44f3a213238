"""Independent oracles shared by the test modules."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from oacpool.sequences import FeatureSequence, LabeledSequence


def conv_oracle(signal, weights, biases, stride: int) -> np.ndarray:
    """Naive double-loop convolution + ReLU, scalar accumulation in tap order."""
    signal = np.asarray(signal, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    biases = np.asarray(biases, dtype=np.float64)
    n_filters, length = weights.shape
    t_out = (signal.shape[0] - length) // stride + 1
    out = np.empty((t_out, n_filters))
    for t in range(t_out):
        for j in range(n_filters):
            acc = 0.0
            for i in range(length):
                acc += weights[j][i] * signal[t * stride + i]
            acc += biases[j]
            out[t, j] = acc if acc > 0.0 else 0.0
    return out


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Adjusted Rand index from the contingency table."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    classes_a = np.unique(labels_a)
    classes_b = np.unique(labels_b)
    contingency = np.zeros((classes_a.size, classes_b.size), dtype=np.int64)
    for i, ca in enumerate(classes_a):
        for j, cb in enumerate(classes_b):
            contingency[i, j] = int(np.sum((labels_a == ca) & (labels_b == cb)))
    sum_comb = sum(comb(int(n), 2) for n in contingency.ravel())
    sum_a = sum(comb(int(n), 2) for n in contingency.sum(axis=1))
    sum_b = sum(comb(int(n), 2) for n in contingency.sum(axis=0))
    total = comb(labels_a.size, 2)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_comb - expected) / (max_index - expected)


def brute_force_partition_optimum(points, k: int) -> tuple[np.ndarray, float]:
    """Exhaustive minimum within-cluster sum of squares over all assignments."""
    points = np.asarray(points, dtype=np.float64)
    best_obj = np.inf
    best = None
    for assign in itertools.product(range(k), repeat=points.shape[0]):
        if len(set(assign)) < k:
            continue
        assign = np.asarray(assign)
        obj = 0.0
        for g in range(k):
            members = points[assign == g]
            obj += float(((members - members.mean(axis=0)) ** 2).sum())
        if obj < best_obj:
            best_obj = obj
            best = assign
    return best, best_obj


def canonical_labels(assignment) -> np.ndarray:
    """Relabel groups by first occurrence so partitions compare label-free."""
    mapping: dict[int, int] = {}
    out = np.empty(len(assignment), dtype=np.int64)
    for i, g in enumerate(assignment):
        mapping.setdefault(int(g), len(mapping))
        out[i] = mapping[int(g)]
    return out


def mean_separable_dataset(
    n_per_class: int, num_frames: int, num_features: int, seed: int
) -> list[LabeledSequence]:
    """Two classes whose frame values differ in mean: easy for average pooling."""
    rng = np.random.default_rng(seed)
    data = []
    for label, offset in enumerate((0.0, 1.0)):
        for _ in range(n_per_class):
            frames = offset + 0.1 * rng.standard_normal((num_frames, num_features))
            data.append(LabeledSequence(FeatureSequence(frames), label))
    return data
