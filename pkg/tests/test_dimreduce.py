import numpy as np
import pytest

from helpers import (
    adjusted_rand_index,
    brute_force_partition_optimum,
    canonical_labels,
)

from oacpool.dimreduce import (
    ReductionPartition,
    SignatureMatrix,
    class_signatures,
    kmeans_partition,
    lloyd_kmeans,
    load_partition,
    reduce,
    reduce_sequence,
    save_partition,
)
from oacpool.errors import (
    InvalidTargetError,
    MissingClassError,
    ParseError,
    ShapeMismatchError,
)
from oacpool.sequences import FeatureSequence


def planted_signatures(rng, dims_per_group, centers, spread):
    """Signatures clustered around given centers; returns (matrix, truth)."""
    points = []
    truth = []
    for g, center in enumerate(centers):
        for _ in range(dims_per_group):
            points.append(center + spread * rng.standard_normal(len(center)))
            truth.append(g)
    points = np.asarray(points)
    return SignatureMatrix(points.T), np.asarray(truth)


class TestClassSignatures:
    def test_single_vector_per_class(self):
        data = [([1.0, 2.0], 0), ([3.0, 4.0], 1)]
        sig = class_signatures(data, 2)
        assert sig.means.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_class_mean_is_midpoint(self):
        data = [([0.0, 2.0], 0), ([2.0, 0.0], 0), ([5.0, 5.0], 1)]
        sig = class_signatures(data, 2)
        assert sig.means[0].tolist() == [1.0, 1.0]

    def test_missing_class_rejected(self):
        data = [([1.0], 0), ([2.0], 1)]
        with pytest.raises(MissingClassError, match="class 2"):
            class_signatures(data, 3)

    def test_inconsistent_vector_lengths(self):
        with pytest.raises(ShapeMismatchError):
            class_signatures([([1.0, 2.0], 0), ([1.0], 0)], 1)

    def test_signature_columns(self):
        sig = class_signatures([([1.0, 2.0], 0), ([3.0, 4.0], 1)], 2)
        assert sig.num_classes == 2 and sig.num_dims == 2
        assert sig.signatures.tolist() == [[1.0, 3.0], [2.0, 4.0]]


class TestLloydKmeans:
    def test_objective_is_monotone_non_increasing(self):
        rng = np.random.default_rng(70)
        for seed in range(10):
            points = rng.standard_normal((30, 3))
            _, _, objectives = lloyd_kmeans(points, 4, seed=seed)
            assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_deterministic_given_seed(self):
        points = np.random.default_rng(71).standard_normal((25, 2))
        a1, _, _ = lloyd_kmeans(points, 5, seed=42)
        a2, _, _ = lloyd_kmeans(points, 5, seed=42)
        assert np.array_equal(a1, a2)

    def test_duplicate_points_still_fill_every_cluster(self):
        points = np.array([[0.0, 0.0]] * 4 + [[10.0, 10.0]] * 2)
        for seed in range(8):
            assignment, _, objectives = lloyd_kmeans(points, 3, seed=seed)
            assert set(np.unique(assignment)) == {0, 1, 2}
            assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_rejects_bad_k(self):
        points = np.zeros((4, 2))
        with pytest.raises(InvalidTargetError):
            lloyd_kmeans(points, 5)
        with pytest.raises(InvalidTargetError):
            lloyd_kmeans(points, 0)


class TestKmeansPartition:
    def test_k_equals_d_gives_singletons(self):
        rng = np.random.default_rng(72)
        sig = SignatureMatrix(rng.standard_normal((3, 6)))
        partition = kmeans_partition(sig, 6, seed=0)
        assert (partition.group_sizes == 1).all()

    def test_k_one_groups_everything(self):
        sig = SignatureMatrix(np.random.default_rng(73).standard_normal((2, 5)))
        partition = kmeans_partition(sig, 1, seed=0)
        assert partition.assignment.tolist() == [0] * 5

    def test_matches_exhaustive_enumeration_on_planted_groups(self):
        rng = np.random.default_rng(74)
        sig, _ = planted_signatures(
            rng,
            dims_per_group=2,
            centers=[np.array([0.0, 0.0]), np.array([50.0, 0.0]), np.array([0.0, 50.0])],
            spread=0.5,
        )
        assert sig.num_dims == 6
        best_assign, best_obj = brute_force_partition_optimum(sig.signatures, 3)
        partition = kmeans_partition(sig, 3, seed=1)
        assert np.array_equal(
            canonical_labels(partition.assignment), canonical_labels(best_assign)
        )
        _, _, objectives = lloyd_kmeans(sig.signatures, 3, seed=1)
        assert objectives[-1] == pytest.approx(best_obj, rel=1e-12, abs=1e-12)

    def test_recovers_planted_structure_across_seeds(self):
        rng = np.random.default_rng(75)
        centers = [np.zeros(3), np.full(3, 10.0), np.array([10.0, -10.0, 0.0])]
        sig, truth = planted_signatures(rng, dims_per_group=10, centers=centers, spread=1.0)
        scores = [
            adjusted_rand_index(kmeans_partition(sig, 3, seed=s).assignment, truth)
            for s in range(20)
        ]
        assert np.mean(scores) >= 0.9

    def test_rejects_target_above_dimensionality(self):
        sig = SignatureMatrix(np.zeros((2, 4)))
        with pytest.raises(InvalidTargetError):
            kmeans_partition(sig, 5)

    def test_deterministic_assignment(self):
        sig = SignatureMatrix(np.random.default_rng(76).standard_normal((3, 12)))
        a = kmeans_partition(sig, 4, seed=9).assignment
        b = kmeans_partition(sig, 4, seed=9).assignment
        assert np.array_equal(a, b)


class TestReductionPartition:
    def test_rejects_empty_group(self):
        with pytest.raises(ValueError, match="group 1 is empty"):
            ReductionPartition(np.array([0, 0, 2]), 3)

    def test_rejects_out_of_range_assignment(self):
        with pytest.raises(ValueError):
            ReductionPartition(np.array([0, 3]), 2)

    def test_rejects_unknown_aggregation(self):
        with pytest.raises(ValueError):
            ReductionPartition(np.array([0, 1]), 2, aggregation="median")


class TestReduce:
    def test_identity_partition_copies_vector(self):
        partition = ReductionPartition(np.arange(4), 4)
        x = np.array([1.5, -2.0, 0.25, 9.0])
        assert reduce(x, partition).tolist() == x.tolist()

    def test_single_group_sums(self):
        partition = ReductionPartition(np.zeros(4, dtype=int), 1)
        assert reduce(np.array([1.0, 2.0, 3.0, 4.0]), partition).tolist() == [10.0]

    def test_mean_aggregation(self):
        partition = ReductionPartition(np.array([0, 0, 1]), 2, aggregation="mean")
        assert reduce(np.array([1.0, 3.0, 7.0]), partition).tolist() == [2.0, 7.0]

    def test_linearity(self):
        rng = np.random.default_rng(77)
        assignment = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2, 0])
        partition = ReductionPartition(assignment, 3)
        x = rng.standard_normal(10)
        y = rng.standard_normal(10)
        lhs = reduce(2.5 * x + 0.5 * y, partition)
        rhs = 2.5 * reduce(x, partition) + 0.5 * reduce(y, partition)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-14)

    def test_length_mismatch(self):
        partition = ReductionPartition(np.array([0, 1]), 2)
        with pytest.raises(ShapeMismatchError):
            reduce(np.zeros(3), partition)


class TestReduceSequence:
    def test_single_frame(self):
        partition = ReductionPartition(np.array([0, 0, 1]), 2)
        seq = FeatureSequence([[1.0, 2.0, 5.0]])
        assert reduce_sequence(seq, partition).frames.tolist() == [[3.0, 5.0]]

    def test_identity_partition_preserves_sequence(self):
        seq = FeatureSequence(np.random.default_rng(78).standard_normal((4, 5)))
        partition = ReductionPartition(np.arange(5), 5)
        assert reduce_sequence(seq, partition) == seq

    def test_k_one_gives_frame_sums(self):
        seq = FeatureSequence([[1.0, 2.0], [3.0, 4.0]])
        partition = ReductionPartition(np.zeros(2, dtype=int), 1)
        assert reduce_sequence(seq, partition).frames.tolist() == [[3.0], [7.0]]

    def test_rows_match_vector_reduce_bit_exactly(self):
        rng = np.random.default_rng(79)
        seq = FeatureSequence(rng.standard_normal((6, 8)))
        assignment = np.array([0, 1, 2, 0, 1, 2, 0, 1])
        partition = ReductionPartition(assignment, 3)
        out = reduce_sequence(seq, partition)
        for t in range(6):
            assert out.frames[t].tobytes() == reduce(seq.frames[t], partition).tobytes()


class TestPartitionFile:
    def test_roundtrip_exact(self, tmp_path):
        partition = ReductionPartition(np.array([2, 0, 1, 1, 0, 2]), 3, aggregation="mean")
        path = tmp_path / "partition.txt"
        save_partition(partition, path)
        loaded = load_partition(path)
        assert np.array_equal(loaded.assignment, partition.assignment)
        assert loaded.k == 3 and loaded.aggregation == "mean"

    def test_header_format(self, tmp_path):
        partition = ReductionPartition(np.array([0, 1]), 2)
        path = tmp_path / "partition.txt"
        save_partition(partition, path)
        assert path.read_text().splitlines()[0] == "k=2 D=2 aggregation=sum"

    @pytest.mark.parametrize(
        "content",
        [
            "",
            "k=2 aggregation=sum\n0\n1\n",
            "k=2 D=3 aggregation=sum\n0\n1\n",
            "k=2 D=2 aggregation=sum\n0\nx\n",
            "k=2 D=2 aggregation=sum\n0\n5\n",
        ],
    )
    def test_malformed_files_rejected(self, tmp_path, content):
        path = tmp_path / "bad.txt"
        path.write_text(content)
        with pytest.raises(ParseError):
            load_partition(path)
