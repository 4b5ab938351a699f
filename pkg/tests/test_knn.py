import itertools
from collections import Counter

import numpy as np
import pytest

from simplexknn import (
    InsufficientTraining,
    LabeledDataset,
    MetricSpec,
    NeighborConfig,
    ZeroInAitchison,
    classify,
    distance,
    membership_scores,
    pairwise_distances,
)
from simplexknn.knn import _scores_from_distances

from conftest import compositional_blobs


def brute_force_classify(train, query, k, spec):
    """Independent quadratic-scan reimplementation of the classifier.

    Full sort by (distance, row index), Counter vote, explicit tie walk;
    shares only the scalar metric with the library.
    """
    dists = [float(distance(spec, query, row)) for row in train.rows]
    order = sorted(range(len(dists)), key=lambda j: (dists[j], j))[:k]
    votes = Counter(int(train.labels[j]) for j in order)
    top = max(votes.values())
    best = None
    for cls in sorted(votes):
        if votes[cls] != top:
            continue
        pooled = sum(dists[j] for j in order if train.labels[j] == cls)
        if best is None or (pooled, cls) < best:
            best = (pooled, cls)
    return best[1]


class TestPairwiseDistances:
    def test_zero_diagonal_for_identity_metrics(self, blob_dataset):
        for family in ("esov", "tc", "hellinger"):
            m = pairwise_distances(blob_dataset, blob_dataset.rows, MetricSpec(family))
            np.testing.assert_array_equal(np.diag(m), 0.0)

    def test_matching_row_yields_single_zero(self, blob_dataset):
        row = pairwise_distances(
            blob_dataset, blob_dataset.rows[4], MetricSpec("esov")
        )
        assert row.shape == (len(blob_dataset),)
        assert (row == 0).sum() == 1 and row[4] == 0.0

    def test_matrix_matches_independent_scalar_calls(self, blob_dataset):
        queries = blob_dataset.rows[:3]
        train = blob_dataset.subset(range(3, 7))
        for spec in (MetricSpec("esov", 0.5), MetricSpec("tc", 2.0),
                     MetricSpec("aitchison"), MetricSpec("angular")):
            m = pairwise_distances(train, queries, spec)
            assert m.shape == (3, 4)
            for i, j in itertools.product(range(3), range(4)):
                assert m[i, j] == distance(spec, queries[i], train.rows[j])

    def test_entries_finite_and_non_negative(self, sparse_dataset):
        m = pairwise_distances(sparse_dataset, sparse_dataset.rows, MetricSpec("esov"))
        assert np.all(np.isfinite(m)) and np.all(m >= 0)

    def test_aitchison_error_names_offending_row(self, sparse_dataset):
        with pytest.raises(ZeroInAitchison, match="row"):
            pairwise_distances(sparse_dataset, sparse_dataset.rows,
                               MetricSpec("aitchison"))


class TestClassify:
    def test_k1_exact_match_returns_its_label(self, blob_dataset):
        config = NeighborConfig(1, MetricSpec("esov"))
        for i in (0, 13, 25):
            query = blob_dataset.rows[i]
            assert classify(blob_dataset, query, config) == blob_dataset.labels[i]

    def test_k_equals_train_size_gives_global_majority(self, blob_dataset):
        config = NeighborConfig(len(blob_dataset), MetricSpec("tc"))
        # class0 has 12 of 30 rows, a unique global majority
        assert classify(blob_dataset, [0.4, 0.3, 0.2, 0.1], config) == 0

    def test_oracle_equivalence_on_synthetic_sets(self):
        rng = np.random.default_rng(2024)
        for trial in range(10):
            data = compositional_blobs(
                rng, (7, 6, 7), n_parts=4, spread=5.0, floor=1e-3
            )
            queries = rng.dirichlet(np.ones(4), size=4) * 0.98 + 0.005
            for k in (1, 3, 5):
                for spec in (MetricSpec("esov"), MetricSpec("tc", 0.5)):
                    config = NeighborConfig(k, spec)
                    for q in queries:
                        assert classify(data, q, config) == brute_force_classify(
                            data, q, k, spec
                        )

    def test_kth_distance_tie_prefers_lower_row_index(self):
        # rows 1 and 2 are identical, so they tie at every distance;
        # k=2 must take row 1 (lower index) making class b win by distance sum
        rows = np.array([
            [0.5, 0.5],
            [0.4, 0.6],
            [0.4, 0.6],
        ])
        data = LabeledDataset(rows, [0, 1, 0], ("a", "b"))
        config = NeighborConfig(2, MetricSpec("tc"))
        query = np.array([0.4, 0.6])
        # neighbours: row1 (d=0, b), row2 (d=0, a) -> tie 1-1, sums 0 vs 0,
        # residual tie -> lower class index a... both sums zero, class a wins
        assert classify(data, query, config) == 0

    def test_vote_tie_broken_by_distance_sum(self):
        rows = np.array([
            [0.50, 0.50],
            [0.30, 0.70],
            [0.52, 0.48],
            [0.10, 0.90],
        ])
        data = LabeledDataset(rows, [0, 1, 0, 1], ("near", "far"))
        config = NeighborConfig(4, MetricSpec("tc"))
        # 2 votes each; class 'near' members sit closer to the query
        assert classify(data, [0.5, 0.5], config) == 0

    def test_insufficient_training(self, blob_dataset):
        config = NeighborConfig(len(blob_dataset) + 1, MetricSpec("esov"))
        with pytest.raises(InsufficientTraining):
            classify(blob_dataset, blob_dataset.rows[0], config)

    def test_zero_data_fine_for_esov_tc_fatal_for_aitchison(self, sparse_dataset):
        query = sparse_dataset.rows[0]
        for family in ("esov", "tc"):
            classify(sparse_dataset, query, NeighborConfig(3, MetricSpec(family)))
        with pytest.raises(ZeroInAitchison):
            classify(sparse_dataset, query, NeighborConfig(3, MetricSpec("aitchison")))

    def test_uniform_distance_scaling_keeps_winners(self, blob_dataset):
        # switching the logarithm base rescales every esov distance by one
        # constant; the neighbour order and all tie rules are scale-free
        m = pairwise_distances(blob_dataset, blob_dataset.rows[:8], MetricSpec("esov"))
        base, _ = _scores_from_distances(m, blob_dataset.labels, 3, 3)
        for c in (1.0 / np.sqrt(np.log(10.0)), 3.7):
            again, _ = _scores_from_distances(c * m, blob_dataset.labels, 3, 3)
            np.testing.assert_array_equal(base, again)


class TestMembershipScores:
    def test_k1_is_one_hot(self, blob_dataset):
        scores = membership_scores(
            blob_dataset, blob_dataset.rows[0], NeighborConfig(1, MetricSpec("esov"))
        )
        assert sorted(scores) == [0.0, 0.0, 1.0]

    def test_counting_fractions(self):
        rows = np.array([
            [0.9, 0.1],
            [0.8, 0.2],
            [0.5, 0.5],
            [0.1, 0.9],
            [0.0, 1.0],
        ])
        data = LabeledDataset(rows, [0, 0, 1, 2, 2], ("A", "B", "C"))
        scores = membership_scores(data, [0.85, 0.15], NeighborConfig(4, MetricSpec("tc")))
        # neighbours: rows 0,1 (A), 2 (B), 3 (C)
        np.testing.assert_array_equal(scores, [0.5, 0.25, 0.25])

    def test_scores_sum_to_one(self, blob_dataset):
        rng = np.random.default_rng(11)
        config = NeighborConfig(5, MetricSpec("esov", 0.5))
        for _ in range(20):
            q = rng.dirichlet(np.ones(4))
            s = membership_scores(blob_dataset, q, config)
            assert abs(s.sum() - 1.0) < 1e-15

    def test_argmax_consistent_with_classify(self, blob_dataset):
        rng = np.random.default_rng(12)
        for k in (1, 2, 3, 7):
            config = NeighborConfig(k, MetricSpec("tc", 0.5))
            for _ in range(10):
                q = rng.dirichlet(np.ones(4)) * 0.98 + 0.005
                winner = classify(blob_dataset, q, config)
                scores = membership_scores(blob_dataset, q, config)
                assert scores[winner] == scores.max()


def test_determinism_across_runs(blob_dataset):
    config = NeighborConfig(3, MetricSpec("esov", 0.5))
    q = np.array([0.3, 0.3, 0.2, 0.2])
    results = {classify(blob_dataset, q, config) for _ in range(5)}
    assert len(results) == 1
