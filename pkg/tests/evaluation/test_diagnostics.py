import math

import numpy as np
import pytest

from colvne.evaluation import (
    EmbeddingBank,
    cluster_accuracy,
    diagnose,
    majority_fraction,
    usage_entropy,
    usage_histogram,
)


def test_collapsed_embeddings():
    bank = EmbeddingBank(np.tile([1.0, 0.0, 0.0], (6, 1)), np.zeros(6, dtype=int), 1)
    report = diagnose(bank)
    np.testing.assert_allclose(report.spectrum, [1.0, 0.0, 0.0], atol=1e-12)
    assert report.vne == pytest.approx(0.0, abs=1e-12)
    assert report.effective_rank == pytest.approx(1.0)


def test_spread_embeddings():
    bank = EmbeddingBank(np.eye(4), np.arange(4), 4)
    report = diagnose(bank)
    np.testing.assert_allclose(report.spectrum, 0.25, atol=1e-12)
    assert report.vne == pytest.approx(math.log(4))
    assert report.effective_rank == pytest.approx(4.0)


def test_class_usage_from_logits():
    bank = EmbeddingBank(np.eye(4), np.arange(4), 4)
    logits = np.array([[2.0, 0.0], [3.0, 1.0], [0.0, 1.0], [5.0, 0.0]])
    report = diagnose(bank, logits)
    assert report.class_usage.tolist() == [3, 1]
    assert report.majority_fraction == pytest.approx(0.75)
    assert report.class_usage_entropy == pytest.approx(
        -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    )


def test_usage_entropy_edges():
    assert usage_entropy(np.array([5, 5])) == pytest.approx(math.log(2))
    assert usage_entropy(np.array([4, 0, 0])) == 0.0
    assert usage_entropy(np.array([0, 0])) == 0.0
    assert usage_histogram([2, 2, 0], 4).tolist() == [1, 0, 2, 0]
    assert majority_fraction([]) == 0.0


def test_cluster_accuracy_ignores_cluster_names():
    labels = np.array([1, 1, 0, 0, 2, 2])
    assert cluster_accuracy([0, 0, 1, 1, 2, 2], labels, 3) == 1.0
    assert cluster_accuracy([0] * 6, labels, 3) == pytest.approx(1 / 3)
    assert cluster_accuracy([0, 1, 1, 1, 2, 2], labels, 3) == pytest.approx(5 / 6)
    assert cluster_accuracy([], [], 3) == 0.0
