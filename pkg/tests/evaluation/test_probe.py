import numpy as np

from colvne.evaluation import EmbeddingBank, linear_probe
from tests.conftest import random_unit_rows


def _clustered(rng, n: int, classes: int, dim: int) -> EmbeddingBank:
    labels = rng.integers(0, classes, n)
    centers = np.eye(dim)[:classes]
    features = centers[labels] + rng.normal(0.0, 0.05, size=(n, dim))
    return EmbeddingBank.from_features(features, labels, classes)


def test_separable_classes(rng):
    train, test = _clustered(rng, 300, 3, 8), _clustered(rng, 150, 3, 8)
    top1, top5 = linear_probe(train, test, epochs=100, batch_size=32, seed=0)
    assert top1 >= 0.99
    assert top5 == 1.0


def test_random_labels_stay_near_chance(rng):
    train = EmbeddingBank(random_unit_rows(rng, 400, 8), rng.integers(0, 4, 400), 4)
    test = EmbeddingBank(random_unit_rows(rng, 400, 8), rng.integers(0, 4, 400), 4)
    top1, _ = linear_probe(train, test, epochs=20, batch_size=64, seed=1)
    assert top1 < 0.4


def test_untrained_probe_is_deterministic(rng):
    train, test = _clustered(rng, 50, 3, 8), _clustered(rng, 20, 3, 8)
    assert linear_probe(train, test, epochs=0, seed=4) == linear_probe(
        train, test, epochs=0, seed=4
    )
