import numpy as np
import pytest

from colvne.data import LongTailSpec, class_counts, generate_longtail, stratified_split
from colvne.errors import DataIOError


def test_longtail_counts():
    assert class_counts(LongTailSpec(num_classes=3, n_max=100, rho=10)) == [100, 32, 10]


def test_balanced_counts():
    assert class_counts(LongTailSpec(num_classes=4, n_max=25, rho=1)) == [25] * 4


def test_counts_never_below_two():
    counts = class_counts(LongTailSpec(num_classes=5, n_max=4, rho=1000))
    assert min(counts) == 2
    assert counts == sorted(counts, reverse=True)


def test_generation_is_reproducible():
    spec = LongTailSpec(num_classes=3, n_max=12, rho=3, image_size=8)
    a, b = generate_longtail(spec, 5), generate_longtail(spec, 5)
    np.testing.assert_array_equal(a.train.labels, b.train.labels)
    for x, y in zip(a.train.images + a.val.images, b.train.images + b.val.images, strict=True):
        np.testing.assert_array_equal(x, y)
    c = generate_longtail(spec, 6)
    assert not np.array_equal(a.train.images[0], c.train.images[0])


def test_generated_splits_cover_every_class():
    spec = LongTailSpec(num_classes=4, n_max=20, rho=5, image_size=8)
    splits = generate_longtail(spec, 0)
    total = splits.train.class_counts() + splits.val.class_counts()
    assert total.tolist() == class_counts(spec)
    assert (splits.train.class_counts() >= 1).all()
    assert (splits.val.class_counts() >= 1).all()
    for img in splits.train.images:
        assert img.shape == (3, 8, 8)
        assert img.min() >= 0.0 and img.max() <= 1.0


def test_stratified_split_keeps_training_sample():
    spec = LongTailSpec(num_classes=2, n_max=10, rho=5, image_size=8)
    splits = generate_longtail(spec, 1)
    merged = splits.train
    again = stratified_split(merged, 0.99, seed=0)
    assert (again.train.class_counts() >= 1).all()
    assert len(again.train) + len(again.val) == len(merged)


def test_untrainable_dataset():
    spec = LongTailSpec(num_classes=2, n_max=2, rho=1, image_size=8)
    splits = generate_longtail(spec, 0)
    with pytest.raises(DataIOError):
        splits.train.check_trainable()
