import numpy as np
import pytest

from colvne.augment import AugmentConfig, augment_batch, augment_sample, multi_crop
from colvne.errors import ShapeError
from colvne.utils import keyed_generator


@pytest.fixture
def images(rng) -> list[np.ndarray]:
    return [rng.uniform(0.0, 1.0, size=(3, 32, 32)) for _ in range(6)]


def test_no_local_views(images, rng):
    views = multi_crop(images[0], 16, 8, 0, rng)
    assert [v.shape for v in views] == [(3, 16, 16), (3, 16, 16)]


def test_large_global_and_local_views(rng):
    img = rng.uniform(0.0, 1.0, size=(3, 128, 128))
    views = multi_crop(img, 128, 64, 4, rng)
    assert [v.shape for v in views] == [(3, 128, 128)] * 2 + [(3, 64, 64)] * 4


def test_replay_is_bit_identical(images):
    a = multi_crop(images[0], 16, 8, 2, keyed_generator(5, 3, 0, 0))
    b = multi_crop(images[0], 16, 8, 2, keyed_generator(5, 3, 0, 0))
    for x, y in zip(a, b, strict=True):
        np.testing.assert_array_equal(x, y)


def test_invalid_sizes(images, rng):
    with pytest.raises(ShapeError):
        multi_crop(images[0], 40, 8, 1, rng)
    with pytest.raises(ShapeError):
        multi_crop(images[0], 16, 20, 1, rng)


def test_sample_records_lineage(images):
    cfg = AugmentConfig(global_size=16, local_size=8, local_views=3)
    sample = augment_sample(images[2], cfg, seed=9, epoch=4, index=2)
    assert (sample.seed, sample.epoch, sample.index) == (9, 4, 2)
    assert len(sample) == cfg.views_per_sample == 5
    assert len(sample.global_views) == 2 and len(sample.local_views) == 3


def test_epoch_changes_views(images):
    cfg = AugmentConfig(global_size=16, local_size=8, local_views=1)
    a = augment_sample(images[0], cfg, seed=1, epoch=0, index=0)
    b = augment_sample(images[0], cfg, seed=1, epoch=1, index=0)
    assert not np.array_equal(a.views[0], b.views[0])


def test_thread_count_does_not_change_output(images):
    cfg = AugmentConfig(global_size=16, local_size=8, local_views=2)
    indices = [4, 0, 5, 1]
    serial = augment_batch(images, indices, cfg, seed=3, epoch=2, threads=1)
    parallel = augment_batch(images, indices, cfg, seed=3, epoch=2, threads=4)
    assert [s.index for s in parallel] == indices
    for s, p in zip(serial, parallel, strict=True):
        for x, y in zip(s.views, p.views, strict=True):
            np.testing.assert_array_equal(x, y)


def test_threads_read_from_environment(images, monkeypatch):
    monkeypatch.setenv("COLVNE_THREADS", "3")
    cfg = AugmentConfig(global_size=16, local_size=8, local_views=0)
    out = augment_batch(images, [0, 1, 2], cfg, seed=0, epoch=0)
    assert [s.index for s in out] == [0, 1, 2]


def test_config_rejects_local_larger_than_global():
    with pytest.raises(ValueError):
        AugmentConfig(global_size=16, local_size=20)
