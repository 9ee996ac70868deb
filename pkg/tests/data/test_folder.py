import numpy as np
import pytest

from colvne.data import (
    Dataset,
    LongTailSpec,
    Split,
    decode_ppm,
    encode_ppm,
    export_folder,
    export_splits,
    generate_longtail,
    load_folder,
    load_splits,
)
from colvne.errors import DataIOError


def test_ppm_quantization(rng):
    img = rng.uniform(0.0, 1.0, size=(3, 5, 7))
    out = decode_ppm(encode_ppm(img))
    assert out.shape == (3, 5, 7)
    assert np.abs(out - img).max() <= 0.5 / 255 + 1e-12


def test_ppm_header_comments():
    data = b"P6\n# a comment\n2 1\n# another\n255\n" + bytes([255, 0, 0, 0, 0, 255])
    img = decode_ppm(data)
    np.testing.assert_array_equal(img[:, 0, 0], [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(img[:, 0, 1], [0.0, 0.0, 1.0])


@pytest.mark.parametrize(
    "data",
    [
        b"P5\n1 1\n255\n\x00",
        b"P6\n1 1\n0\n\x00\x00\x00",
        b"P6\n2 2\n255\n\x00\x00\x00",
        b"P6\nx 1\n255\n\x00\x00\x00",
    ],
)
def test_broken_ppm(data):
    with pytest.raises(DataIOError):
        decode_ppm(data)


def _small_dataset(rng) -> Dataset:
    images = [rng.uniform(size=(3, 6, 6)) for _ in range(4)]
    return Dataset(images, np.array([0, 1, 1, 0]), 2, Split.TRAIN)


def test_export_and_load(tmp_path, rng):
    ds = _small_dataset(rng)
    export_folder(ds, tmp_path / "set")
    header = (tmp_path / "set" / "labels.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "filename,class_index"
    loaded = load_folder(tmp_path / "set")
    np.testing.assert_array_equal(loaded.labels, ds.labels)
    for a, b in zip(loaded.images, ds.images, strict=True):
        assert np.abs(a - b).max() <= 1.0 / 255


def test_missing_image_is_reported(tmp_path, rng):
    export_folder(_small_dataset(rng), tmp_path)
    (tmp_path / "img_00002.ppm").unlink()
    with pytest.raises(DataIOError, match="img_00002.ppm"):
        load_folder(tmp_path)


def test_unlabelled_image(tmp_path, rng):
    export_folder(_small_dataset(rng), tmp_path)
    (tmp_path / "extra.ppm").write_bytes(encode_ppm(rng.uniform(size=(3, 6, 6))))
    with pytest.raises(DataIOError, match="extra.ppm"):
        load_folder(tmp_path)


def test_missing_labels(tmp_path):
    with pytest.raises(DataIOError, match="labels.csv"):
        load_folder(tmp_path)
    with pytest.raises(DataIOError):
        load_folder(tmp_path / "absent")


def test_out_of_range_label(tmp_path, rng):
    export_folder(_small_dataset(rng), tmp_path)
    with pytest.raises(DataIOError):
        load_folder(tmp_path, num_classes=1)


def test_split_roundtrip_through_disk(tmp_path):
    splits = generate_longtail(LongTailSpec(num_classes=3, n_max=10, rho=2, image_size=8), 4)
    export_splits(splits, tmp_path)
    loaded = load_splits(tmp_path)
    assert loaded.num_classes == 3
    assert len(loaded.train) == len(splits.train) and len(loaded.val) == len(splits.val)
    np.testing.assert_array_equal(loaded.val.labels, splits.val.labels)


def test_flat_folder_is_split(tmp_path):
    splits = generate_longtail(LongTailSpec(num_classes=2, n_max=10, rho=1, image_size=8), 0)
    export_folder(splits.train, tmp_path)
    loaded = load_splits(tmp_path)
    assert len(loaded.train) + len(loaded.val) == len(splits.train)
    assert len(loaded.val) > 0
