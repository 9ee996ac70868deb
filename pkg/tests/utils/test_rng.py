import numpy as np
import pytest

import colvne.utils as utils
from colvne.utils import Stream, keyed_generator


def test_same_keys_same_stream():
    a = keyed_generator(3, int(Stream.AUGMENT), 1, 2).random(5)
    b = keyed_generator(3, int(Stream.AUGMENT), 1, 2).random(5)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("keys", [(int(Stream.AUGMENT), 1, 3), (int(Stream.DATA), 1, 2), ()])
def test_any_key_change_gives_another_stream(keys):
    base = keyed_generator(3, int(Stream.AUGMENT), 1, 2).random(5)
    assert not np.array_equal(base, keyed_generator(3, *keys).random(5))


def test_negative_keys_rejected():
    with pytest.raises(ValueError):
        keyed_generator(-1)
    with pytest.raises(ValueError):
        keyed_generator(0, int(Stream.BATCH), -2)


def test_exports_resolve():
    for name in utils.__all__:
        assert callable(getattr(utils, name)) or isinstance(getattr(utils, name), type)
    assert sorted(utils.__all__) == [
        "Stream",
        "get_channel_logger",
        "keyed_generator",
        "set_console_level",
    ]
