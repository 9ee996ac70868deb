import math

import numpy as np
import pytest

from colvne.errors import NumericalError, ShapeError
from colvne.train import TrainConfig, lr_at, sgd_step


@pytest.fixture
def schedule() -> TrainConfig:
    return TrainConfig(epochs=10, warmup_epochs=2, start_lr=0.04, peak_lr=0.4, final_lr=0.0004)


def test_schedule_endpoints(schedule):
    assert lr_at(0, 5, schedule) == pytest.approx(0.04)
    assert lr_at(10, 5, schedule) == pytest.approx(0.4)
    assert lr_at(49, 5, schedule) == pytest.approx(0.0004)


def test_warmup_is_linear(schedule):
    assert lr_at(5, 5, schedule) == pytest.approx(0.04 + 0.36 * 0.5)


def test_cosine_decay(schedule):
    values = [lr_at(s, 5, schedule) for s in range(10, 50)]
    assert all(a >= b for a, b in zip(values, values[1:], strict=False))
    expected = 0.0004 + (0.4 - 0.0004) * (1.0 + math.cos(math.pi * 20 / 39)) / 2.0
    assert lr_at(30, 5, schedule) == pytest.approx(expected)


def test_no_warmup_starts_at_peak():
    cfg = TrainConfig(epochs=3, warmup_epochs=0)
    assert lr_at(0, 4, cfg) == pytest.approx(cfg.peak_lr)


def test_negative_step(schedule):
    with pytest.raises(ValueError):
        lr_at(-1, 5, schedule)


def test_momentum_accumulates():
    cfg = TrainConfig(momentum=0.9, weight_decay=0.0)
    params = {"w": np.array([1.0])}
    buffers: dict[str, np.ndarray] = {}
    sgd_step(params, {"w": np.array([0.5])}, buffers, 0.1, cfg)
    np.testing.assert_allclose(params["w"], [0.95])
    sgd_step(params, {"w": np.array([0.5])}, buffers, 0.1, cfg)
    np.testing.assert_allclose(buffers["w"], [0.95])
    np.testing.assert_allclose(params["w"], [0.855])


def test_weight_decay_enters_direction():
    cfg = TrainConfig(momentum=0.0, weight_decay=0.1)
    params = {"w": np.array([2.0])}
    sgd_step(params, {"w": np.array([0.0])}, {}, 1.0, cfg)
    np.testing.assert_allclose(params["w"], [1.8])


def test_lars_scales_matrices_only():
    cfg = TrainConfig(momentum=0.0, weight_decay=0.0, lars_enabled=True)
    params = {"w": np.array([[3.0, 4.0]]), "b": np.array([3.0, 4.0])}
    grads = {"w": np.array([[0.6, 0.8]]), "b": np.array([0.6, 0.8])}
    sgd_step(params, grads, {}, 0.1, cfg)
    np.testing.assert_allclose(params["w"], [[2.7, 3.6]])
    np.testing.assert_allclose(params["b"], [2.94, 3.92])


def test_non_finite_gradient_leaves_parameters():
    cfg = TrainConfig()
    params = {"a": np.array([1.0]), "b": np.array([1.0])}
    with pytest.raises(NumericalError):
        sgd_step(params, {"a": np.array([0.1]), "b": np.array([np.nan])}, {}, 0.1, cfg)
    np.testing.assert_array_equal(params["a"], [1.0])


def test_gradient_shape_mismatch():
    with pytest.raises(ShapeError):
        sgd_step({"a": np.zeros(2)}, {"a": np.zeros(3)}, {}, 0.1, TrainConfig())
    with pytest.raises(ShapeError):
        sgd_step({"a": np.zeros(2)}, {"z": np.zeros(2)}, {}, 0.1, TrainConfig())
