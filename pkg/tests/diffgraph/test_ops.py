import numpy as np
import pytest

from colvne.diffgraph import Graph, RunningStats, ops
from colvne.errors import ShapeError


def _value(fn, *arrays):
    g = Graph()
    return fn(*[g.constant(a) for a in arrays]).value


class TestForward:
    def test_row_softmax_symmetric_input(self):
        np.testing.assert_allclose(_value(ops.row_softmax, np.zeros((1, 2))), [[0.5, 0.5]])

    def test_row_softmax_temperature(self):
        out = _value(lambda x: ops.row_softmax(x, 0.1), np.array([[1.0, 0.0]]))
        expected = np.exp(10.0) / (np.exp(10.0) + 1.0)
        np.testing.assert_allclose(out[0], [expected, 1.0 - expected], rtol=1e-12)
        assert out[0, 1] == pytest.approx(4.54e-5, rel=1e-3)

    def test_row_softmax_rejects_bad_temperature(self):
        with pytest.raises(ValueError):
            _value(lambda x: ops.row_softmax(x, 0.0), np.zeros((1, 2)))

    def test_leaky_relu(self):
        out = _value(lambda x: ops.leaky_relu(x, 0.01), np.array([-1.0, 2.0]))
        np.testing.assert_allclose(out, [-0.01, 2.0])

    def test_conv2d_matches_direct_sum(self, rng):
        x = rng.standard_normal((1, 2, 5, 5))
        w = rng.standard_normal((3, 2, 3, 3))
        b = rng.standard_normal(3)
        out = _value(lambda a, k, c: ops.conv2d(a, k, c, stride=1, padding=1), x, w, b)
        xp = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
        expected = np.zeros((1, 3, 5, 5))
        for o in range(3):
            for i in range(5):
                for j in range(5):
                    expected[0, o, i, j] = np.sum(xp[0, :, i : i + 3, j : j + 3] * w[o]) + b[o]
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_conv2d_stride(self, rng):
        out = _value(
            lambda a, k: ops.conv2d(a, k, stride=2, padding=1),
            rng.standard_normal((2, 1, 6, 6)),
            rng.standard_normal((4, 1, 3, 3)),
        )
        assert out.shape == (2, 4, 3, 3)

    def test_max_pool_drops_odd_edge(self):
        x = np.arange(25.0).reshape(1, 1, 5, 5)
        out = _value(ops.max_pool2d, x)
        np.testing.assert_array_equal(out[0, 0], [[6.0, 8.0], [16.0, 18.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            _value(ops.matmul, np.ones((2, 3)), np.ones((2, 3)))
        with pytest.raises(ShapeError):
            _value(ops.add, np.ones((2, 3)), np.ones((3, 2)))


class TestBatchNorm:
    def test_train_mode_normalizes_and_updates_stats(self, rng):
        x = rng.standard_normal((64, 3)) * 4.0 + 2.0
        stats = RunningStats.fresh(3)
        g = Graph()
        gamma, beta = g.constant(np.ones(3)), g.constant(np.zeros(3))
        out = ops.batch_norm(g.constant(x), gamma, beta, stats, training=True, momentum=0.1).value
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-3)
        np.testing.assert_allclose(stats.mean, 0.1 * x.mean(axis=0), atol=1e-12)

    def test_eval_mode_is_fixed_affine(self, rng):
        stats = RunningStats(mean=np.array([1.0, -1.0]), var=np.array([4.0, 0.25]))
        gamma, beta = np.array([2.0, 1.0]), np.array([0.5, 0.0])
        x = rng.standard_normal((5, 2))
        g = Graph()
        full = ops.batch_norm(
            g.constant(x), g.constant(gamma), g.constant(beta), stats, training=False, eps=0.0
        ).value
        single = ops.batch_norm(
            g.constant(x[:1]), g.constant(gamma), g.constant(beta), stats, training=False, eps=0.0
        ).value
        np.testing.assert_allclose(full, gamma * (x - stats.mean) / np.sqrt(stats.var) + beta)
        np.testing.assert_allclose(single, full[:1])

    def test_eval_mode_requires_stats(self):
        g = Graph()
        x = g.constant(np.ones((2, 2)))
        gamma, beta = g.constant(np.ones(2)), g.constant(np.zeros(2))
        with pytest.raises(ValueError):
            ops.batch_norm(x, gamma, beta, None, training=False)
