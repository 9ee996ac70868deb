import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from colvne.diffgraph import Graph, grad_check, ops
from colvne.errors import NumericalError
from colvne.losses import autocorrelation, vne, vne_backward, vne_node
from colvne.losses.entropy import spectral_entropy
from tests.conftest import random_unit_rows
from tests.losses import oracle

SQRT_HALF = math.sqrt(0.5)


class TestAutocorrelation:
    def test_orthonormal_rows(self):
        np.testing.assert_allclose(autocorrelation(np.eye(2)), [[0.5, 0.0], [0.0, 0.5]])

    def test_collapsed_rows(self):
        z = autocorrelation(np.array([[1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_allclose(z, [[1.0, 0.0], [0.0, 0.0]])

    def test_outer_product_average(self):
        z = autocorrelation(np.array([[1.0, 0.0], [SQRT_HALF, SQRT_HALF]]))
        np.testing.assert_allclose(z, [[0.75, 0.25], [0.25, 0.25]], atol=1e-15)

    def test_unnormalized_rows_rejected(self):
        with pytest.raises(ValueError):
            autocorrelation(np.array([[2.0, 0.0], [0.0, 1.0]]))

    def test_trace_is_one(self, rng):
        z = autocorrelation(random_unit_rows(rng, 17, 5))
        assert abs(np.trace(z) - 1.0) <= 1e-9
        np.testing.assert_allclose(z, z.T)


class TestVNE:
    def test_uniform_spectrum(self):
        assert vne(np.diag([0.5, 0.5])) == pytest.approx(math.log(2), abs=1e-12)

    def test_rank_one(self):
        assert vne(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)

    def test_two_by_two_closed_form(self):
        lam = np.array([(1 + SQRT_HALF) / 2, (1 - SQRT_HALF) / 2])
        expected = float(-(lam * np.log(lam)).sum())
        assert vne(np.array([[0.75, 0.25], [0.25, 0.25]])) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.4165, abs=1e-3)

    def test_trace_must_be_one(self):
        with pytest.raises(ValueError):
            vne(np.eye(2))

    def test_negative_eigenvalue_is_numerical_error(self):
        with pytest.raises(NumericalError):
            spectral_entropy(np.array([1.1, -0.1]))

    def test_bounds_over_random_batches(self, rng):
        for _ in range(100):
            n, d = int(rng.integers(1, 33)), int(rng.integers(1, 33))
            s = vne(autocorrelation(random_unit_rows(rng, n, d)))
            assert -1e-12 <= s <= math.log(min(n, d)) + 1e-9

    def test_matches_numpy_oracle(self, rng):
        h = random_unit_rows(rng, 20, 6)
        assert vne(autocorrelation(h)) == pytest.approx(oracle.vne(h), abs=1e-10)

    def test_invariant_under_rotation(self, rng):
        h = random_unit_rows(rng, 12, 5)
        q = ortho_group.rvs(5, random_state=11)
        assert vne(autocorrelation(h @ q)) == pytest.approx(vne(autocorrelation(h)), abs=1e-9)


class TestVNEBackward:
    def test_uniform_spectrum_gradient_parallel_to_h(self):
        h = np.eye(2)
        grad = vne_backward(h, 1.0)
        c = 1.0 + math.log(0.5)
        np.testing.assert_allclose(grad, -(2.0 * c / 2.0) * h, atol=1e-12)

    def test_zero_upstream(self, rng):
        h = random_unit_rows(rng, 6, 3)
        np.testing.assert_array_equal(vne_backward(h, 0.0), np.zeros((6, 3)))

    def test_finite_differences(self, rng):
        def build(g, p):
            return vne_node(ops.l2_normalize_rows(p["h"]))

        assert grad_check(build, {"h": rng.standard_normal((6, 3))}) <= 1e-4

    def test_node_exposes_spectrum(self, rng):
        g = Graph()
        node = vne_node(g.constant(random_unit_rows(rng, 10, 4)))
        lam = node.meta["eigenvalues"]
        assert lam.shape == (4,)
        assert abs(lam.sum() - 1.0) <= 1e-9
        assert node.item() == pytest.approx(spectral_entropy(lam))
