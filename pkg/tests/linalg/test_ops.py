import numpy as np
import pytest

from colvne.errors import ShapeError
from colvne.linalg import l2_normalize_rows, l2_normalize_rows_with_count, matmul, symmetrize


class TestMatmul:
    def test_identity(self):
        b = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), b), b)

    def test_orthogonal_supports(self):
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        b = np.array([[0.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(matmul(a, b), np.zeros((2, 2)))

    def test_hand_product(self):
        out = matmul(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[5.0, 6.0], [7.0, 8.0]]))
        np.testing.assert_array_equal(out, [[19.0, 22.0], [43.0, 50.0]])

    def test_inner_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


class TestNormalizeRows:
    def test_examples(self):
        out = l2_normalize_rows(np.array([[3.0, 4.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [1.0] * 4]))
        np.testing.assert_allclose(out[0], [0.6, 0.8, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(out[1], [1.0, 0.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(out[2], [0.5] * 4, atol=1e-15)

    def test_unit_norm(self, rng):
        out = l2_normalize_rows(rng.standard_normal((50, 7)) * 100)
        np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)

    def test_zero_row_replaced_with_e1(self):
        out, count = l2_normalize_rows_with_count(np.array([[0.0, 0.0, 0.0], [0.0, 2.0, 0.0]]))
        assert count == 1
        np.testing.assert_array_equal(out, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    def test_requires_matrix(self):
        with pytest.raises(ShapeError):
            l2_normalize_rows(np.ones(3))


def test_symmetrize():
    z = np.array([[1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_array_equal(symmetrize(z), [[1.0, 1.0], [1.0, 3.0]])
