import numpy as np
import pytest
from scipy.stats import ortho_group

from colvne.errors import NumericalError, ShapeError
from colvne.linalg import eigh_symmetric
from tests.conftest import random_unit_rows


def test_identity():
    decomp = eigh_symmetric(np.eye(2))
    np.testing.assert_allclose(decomp.eigenvalues, [1.0, 1.0], atol=1e-15)


def test_two_by_two_closed_form():
    decomp = eigh_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(decomp.eigenvalues, [3.0, 1.0], atol=1e-12)


def test_random_reconstruction(rng):
    a = rng.standard_normal((8, 8))
    z = a + a.T
    decomp = eigh_symmetric(z)
    u = decomp.eigenvectors
    assert np.max(np.abs(decomp.reconstruct() - z)) <= 1e-8 * np.max(np.abs(z))
    assert np.max(np.abs(u.T @ u - np.eye(8))) <= 1e-9
    assert np.all(np.diff(decomp.eigenvalues) <= 0)


def test_matches_numpy_spectrum(rng):
    a = rng.standard_normal((12, 12))
    z = a @ a.T
    decomp = eigh_symmetric(z)
    np.testing.assert_allclose(decomp.eigenvalues, np.linalg.eigvalsh(z)[::-1], atol=1e-9)


def test_autocorrelation_spectrum_is_distribution(rng):
    h = random_unit_rows(rng, 30, 6)
    lam = eigh_symmetric(h.T @ h / 30).eigenvalues
    assert lam.min() >= -1e-10
    assert abs(lam.sum() - 1.0) <= 1e-9


def test_invariant_under_orthogonal_conjugation(rng):
    a = rng.standard_normal((6, 6))
    z = a @ a.T
    q = ortho_group.rvs(6, random_state=3)
    base = eigh_symmetric(z).eigenvalues
    rotated = eigh_symmetric(q @ z @ q.T).eigenvalues
    np.testing.assert_allclose(rotated, base, atol=1e-9)


def test_non_square_rejected():
    with pytest.raises(ShapeError):
        eigh_symmetric(np.ones((2, 3)))


def test_non_finite_rejected():
    with pytest.raises(NumericalError):
        eigh_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_non_convergence_carries_residual(rng):
    a = rng.standard_normal((10, 10))
    with pytest.raises(NumericalError) as info:
        eigh_symmetric(a + a.T, max_sweeps=1)
    assert info.value.residual is not None and info.value.residual > 0
