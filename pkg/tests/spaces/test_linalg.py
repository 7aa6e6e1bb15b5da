import numpy as np
import pytest

from modules.exceptions import DomainError
from modules.spaces.linalg import hermitian_jacobi, singular_values


def test_jacobi_diagonalises_random_hermitian():
    rng = np.random.default_rng(0)
    for m in (1, 2, 5, 9):
        B = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        H = B + B.conj().T
        eigenvalues, V = hermitian_jacobi(H)
        assert np.allclose(V @ np.diag(eigenvalues) @ V.conj().T, H, atol=1e-10)
        assert np.allclose(V.conj().T @ V, np.eye(m), atol=1e-12)
        assert np.allclose(np.sort(eigenvalues), np.linalg.eigvalsh(H), atol=1e-10)


def test_jacobi_rejects_non_square():
    with pytest.raises(DomainError):
        hermitian_jacobi(np.zeros((2, 3)))


def test_singular_values_sorted_descending():
    sigma = singular_values(np.diag([1.0, 3.0, 2.0]))
    assert sigma == pytest.approx([3.0, 2.0, 1.0], rel=1e-12)


def test_sweep_cap_is_logged(caplog):
    with caplog.at_level('WARNING', logger='modules.spaces.linalg'):
        hermitian_jacobi(np.array([[1.0, 1.0], [1.0, 2.0]]), max_sweeps=1)
    assert not caplog.records
    rng = np.random.default_rng(4)
    B = rng.normal(size=(6, 6))
    with caplog.at_level('WARNING', logger='modules.spaces.linalg'):
        hermitian_jacobi(B + B.T, max_sweeps=1)
    assert 'Jacobi stopped' in caplog.text
