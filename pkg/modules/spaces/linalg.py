"""Cyclic Jacobi eigensolver for small dense Hermitian matrices.

Used for singular values of Schatten-class points: the eigenvalues of
``A* A`` are the squared singular values of ``A``.
"""
import logging

import numpy as np

from modules.exceptions import DomainError

logger = logging.getLogger(__name__)

OFF_DIAGONAL_TOLERANCE = 1e-12
MAX_SWEEPS = 100


def _off_diagonal_mass(H):
    return np.sqrt(max(np.sum(np.abs(H) ** 2) - np.sum(np.abs(np.diag(H)) ** 2), 0.0))


def hermitian_jacobi(H, tolerance=OFF_DIAGONAL_TOLERANCE, max_sweeps=MAX_SWEEPS):
    """Diagonalise a Hermitian matrix by cyclic complex Givens rotations.

    Returns ``(eigenvalues, V)`` with ``H = V diag(eigenvalues) V*``. The
    loop stops once the off-diagonal Frobenius mass drops below
    ``max(tolerance, 1e-14 * ||H||_F)``.
    """
    H = np.array(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError(f'expected a square matrix, got shape {H.shape}')
    if not np.all(np.isfinite(H)):
        raise DomainError('matrix has non-finite entries')
    m = H.shape[0]
    V = np.eye(m, dtype=complex)
    threshold = max(tolerance, 1e-14 * np.linalg.norm(H))

    sweeps = 0
    while _off_diagonal_mass(H) > threshold and sweeps < max_sweeps:
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                r = abs(H[p, q])
                if r == 0.0:
                    continue
                phase = H[p, q] / r
                tau = (H[q, q].real - H[p, p].real) / (2.0 * r)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of the rotation; unitary, zeroes H[p, q]
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                H[:, cols] = H[:, cols] @ J
                H[cols, :] = J.conj().T @ H[cols, :]
                V[:, cols] = V[:, cols] @ J
    if _off_diagonal_mass(H) > threshold:
        logger.warning('Jacobi stopped after %d sweeps, off-diagonal mass %.3e',
                       sweeps, _off_diagonal_mass(H))
    return np.real(np.diag(H)).copy(), V


def singular_system(A):
    """Singular values of a square matrix and the right singular vectors."""
    A = np.asarray(A, dtype=complex)
    eigenvalues, V = hermitian_jacobi(A.conj().T @ A)
    sigma = np.sqrt(np.clip(eigenvalues, 0.0, None))
    order = np.argsort(-sigma, kind='stable')
    return sigma[order], V[:, order]


def singular_values(A):
    return singular_system(A)[0]
