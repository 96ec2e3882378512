"""Small dense complex linear algebra (d <= 27) on numpy arrays.

The functions here add shape/Hermiticity checks and fix output ordering;
the numerics are numpy's LAPACK bindings.
"""
from __future__ import annotations

import numpy as np

# algebraic identities / spectral results / rank decisions
TOL_EQ = 1e-10
TOL_EIG = 1e-9
TOL_RANK = 1e-8


class LinAlgDomainError(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise LinAlgDomainError(f"expected a 2-d array, got shape {a.shape}")
    return a


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise LinAlgDomainError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    return a @ b


def kron(*ms) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, as_matrix(m))
    return out


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def is_hermitian(m, tol: float = TOL_EIG) -> bool:
    a = as_matrix(m)
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def is_unitary(m, tol: float = TOL_EQ) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix."""
    a = as_matrix(m)
    if not is_hermitian(a):
        raise LinAlgDomainError("matrix is not Hermitian within 1e-9")
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def singular_values(m) -> np.ndarray:
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def frobenius(m) -> float:
    return float(np.linalg.norm(as_matrix(m), "fro"))
