"""Small dense complex linear algebra on numpy arrays."""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# identity followed by x, y, z; index order used by every Pauli-basis tensor
PAULI_BASIS = np.stack([np.eye(2, dtype=np.complex128), _PAULI["x"], _PAULI["y"], _PAULI["z"]])


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of 'x', 'y', 'z'") from None


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more square matrices, left to right."""
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def _square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(a @ b) as sum_ij a[i, j] b[j, i], without forming the product."""
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.einsum("ij,ji->", a, b))


def hermiticity_error(m: np.ndarray) -> float:
    m = _square(m)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def eigvalsh(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    err = hermiticity_error(m)
    if err > tol:
        raise ValueError(f"matrix is not Hermitian (max |M - M^dag| = {err:.3e})")
    return np.linalg.eigvalsh(np.asarray(m, dtype=np.complex128))


def is_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue is >= -tol.

    Raises ValueError for input that is not Hermitian within HERMITIAN_TOL.
    """
    return bool(eigvalsh(m)[0] >= -tol)
