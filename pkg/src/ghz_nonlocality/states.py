"""GHZ-symmetric three-qubit states rho(p, q) and their X-state structure.

Basis ordering is big-endian: index ``4*b1 + 2*b2 + b3`` for ``|b1 b2 b3>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)
Q_MIN = -1.0 / (4.0 * SQRT3)
Q_MAX = SQRT3 / 4.0
VALIDITY_SLACK = 1e-12
X_STATE_TOL = 1e-10

GHZ_PLUS = np.zeros(8)
GHZ_PLUS[[0, 7]] = 1.0 / np.sqrt(2.0)
GHZ_MINUS = GHZ_PLUS.copy()
GHZ_MINUS[7] *= -1.0


class InvalidStateError(ValueError):
    """Raised when (p, q) lies outside the GHZ-symmetric triangle."""

    def __init__(self, p: float, q: float, constraint: str):
        self.p, self.q, self.constraint = p, q, constraint
        super().__init__(f"(p={p!r}, q={q!r}) violates {constraint}")


@dataclass(frozen=True)
class GhzParams:
    p: float
    q: float

    def is_valid(self) -> bool:
        return validate(self.p, self.q)


def max_abs_p(q: float) -> float:
    """Largest |p| allowed at a given q."""
    return 0.125 + 0.5 * SQRT3 * q


def violated_constraint(p: float, q: float) -> str | None:
    if not (Q_MIN - VALIDITY_SLACK <= q <= Q_MAX + VALIDITY_SLACK):
        return "-1/(4*sqrt3) <= q <= sqrt3/4"
    if abs(p) > max_abs_p(q) + VALIDITY_SLACK:
        return "|p| <= 1/8 + (sqrt3/2)*q"
    return None


def validate(p: float, q: float) -> bool:
    """True iff rho(p, q) is a state; boundary points count as valid."""
    return violated_constraint(p, q) is None


def require_valid(p: float, q: float) -> None:
    bad = violated_constraint(p, q)
    if bad is not None:
        raise InvalidStateError(p, q, bad)


def density_matrix(p: float, q: float) -> np.ndarray:
    require_valid(p, q)
    w_plus = 2.0 * q / SQRT3 + p
    w_minus = 2.0 * q / SQRT3 - p
    w_mixed = 1.0 - 4.0 * q / SQRT3
    rho = (
        w_plus * np.outer(GHZ_PLUS, GHZ_PLUS)
        + w_minus * np.outer(GHZ_MINUS, GHZ_MINUS)
        + w_mixed * np.eye(8) / 8.0
    )
    return rho.astype(np.complex128)


def spectrum(p: float, q: float) -> np.ndarray:
    """Closed-form eigenvalues of rho(p, q), ascending."""
    top = 0.125 + 0.5 * SQRT3 * q
    rest = 0.125 - q / (2.0 * SQRT3)
    return np.sort(np.array([top + p, top - p] + [rest] * 6))


@dataclass(frozen=True)
class XStateElements:
    """Diagonal weights a_j, b_j and anti-diagonal coherences z_j, j = 1..4."""

    a: tuple[float, float, float, float]
    b: tuple[float, float, float, float]
    z: tuple[complex, complex, complex, complex]


def x_elements(rho: np.ndarray, tol: float = X_STATE_TOL) -> XStateElements:
    rho = np.asarray(rho)
    if rho.shape != (8, 8):
        raise ValueError(f"expected an 8x8 matrix, got shape {rho.shape}")
    idx = np.arange(8)
    mask = np.ones((8, 8), dtype=bool)
    mask[idx, idx] = False
    mask[idx, 7 - idx] = False
    off = np.abs(rho) * mask
    if off.max() > tol:
        i, j = np.unravel_index(np.argmax(off), off.shape)
        raise ValueError(f"not an X state: entry ({i}, {j}) = {rho[i, j]!r}")
    diag = np.real(np.diag(rho))
    a = tuple(float(x) for x in diag[:4])
    b = tuple(float(x) for x in diag[7:3:-1])  # b_1 sits at (7,7)
    z = tuple(complex(rho[j, 7 - j]) for j in range(4))
    return XStateElements(a=a, b=b, z=z)
