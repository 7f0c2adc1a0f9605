"""Entanglement classes and genuine multipartite concurrence of rho(p, q)."""

from __future__ import annotations

import enum
import math

import numpy as np

from .states import SQRT3, XStateElements, require_valid

BOUNDARY_TOL = 1e-12


class EntanglementClass(str, enum.Enum):
    # declaration order is the nesting order used for tie-breaks
    SEPARABLE = "Separable"
    BISEPARABLE = "Biseparable"
    W = "W"
    GHZ = "GHZ"

    def is_genuine(self) -> bool:
        return self in (EntanglementClass.W, EntanglementClass.GHZ)

    def __str__(self) -> str:
        return self.value


def in_separable_polygon(p: float, q: float, tol: float = BOUNDARY_TOL) -> bool:
    """Membership in the closed quadrilateral (0,-1/(4sqrt3)), (1/8,0), (0,sqrt3/4), (-1/8,0)."""
    ap = abs(p)
    lower = 0.125 + 0.5 * SQRT3 * q
    upper = 0.125 - q / (2.0 * SQRT3)
    return ap <= lower + tol and ap <= upper + tol


def biseparable_limit(q: float) -> float:
    """Largest |p| of an at-most-biseparable state at this q."""
    return 0.375 - 0.5 * SQRT3 * q


def w_polynomial_sides(p: float, q: float) -> tuple[float, float, float]:
    """Both sides of the W-type quartic/quintic condition, plus a magnitude scale.

    Terms are accumulated with ``math.fsum``; the large integer coefficients
    otherwise cost several digits near the boundary curve.
    """
    s3 = SQRT3
    p2 = p * p
    lhs_terms = [
        9216.0 * p2 * p2,
        -6768.0 * p2,
        17856.0 * s3 * q * p2,
        -34560.0 * q**2 * p2,
        -1024.0 * s3 * q**3 * p2,
    ]
    rhs_terms = [
        1521.0,
        -5148.0 * s3 * q,
        13536.0 * q**2,
        2432.0 * s3 * q**3,
        -13056.0 * q**4,
        -3072.0 * s3 * q**5,
    ]
    scale = math.fsum(abs(t) for t in lhs_terms + rhs_terms)
    return math.fsum(lhs_terms), math.fsum(rhs_terms), scale


def classify(p: float, q: float) -> EntanglementClass:
    require_valid(p, q)
    if in_separable_polygon(p, q):
        return EntanglementClass.SEPARABLE
    if abs(p) <= biseparable_limit(q) + BOUNDARY_TOL:
        return EntanglementClass.BISEPARABLE
    lhs, rhs, scale = w_polynomial_sides(p, q)
    if lhs - rhs <= BOUNDARY_TOL * scale:
        return EntanglementClass.W
    return EntanglementClass.GHZ


def cgm_x(elems: XStateElements, tol: float = 1e-12) -> float:
    """Genuine multipartite concurrence of a three-qubit X state."""
    ab = np.array(elems.a) * np.array(elems.b)
    if np.any(ab < -tol):
        j = int(np.argmin(ab))
        raise ValueError(f"a_{j + 1} * b_{j + 1} = {ab[j]:.3e} is negative")
    roots = np.sqrt(np.clip(ab, 0.0, None))
    total = roots.sum()
    best = 0.0
    for i, z in enumerate(elems.z):
        best = max(best, abs(z) - (total - roots[i]))
    return 2.0 * best


def cgm_unclamped(p: float, q: float) -> float:
    require_valid(p, q)
    return 2.0 * abs(p) - 0.75 + SQRT3 * q


def cgm_closed_form(p: float, q: float) -> float:
    return max(0.0, cgm_unclamped(p, q))
