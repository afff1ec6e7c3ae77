"""Octonion arithmetic and the rotations used for reverse reconciliation.

Octonions are pairs of quaternions ``(a, b)`` with the Cayley-Dickson
product

    (a, b)(c, d) = (a c - conj(d) b,  d a + b conj(c)).

Basis products ``e_i e_j`` (row i, column j) for this convention::

          e0   e1   e2   e3   e4   e5   e6   e7
    e0 |  e0   e1   e2   e3   e4   e5   e6   e7
    e1 |  e1  -e0   e3  -e2   e5  -e4  -e7   e6
    e2 |  e2  -e3  -e0   e1   e6   e7  -e4  -e5
    e3 |  e3   e2  -e1  -e0   e7  -e6   e5  -e4
    e4 |  e4  -e5  -e6  -e7  -e0   e1   e2   e3
    e5 |  e5   e4  -e7   e6  -e1  -e0  -e3   e2
    e6 |  e6   e7   e4  -e5  -e2   e3  -e0  -e1
    e7 |  e7  -e6   e5   e4  -e3  -e2   e1  -e0

Left multiplication ``A_i: x -> e_i x`` is orthogonal, and for any unit
``y`` the vectors ``{A_i y}`` form an orthonormal frame. Bob publishes the
coordinates of his target ``u/|u|`` in that frame; the map
``M = sum_i alpha_i A_i`` is then left multiplication by the unit octonion
``alpha`` and sends ``y/|y|`` to ``u/|u|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError

#: ``e_i e_j = sign * e_k`` stored as ``sign * (k + 1)``.
DOCUMENTED_TABLE = (
    (1, 2, 3, 4, 5, 6, 7, 8),
    (2, -1, 4, -3, 6, -5, -8, 7),
    (3, -4, -1, 2, 7, 8, -5, -6),
    (4, 3, -2, -1, 8, -7, 6, -5),
    (5, -6, -7, -8, -1, 2, 3, 4),
    (6, 5, -8, 7, -2, -1, -4, 3),
    (7, 8, 5, -6, -3, 4, -1, -2),
    (8, -7, 6, 5, -4, -3, 2, -1),
)

_QCONJ = np.array([1.0, -1.0, -1.0, -1.0])
_OCONJ = np.array([1.0] + [-1.0] * 7)


def _qmul(a, b):
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def octonion_multiply(x, y) -> np.ndarray:
    """Product of octonions given as arrays with trailing dimension 8 (broadcasts)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = x[..., :4], x[..., 4:]
    c, d = y[..., :4], y[..., 4:]
    return np.concatenate([_qmul(a, c) - _qmul(d * _QCONJ, b),
                           _qmul(d, a) + _qmul(b, c * _QCONJ)], axis=-1)


def conjugate(x) -> np.ndarray:
    return np.asarray(x, dtype=float) * _OCONJ


@dataclass(frozen=True)
class Octonion:
    c: np.ndarray

    def __mul__(self, other: "Octonion") -> "Octonion":
        return Octonion(octonion_multiply(self.c, other.c))

    def conj(self) -> "Octonion":
        return Octonion(conjugate(self.c))

    def norm(self) -> float:
        return float(np.linalg.norm(self.c))


def _left_matrices() -> np.ndarray:
    eye = np.eye(8)
    # LEFT[i] @ x == e_i * x ; column k of LEFT[i] is e_i e_k
    return np.stack([octonion_multiply(eye[i], eye).T for i in range(8)])


LEFT_MATRICES = _left_matrices()


@dataclass(frozen=True)
class SideInformation:
    """Rotation coefficients and Bob's norm for one 8-dimensional block."""

    alpha: np.ndarray
    norm_y: float

    def matrix(self) -> np.ndarray:
        return np.tensordot(self.alpha, LEFT_MATRICES, axes=1)


def _unit_rows(v: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(v, axis=-1)
    if np.any(norms == 0):
        raise DegenerateInputError(f"{what} has zero norm")
    return v / norms[..., None], norms


def rotation_coefficients(y: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Batched ``alpha_i = <u/|u|, A_i y/|y|>``; inputs of shape ``(..., 8)``."""
    y_hat, _ = _unit_rows(np.asarray(y, dtype=float), "y")
    u_hat, _ = _unit_rows(np.asarray(u, dtype=float), "u")
    frame = np.einsum("ijk,...k->...ij", LEFT_MATRICES, y_hat)
    return np.einsum("...ij,...j->...i", frame, u_hat)


def rotation_from(y, u) -> SideInformation:
    """Side information for the rotation taking ``y/|y|`` to ``u/|u|``."""
    y = np.asarray(y, dtype=float)
    alpha = rotation_coefficients(y, u)
    return SideInformation(alpha=alpha, norm_y=float(np.linalg.norm(y)))


def apply_rotations(alpha: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``M x`` for batched coefficients, i.e. the octonion product ``alpha * x``."""
    return octonion_multiply(alpha, x)


def apply_rotation(si: SideInformation, x) -> np.ndarray:
    return apply_rotations(si.alpha, x)


def map_bits_to_hypercube(bits, norm_y) -> np.ndarray:
    """Hypercube vertex ``(-1)**bit_i * |y| / (2 sqrt 2)``; batches over leading axes."""
    bits = np.asarray(bits)
    norm_y = np.asarray(norm_y, dtype=float)
    return (1 - 2 * bits.astype(float)) * (norm_y[..., None] / (2 * math.sqrt(2)))
