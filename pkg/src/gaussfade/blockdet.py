"""Determinant calculus for 4x4 matrices built from 2x2 complex blocks.

Everything here is exact linear algebra on tiny matrices: closed-form
determinant identities that replace a brute-force 4x4 determinant with a
handful of 2x2 products.  Products of the form det(X) * X^{-1} are always
evaluated through the adjugate, so every identity extends continuously to
singular blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "J",
    "BlockMatrix2x2",
    "adjugate",
    "det2",
    "det2_sum",
    "det4_block",
    "perp",
    "expand_full",
]

# Symplectic 2x2 form; J @ conj(v) rotates v onto its orthogonal companion.
J = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
J.flags.writeable = False


def _as_block(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {M.shape}")
    return M


def det2(M) -> complex:
    """Determinant of a 2x2 block."""
    M = _as_block(M)
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def adjugate(M) -> np.ndarray:
    """Adjugate of a 2x2 block: adjugate(M) @ M == det2(M) * I, always."""
    M = _as_block(M)
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=complex)


def det2_sum(A, B) -> complex:
    """det(A + B) expressed through the blocks: det A + det B - tr(A J B^T J)."""
    A, B = _as_block(A), _as_block(B)
    return det2(A) + det2(B) - np.trace(A @ J @ B.T @ J)


def det4_block(A, B, C, D) -> complex:
    """Determinant of the 4x4 matrix (A, D; C, B) from its 2x2 blocks.

    Equals det A det B + det C det D - tr(A J C^T J B J D^T J) for arbitrary
    complex blocks.
    """
    A, B = _as_block(A), _as_block(B)
    C, D = _as_block(C), _as_block(D)
    corr = np.trace(A @ J @ C.T @ J @ B @ J @ D.T @ J)
    return det2(A) * det2(B) + det2(C) * det2(D) - corr


def perp(v) -> np.ndarray:
    """Perpendicular companion J @ conj(v) of a complex 2-vector.

    Length-preserving, and v_perp is orthogonal to v under the bilinear
    pairing used by the expansion identities.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (2,):
        raise ValueError(f"expected a complex 2-vector, got shape {v.shape}")
    return J @ np.conj(v)


def expand_full(A, B, C, g: complex, h: complex, alpha, beta) -> complex:
    """Closed-form determinant of a rank-one-dressed 4x4 block matrix.

    Evaluates det(A + aa†, g* C† + h* ab†; g C + h ba†, B + bb†) for
    Hermitian A, B and arbitrary C, complex weights g, h and 2-vectors
    a = alpha, b = beta, as the sum of four structured terms:

      |g|^2 * det(A, C†; C, B)
      + (1 - |g|^2) * (det A det B - |g|^2 |det C|^2)
      + (1 - |h|^2) * det of the 2x2 quadratic-form matrix in (a_perp, b_perp)
      + sandwich of the block matrix S with the vector (b_perp; -a_perp)

    All det(X) * X^{-1} products appear as adjugates, so singular blocks
    (e.g. C = 0) are handled without special cases.
    """
    A, B, C = _as_block(A), _as_block(B), _as_block(C)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    ap, bp = perp(alpha), perp(beta)
    g2 = abs(g) ** 2

    base = det4_block(A, B, C, C.conj().T)
    t1 = g2 * base
    t2 = (1.0 - g2) * (det2(A) * det2(B) - g2 * det2(C) * np.conj(det2(C)))

    f11 = ap.conj() @ A @ ap
    f12 = np.conj(g) * (ap.conj() @ C.conj().T @ bp)
    f21 = g * (bp.conj() @ C @ ap)
    f22 = bp.conj() @ B @ bp
    t3 = (1.0 - abs(h) ** 2) * (f11 * f22 - f12 * f21)

    M11 = det2(A) * B - g2 * C @ adjugate(A) @ C.conj().T
    M12 = -np.conj(g) * h * (g2 * np.conj(det2(C)) * C - B @ adjugate(C.conj().T) @ A)
    M21 = -g * np.conj(h) * (g2 * det2(C) * C.conj().T - A @ adjugate(C) @ B)
    M22 = det2(B) * A - g2 * C.conj().T @ adjugate(B) @ C
    w = np.concatenate([bp, -ap])
    S = np.block([[M11, M12], [M21, M22]])
    t4 = w.conj() @ S @ w

    return t1 + t2 + t3 + t4


@dataclass(frozen=True)
class BlockMatrix2x2:
    """Four 2x2 complex blocks arranged as (A, D; C, B)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            blk = _as_block(getattr(self, name))
            if not np.all(np.isfinite(blk.view(float))):
                raise ValueError(f"block {name} has non-finite entries")
            object.__setattr__(self, name, blk)

    def assemble(self) -> np.ndarray:
        """The full 4x4 matrix (A, D; C, B)."""
        return np.block([[self.A, self.D], [self.C, self.B]])

    def det(self) -> complex:
        """Determinant via the block identity (no 4x4 elimination)."""
        return det4_block(self.A, self.B, self.C, self.D)
