"""Small dense complex-matrix kernels behind the zero-forcing precoders."""

from __future__ import annotations

import numpy as np

# Reciprocal-condition floor for the Gram matrix; draws below it are
# reported as singular rather than repaired.
RCOND_FLOOR = 1e-12


class SingularChannel(Exception):
    """The stacked channel's Gram matrix is numerically singular."""


def right_pseudo_inverse(h: np.ndarray) -> np.ndarray:
    """Minimum-norm right inverse W = H^H (H H^H)^-1 of a wide matrix.

    H must have at least one row, no more rows than columns, and full row
    rank.  The result satisfies H @ W = I.  Computed through a reduced QR
    factorization of H^H (giving W = Q R^-H), which solves the Gram system
    (H H^H) X = I implicitly without squaring the condition number; no SVD
    is needed at these sizes.

    Raises
    ------
    SingularChannel
        If the Gram matrix's reciprocal condition estimate (the squared
        ratio of extreme R diagonals) falls below ``RCOND_FLOOR``.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {h.shape}")
    rows, cols = h.shape
    if rows > cols:
        raise ValueError(f"right inverse needs rows <= cols, got {h.shape}")
    if not np.all(np.isfinite(h.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    q, r = np.linalg.qr(h.conj().T)
    diag = np.abs(np.diagonal(r))
    if diag.min() <= 0.0 or (diag.min() / diag.max()) ** 2 < RCOND_FLOOR:
        raise SingularChannel(
            f"Gram matrix reciprocal condition below {RCOND_FLOOR:g}"
        )
    return q @ np.linalg.inv(r).conj().T


def column_squared_norms(w: np.ndarray) -> np.ndarray:
    """Per-column squared Euclidean norms of a matrix, as a real vector."""
    w = np.asarray(w)
    if w.ndim != 2 or w.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {w.shape}")
    return np.sum(np.abs(w) ** 2, axis=0)
