"""Toeplitz-matrix universal hashing over GF(2)."""
from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .errors import NumericError, UsageError


def toeplitz_diagonals(n_in: int, out_len: int, seed) -> np.ndarray:
    """The ``n_in + out_len - 1`` random bits defining the hash matrix.

    Entry ``(i, j)`` of the ``out_len x n_in`` matrix is ``d[i - j + n_in - 1]``.
    """
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, n_in + out_len - 1, dtype=np.uint8)


def privacy_amplification(bits, seed, out_len: int) -> np.ndarray:
    """Compress ``bits`` to ``out_len`` bits with a seeded Toeplitz hash."""
    x = np.asarray(bits, dtype=np.uint8)
    n = x.size
    if out_len < 0 or out_len > n:
        raise UsageError(f"out_len={out_len} must lie in [0, {n}]")
    if out_len == 0:
        return np.zeros(0, dtype=np.uint8)
    d = toeplitz_diagonals(n, out_len, seed)
    # row i of the product is sum_j d[i - j + n - 1] x[j]: a slice of the full convolution
    conv = fftconvolve(d.astype(float), x.astype(float))[n - 1:n - 1 + out_len]
    counts = np.rint(conv)
    if np.max(np.abs(conv - counts)) > 0.25:  # pragma: no cover - would need ~1e12-bit inputs
        raise NumericError("FFT convolution lost integer precision")
    return (counts.astype(np.int64) & 1).astype(np.uint8)
