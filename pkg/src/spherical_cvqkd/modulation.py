"""Eight-dimensional spherical constellation and its phase-space correlations.

Four successive coherent states form one block. Their quadrature
displacements ``(q0, p0, q1, p1, q2, p2, q3, p3)`` are drawn uniformly on
the sphere of radius ``sqrt(8*V_A)``, which gives every coordinate the
modulation variance ``V_A`` (coherent amplitude alpha maps to a
displacement ``2*Re(alpha)``, so ``V_A = 2*alpha**2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericError, UsageError

BLOCK_DIM = 8
MAX_SERIES_TERMS = 1_000_000
DEFAULT_REL_TOL = 1e-15


@dataclass(frozen=True)
class ModulationPoint:
    """One block of four coherent states as an 8-vector of displacements."""

    q: np.ndarray
    block: int = 0


@dataclass(frozen=True)
class CorrelationSummary:
    V_A: float
    Z: float
    Z_TMS: float
    F: float
    delta_xi: float
    truncation_terms: int
    truncation_bound: float


def sample_sphere_points(n_blocks: int, V_A: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n_blocks`` points uniformly on the sphere, shape ``(n_blocks, 8)``.

    Normalised Gaussian vectors; the (measure-zero) all-zero draws are redrawn.
    """
    if V_A <= 0:
        raise UsageError(f"V_A must be > 0, got {V_A}")
    g = rng.standard_normal((n_blocks, BLOCK_DIM))
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0
    while bad.any():
        g[bad] = rng.standard_normal((int(bad.sum()), BLOCK_DIM))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms == 0
    return g * (math.sqrt(BLOCK_DIM * V_A) / norms)[:, None]


def sample_sphere_point(V_A: float, rng: np.random.Generator, block: int = 0) -> ModulationPoint:
    return ModulationPoint(q=sample_sphere_points(1, V_A, rng)[0], block=block)


def z_tms(V_A: float) -> float:
    """Correlation of a two-mode squeezed vacuum with the same local variance."""
    if V_A < 0:
        raise UsageError(f"V_A must be >= 0, got {V_A}")
    return math.sqrt(V_A * V_A + 2 * V_A)


@lru_cache(maxsize=4096)
def _z_series(V_A: float, rel_tol: float, variant: str) -> tuple[float, int, float]:
    # variant "derived": powers of 2*V_A, the series obtained from the
    # four-mode entangled state; "printed": powers of V_A.
    x = 2 * V_A if variant == "derived" else V_A
    if 2 * V_A > 700:
        raise NumericError(f"V_A={V_A} too large: exp(-2 V_A) underflows")
    term = 0.5 * math.exp(-2 * V_A) * 2.0 * math.sqrt(x)  # k = 0: sqrt(4) * x^(1/2)
    total = 0.0
    k = 0
    while k < MAX_SERIES_TERMS:
        total += term
        nxt = term * x / (k + 1) * math.sqrt((k + 5) / (k + 4))
        # term ratios decrease monotonically in k, so once the next ratio
        # is below 1 the tail is bounded by a geometric series
        ratio = x / (k + 2) * math.sqrt((k + 6) / (k + 5))
        if ratio < 1:
            tail = nxt / (1 - ratio)
            if tail <= rel_tol * total:
                return total, k + 1, tail
        term = nxt
        k += 1
    raise NumericError(f"Z series did not converge within {MAX_SERIES_TERMS} terms (V_A={V_A})")


def z_correlation(V_A: float, rel_tol: float = DEFAULT_REL_TOL, variant: str = "derived") -> tuple[float, int]:
    """Phase-space correlation ``Z`` of the spherical modulation.

    Computes ``Z = 1/2 exp(-2 V_A) sum_k sqrt(k+4)/k! x^(k+1/2)`` with
    ``x = 2*V_A``. Terms follow the recurrence
    ``t_{k+1} = t_k * x/(k+1) * sqrt((k+5)/(k+4))`` and summation stops once
    a geometric tail bound drops below ``rel_tol`` times the partial sum.

    ``variant="printed"`` uses ``x = V_A`` instead; that form does not tend
    to ``Z_TMS`` at small ``V_A`` and is kept only for comparison.

    Returns
    -------
    (Z, terms_used)
    """
    if V_A <= 0:
        raise UsageError(f"V_A must be > 0, got {V_A}")
    if rel_tol <= 0:
        raise UsageError("rel_tol must be > 0")
    if variant not in ("derived", "printed"):
        raise UsageError(f"unknown Z variant {variant!r}")
    z, terms, _ = _z_series(float(V_A), float(rel_tol), variant)
    return z, terms


def correlation_summary(V_A: float, rel_tol: float = DEFAULT_REL_TOL,
                        variant: str = "derived") -> CorrelationSummary:
    if V_A <= 0:
        raise UsageError(f"V_A must be > 0, got {V_A}")
    z, terms, tail = _z_series(float(V_A), float(rel_tol), variant)
    zt = z_tms(V_A)
    f = (zt / z) ** 2
    return CorrelationSummary(V_A=V_A, Z=z, Z_TMS=zt, F=f, delta_xi=(f - 1) * V_A,
                              truncation_terms=terms, truncation_bound=tail)


def gaussian_equivalent_channel(V_A: float, T: float, xi: float,
                                rel_tol: float = DEFAULT_REL_TOL,
                                variant: str = "derived") -> tuple[float, float, CorrelationSummary]:
    """Map the physical channel ``(T, xi)`` to the Gaussian-modulation channel
    whose Holevo bound covers the spherical modulation.

    ``T_G = T/F`` and ``xi_G = F*xi + (F-1)*V_A`` with ``F = (Z_TMS/Z)**2``.
    """
    if not 0 < T <= 1:
        raise UsageError(f"T must lie in (0, 1], got {T}")
    if xi < 0:
        raise UsageError(f"xi must be >= 0, got {xi}")
    summary = correlation_summary(V_A, rel_tol, variant)
    f = summary.F
    return T / f, f * xi + (f - 1) * V_A, summary
