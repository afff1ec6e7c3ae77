"""Tabulated data for the three rate/noise figures.

Each function returns ``(header, rows)`` ready for CSV output.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError
from .gaussian import DetectorModel
from .keyrate import RateParams, optimize_modulation, rate_at
from .modulation import correlation_summary

FIG1_GRID = np.round(np.arange(0.1, 5.0001, 0.1), 10)
FIG2_GRID = np.round(np.arange(0.25, 4.0001, 0.05), 10)
FIG2_BETAS = (0.8, 0.9)
FIG2_DISTANCE_KM = 50.0
FIG2_XI = 0.01
FIG3_BLOCK_LENGTHS = (1e8, 1e10, 1e12, 1e14)
FIG3_GRID = np.arange(0.0, 160.0001, 5.0)
FIG3_XI = 0.005
FIG_ETA = 0.6
FIG3_BETA = 0.8


def figure1(grid=FIG1_GRID):
    """Equivalent excess noise versus modulation variance."""
    rows = [(float(v), correlation_summary(float(v)).delta_xi) for v in grid]
    return ["V_A", "delta_xi"], rows


def figure2(grid=FIG2_GRID, betas=FIG2_BETAS, distance_km=FIG2_DISTANCE_KM, xi=FIG2_XI,
            det: DetectorModel | None = None, loss_db_per_km: float = 0.2):
    """Asymptotic rate at fixed distance versus modulation variance."""
    det = det or DetectorModel(eta=FIG_ETA)
    cols = []
    for beta in betas:
        p = RateParams(xi=xi, det=det, beta=beta, distance_km=distance_km,
                       loss_db_per_km=loss_db_per_km)
        cols.append([rate_at(float(v), p).K_asymptotic for v in grid])
    header = ["V_A"] + [f"K_beta_{b:g}" for b in betas]
    rows = [(float(v),) + tuple(c[i] for c in cols) for i, v in enumerate(grid)]
    return header, rows


def figure3(grid=FIG3_GRID, block_lengths=FIG3_BLOCK_LENGTHS, xi=FIG3_XI,
            det: DetectorModel | None = None, beta=FIG3_BETA, loss_db_per_km: float = 0.2,
            eps_pe: float = 1e-10):
    """Finite-size rate versus distance, one column per block length,
    with the modulation variance optimised at every point."""
    det = det or DetectorModel(eta=FIG_ETA)
    cols = []
    for N in block_lengths:
        col = []
        for d in grid:
            p = RateParams(xi=xi, det=det, beta=beta, distance_km=float(d),
                           loss_db_per_km=loss_db_per_km, N=N, eps_PE=eps_pe)
            col.append(optimize_modulation(p).K_finite)
        cols.append(col)
    header = ["distance_km"] + [f"K_N_{N:.0e}" for N in block_lengths]
    rows = [(float(d),) + tuple(c[i] for c in cols) for i, d in enumerate(grid)]
    return header, rows


def figure(which: int, **overrides):
    funcs = {1: figure1, 2: figure2, 3: figure3}
    if which not in funcs:
        raise UsageError(f"unknown figure {which}; choose 1, 2 or 3")
    return funcs[which](**overrides)
