"""Asymptotic and finite-size secret key rates.

Rates are in bits per quadrature coordinate (one heterodyne output).
Multiply by 2 for bits per coherent state and by 8 for bits per block;
the factors are recorded in every report under ``conversions``. The
Holevo term is stored in the same unit, i.e. half the per-mode value
returned by :func:`spherical_cvqkd.gaussian.holevo_bound`.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .channel import ChannelModel, distance_to_transmission, effective_snr
from .errors import UsageError
from .estimation import (DEFAULT_EPS_PE, DEFAULT_PE_FRACTION, EstimationResult,
                         expected_estimation)
from .gaussian import DetectorModel, holevo_bound
from .modulation import gaussian_equivalent_channel
from .reconciliation import biawgn_capacity

COORDS_PER_STATE = 2
COORDS_PER_BLOCK = 8
DEFAULT_EPS = 1e-10
#: constants (c1, c2) of Delta(n) = c1 sqrt(log2(2/eps_bar)/n) + c2/n log2(1/eps_PA)
DELTA_CONSTANTS = (7.0, 2.0)


@dataclass(frozen=True)
class KeyRateReport:
    # inputs
    V_A: float
    T: float
    xi: float
    eta: float
    v_el: float
    trusted: bool
    beta: float
    distance_km: float | None = None
    loss_db_per_km: float | None = None
    N: float | None = None
    n: float | None = None
    eps_PE: float | None = None
    eps_PA: float | None = None
    eps_bar: float | None = None
    # intermediates
    snr: float = 0.0
    mutual_info: float = 0.0
    Z: float = 0.0
    Z_TMS: float = 0.0
    F: float = 1.0
    delta_xi: float = 0.0
    T_G: float = 0.0
    xi_G: float = 0.0
    chi: float | None = None
    chi_point: float | None = None
    delta_n: float | None = None
    T_min: float | None = None
    xi_max: float | None = None
    # outputs
    K_asymptotic_raw: float = 0.0
    K_asymptotic: float = 0.0
    K_finite_raw: float | None = None
    K_finite: float | None = None
    finite: bool = False
    inconclusive: bool = False
    rate_unit: str = "bits per quadrature coordinate"
    conversions: dict = field(default_factory=lambda: {"per_coherent_state": COORDS_PER_STATE,
                                                       "per_block": COORDS_PER_BLOCK})

    @property
    def K(self) -> float:
        return self.K_finite if self.finite else self.K_asymptotic

    @property
    def mutual_info_per_block(self) -> float:
        return COORDS_PER_BLOCK * self.mutual_info

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "KeyRateReport":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown report fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "KeyRateReport":
        return cls.from_dict(json.loads(text))


def chi_per_coordinate(V_A: float, T: float, xi: float, det: DetectorModel):
    """Holevo term per coordinate on the Gaussian-equivalent channel."""
    T_G, xi_G, summary = gaussian_equivalent_channel(V_A, T, xi)
    return holevo_bound(V_A, T_G, xi_G, det) / COORDS_PER_STATE, T_G, xi_G, summary


def asymptotic_rate(V_A: float, T: float, xi: float, det: DetectorModel = DetectorModel(),
                    beta: float = 0.8, distance_km: float | None = None,
                    loss_db_per_km: float | None = None) -> KeyRateReport:
    """``K = beta * C(s) - chi`` with chi from the Gaussian-equivalent channel."""
    if not 0 <= beta <= 1:
        raise UsageError(f"beta must lie in [0, 1], got {beta}")
    s = effective_snr(V_A, ChannelModel(T=T, xi=xi), det)
    info = biawgn_capacity(s)
    chi, T_G, xi_G, summ = chi_per_coordinate(V_A, T, xi, det)
    k = beta * info - chi
    return KeyRateReport(
        V_A=V_A, T=T, xi=xi, eta=det.eta, v_el=det.v_el, trusted=det.trusted, beta=beta,
        distance_km=distance_km, loss_db_per_km=loss_db_per_km,
        snr=s, mutual_info=info, Z=summ.Z, Z_TMS=summ.Z_TMS, F=summ.F,
        delta_xi=summ.delta_xi, T_G=T_G, xi_G=xi_G, chi=chi,
        K_asymptotic_raw=k, K_asymptotic=max(k, 0.0),
    )


def finite_size_penalty(n: float, eps_bar: float = DEFAULT_EPS, eps_pa: float = DEFAULT_EPS,
                        constants=DELTA_CONSTANTS) -> float:
    c1, c2 = constants
    return c1 * math.sqrt(math.log2(2 / eps_bar) / n) + c2 / n * math.log2(1 / eps_pa)


def finite_rate(V_A: float, estimation: EstimationResult, det: DetectorModel, beta: float,
                N: float, n: float, eps_bar: float = DEFAULT_EPS, eps_pa: float = DEFAULT_EPS,
                distance_km: float | None = None, loss_db_per_km: float | None = None,
                constants=DELTA_CONSTANTS) -> KeyRateReport:
    """``K = (n/N) (beta C(s) - chi_worst - Delta(n))``.

    ``s`` uses the point estimates; ``chi_worst`` is evaluated at the
    estimation's ``(T_min, xi_max)``. ``N`` counts all coordinates and
    ``n`` those kept for the key.
    """
    if estimation.T_min is None:
        raise UsageError("estimation result carries no confidence bounds")
    if not 0 < n <= N:
        raise UsageError(f"need 0 < n <= N, got n={n}, N={N}")
    T_hat = min(estimation.T_hat, 1.0)
    xi_hat = estimation.xi_hat
    point = asymptotic_rate(V_A, T_hat, xi_hat, det, beta, distance_km, loss_db_per_km)
    delta = finite_size_penalty(n, eps_bar, eps_pa, constants)
    common = dict(N=N, n=n, eps_PE=estimation.epsilon_PE, eps_PA=eps_pa, eps_bar=eps_bar,
                  delta_n=delta, chi_point=point.chi, T_min=estimation.T_min,
                  xi_max=estimation.xi_max, finite=True)
    if estimation.inconclusive:
        return _replace(point, chi=None, K_finite_raw=-math.inf, K_finite=0.0,
                        inconclusive=True, **common)
    chi_w, T_G, xi_G, _ = chi_per_coordinate(V_A, estimation.T_min, estimation.xi_max, det)
    k = (n / N) * (beta * point.mutual_info - chi_w - delta)
    return _replace(point, chi=chi_w, T_G=T_G, xi_G=xi_G, K_finite_raw=k,
                    K_finite=max(k, 0.0), **common)


def _replace(report: KeyRateReport, **changes) -> KeyRateReport:
    data = report.to_dict()
    data.update(changes)
    return KeyRateReport(**data)


@dataclass(frozen=True)
class RateParams:
    """Fixed parameters of a rate evaluation; ``N=None`` means asymptotic."""

    xi: float = 0.01
    det: DetectorModel = DetectorModel()
    beta: float = 0.8
    T: float | None = None
    distance_km: float | None = None
    loss_db_per_km: float = 0.2
    N: float | None = None
    pe_fraction: float = DEFAULT_PE_FRACTION
    eps_PE: float = DEFAULT_EPS_PE
    eps_PA: float = DEFAULT_EPS
    eps_bar: float = DEFAULT_EPS

    def transmission(self) -> float:
        if self.T is not None:
            return self.T
        if self.distance_km is None:
            raise UsageError("either T or distance_km is required")
        return distance_to_transmission(self.distance_km, self.loss_db_per_km)


def rate_at(V_A: float, p: RateParams) -> KeyRateReport:
    T = p.transmission()
    dist = p.distance_km if p.T is None else None
    loss = p.loss_db_per_km if p.T is None else None
    if p.N is None:
        return asymptotic_rate(V_A, T, p.xi, p.det, p.beta, dist, loss)
    n_pe = p.N * p.pe_fraction
    est = expected_estimation(V_A, T, p.xi, p.det, n_pe, p.eps_PE)
    return finite_rate(V_A, est, p.det, p.beta, p.N, p.N - n_pe, p.eps_bar, p.eps_PA, dist, loss)


def _raw(report: KeyRateReport) -> float:
    return report.K_finite_raw if report.finite else report.K_asymptotic_raw


def optimize_modulation(p: RateParams, grid=None) -> KeyRateReport:
    """Maximise the unclamped rate over ``V_A``: grid bracket, then golden section."""
    grid = np.asarray(grid if grid is not None else np.geomspace(0.05, 20, 25))
    vals = np.array([_raw(rate_at(float(v), p)) for v in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == len(grid) - 1 or not np.isfinite(vals[i]):
        return rate_at(float(grid[i]), p)
    res = minimize_scalar(lambda v: -_raw(rate_at(v, p)), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          method="golden", options={"xtol": 1e-6})
    return rate_at(float(res.x), p)


AXES = ("V_A", "distance", "N")


def sweep(axis: str, grid, p: RateParams, V_A: float | None = None) -> list[KeyRateReport]:
    """One report per grid point; ``V_A=None`` optimises the modulation per point."""
    if axis not in AXES:
        raise UsageError(f"axis must be one of {AXES}")
    grid = list(grid)
    if not grid:
        raise UsageError("empty grid")
    out = []
    for g in grid:
        if axis == "V_A":
            out.append(rate_at(float(g), p))
            continue
        q = _with(p, distance_km=float(g), T=None) if axis == "distance" else _with(p, N=float(g))
        out.append(optimize_modulation(q) if V_A is None else rate_at(V_A, q))
    return out


def _with(p: RateParams, **changes) -> RateParams:
    data = {f.name: getattr(p, f.name) for f in fields(p)}
    data.update(changes)
    return RateParams(**data)


def achievable_distance(p: RateParams, d_max: float = 300.0, tol: float = 0.05) -> float:
    """Largest distance (km) with positive optimised rate; 0 if none."""
    def f(d):
        return _raw(optimize_modulation(_with(p, distance_km=d, T=None)))

    if f(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 10.0
    while f(hi) > 0:
        lo, hi = hi, hi * 2
        if hi > d_max:
            return d_max
    return brentq(f, lo, hi, xtol=tol)
