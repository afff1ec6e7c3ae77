"""Channel parameter estimation from disclosed samples.

Model per coordinate: ``y = t x + z`` with ``t = sqrt(eta T / 2)`` and
``Var(z) = sigma2 = 1 + eta T xi / 2 + v_el``. Worst-case parameters use
Gaussian-quantile confidence intervals at failure probability ``eps_PE``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm

from .errors import EstimationError, UsageError
from .gaussian import DetectorModel

DEFAULT_EPS_PE = 1e-10
DEFAULT_PE_FRACTION = 0.5


@dataclass(frozen=True)
class EstimationResult:
    t_hat: float
    sigma2_hat: float
    n_samples: int
    sum_x2: float
    t_low: float | None = None
    t_high: float | None = None
    sigma2_low: float | None = None
    sigma2_high: float | None = None
    T_hat: float | None = None
    xi_hat: float | None = None
    T_min: float | None = None
    xi_max: float | None = None
    epsilon_PE: float | None = None
    z_quantile: float | None = None
    inconclusive: bool = False


def estimate(xs, ys) -> EstimationResult:
    """Least-squares slope and residual variance of ``y`` on ``x``."""
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise EstimationError("xs and ys differ in length")
    if x.size < 2:
        raise EstimationError("need at least two samples")
    sxx = float(np.dot(x, x))
    if sxx == 0:
        raise EstimationError("all xs are zero")
    t_hat = float(np.dot(x, y)) / sxx
    resid = y - t_hat * x
    return EstimationResult(t_hat=t_hat, sigma2_hat=float(np.dot(resid, resid)) / x.size,
                            n_samples=int(x.size), sum_x2=sxx)


def z_quantile(eps: float) -> float:
    """``z`` with ``P(N(0,1) > z) = eps/2``."""
    if not 0 < eps <= 1:
        raise UsageError(f"epsilon must lie in (0, 1], got {eps}")
    return float(norm.isf(eps / 2))


def physical_params(t: float, sigma2: float, det: DetectorModel) -> tuple[float, float]:
    """Invert the heterodyne model: ``(T, xi)`` from ``(t, sigma2)``."""
    T = 2 * t * t / det.eta
    if T <= 0:
        return 0.0, math.inf
    return T, 2 * (sigma2 - 1 - det.v_el) / (det.eta * T)


def confidence_bounds(est: EstimationResult, epsilon_pe: float = DEFAULT_EPS_PE,
                      det: DetectorModel = DetectorModel()) -> EstimationResult:
    """Attach confidence intervals and worst-case ``(T_min, xi_max)``.

    ``T_min`` comes from the lower end of the slope interval and
    ``xi_max`` from the upper end of the noise interval evaluated at
    ``T_min``. A non-positive ``T_min`` marks the estimate inconclusive.
    """
    z = z_quantile(epsilon_pe)
    dt = z * math.sqrt(est.sigma2_hat / est.sum_x2)
    ds = z * math.sqrt(2.0 / est.n_samples)
    t_low, t_high = est.t_hat - dt, est.t_hat + dt
    s_low, s_high = est.sigma2_hat * (1 - ds), est.sigma2_hat * (1 + ds)
    T_hat, xi_hat = physical_params(est.t_hat, est.sigma2_hat, det)
    xi_hat = max(xi_hat, 0.0)

    inconclusive = t_low <= 0
    if inconclusive:
        T_min, xi_max = 0.0, math.inf
    else:
        T_min = min(2 * t_low * t_low / det.eta, 1.0)
        xi_max = max(2 * (s_high - 1 - det.v_el) / (det.eta * T_min), 0.0)
    return replace(est, t_low=t_low, t_high=t_high, sigma2_low=max(s_low, 0.0),
                   sigma2_high=s_high, T_hat=T_hat, xi_hat=xi_hat, T_min=T_min,
                   xi_max=xi_max, epsilon_PE=epsilon_pe, z_quantile=z,
                   inconclusive=inconclusive)


def expected_estimation(V_A: float, T: float, xi: float, det: DetectorModel, n_pe: int,
                        epsilon_pe: float = DEFAULT_EPS_PE) -> EstimationResult:
    """Bounds for a run whose point estimates hit the true values exactly.

    Used for rate curves at block lengths too large to simulate; the
    sample sums take their expected values ``sum x^2 = n_pe V_A``.
    """
    if n_pe < 2:
        raise EstimationError("need at least two estimation samples")
    t = math.sqrt(det.eta * T / 2)
    sigma2 = 1 + det.eta * T * xi / 2 + det.v_el
    est = EstimationResult(t_hat=t, sigma2_hat=sigma2, n_samples=int(n_pe), sum_x2=n_pe * V_A)
    return confidence_bounds(est, epsilon_pe, det)


def split_for_estimation(n_blocks: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Seeded uniform choice of disclosed blocks; returns sorted ``(pe_idx, key_idx)``."""
    if not 0 < fraction < 1:
        raise UsageError(f"estimation fraction must lie in (0, 1), got {fraction}")
    n_pe = int(round(n_blocks * fraction))
    perm = rng.permutation(n_blocks)
    return np.sort(perm[:n_pe]), np.sort(perm[n_pe:])
