"""Two-mode Gaussian covariance algebra and the heterodyne Holevo bound.

All variances are in shot-noise units (vacuum variance 1). A two-mode
covariance matrix in standard form is

    [[a*I2,     c*sigma_z],
     [c*sigma_z, b*I2    ]]

with mode A held by Alice (the virtual EPR half) and mode B by Bob.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicalityError, UsageError

PHYSICALITY_TOL = 1e-9

_I2 = np.eye(2)
_SZ = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class TwoModeCov:
    """Symmetric two-mode covariance matrix in (a, b, c) standard form."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a < 1 - PHYSICALITY_TOL or self.b < 1 - PHYSICALITY_TOL:
            raise PhysicalityError(
                f"mode variances must be >= 1 SNU, got a={self.a}, b={self.b}")

    def matrix(self) -> np.ndarray:
        return np.block([[self.a * _I2, self.c * _SZ],
                         [self.c * _SZ, self.b * _I2]])


@dataclass(frozen=True)
class DetectorModel:
    """Heterodyne detector with efficiency ``eta`` and electronic noise ``v_el``.

    ``v_el`` is referred to each heterodyne output quadrature, so a
    perfect-efficiency detector reads vacuum with variance ``1 + v_el``.
    With ``trusted=True`` the detector imperfections are assumed outside
    Eve's control.
    """

    eta: float = 0.6
    v_el: float = 0.0
    trusted: bool = True

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise UsageError(f"eta must lie in (0, 1], got {self.eta}")
        if self.v_el < 0:
            raise UsageError(f"v_el must be >= 0, got {self.v_el}")


IDEAL_DETECTOR = DetectorModel(eta=1.0, v_el=0.0, trusted=True)


def symplectic_eigenvalues(cov: TwoModeCov) -> tuple[float, float]:
    """Return ``(nu1, nu2)`` with ``nu1 >= nu2`` for a two-mode state.

    Raises
    ------
    PhysicalityError
        If the smaller eigenvalue falls below 1 by more than the tolerance.
    """
    a, b, c = cov.a, cov.b, cov.c
    delta = a * a + b * b - 2 * c * c
    det = (a * b - c * c) ** 2
    disc = max(delta * delta - 4 * det, 0.0)
    root = math.sqrt(disc)
    nu1_sq = (delta + root) / 2
    # product form avoids cancellation for nearly pure states
    nu2_sq = det / nu1_sq if nu1_sq > 0 else 0.0
    nu1, nu2 = math.sqrt(max(nu1_sq, 0.0)), math.sqrt(max(nu2_sq, 0.0))
    if nu2 < 1 - PHYSICALITY_TOL:
        raise PhysicalityError(
            f"non-physical covariance (a={a}, b={b}, c={c}): nu2={nu2:.12g} < 1")
    return nu1, nu2


def symplectic_spectrum(gamma: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of an arbitrary ``2n x 2n`` covariance matrix.

    Uses the moduli of the eigenvalues of ``i*Omega*gamma``, which come in
    ``+/-`` pairs. Returned sorted in descending order.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.sort(np.abs(np.linalg.eigvals(1j * omega @ gamma)))[::-1]
    nus = ev[::2]
    if nus[-1] < 1 - PHYSICALITY_TOL:
        raise PhysicalityError(f"non-physical covariance: nu_min={nus[-1]:.12g} < 1")
    return nus


def g_entropy(nu: float) -> float:
    """Von Neumann entropy in bits of a thermal mode with symplectic eigenvalue ``nu``."""
    if nu < 1 - PHYSICALITY_TOL:
        raise PhysicalityError(f"symplectic eigenvalue {nu} < 1")
    if nu <= 1:
        return 0.0
    p = (nu + 1) / 2
    m = (nu - 1) / 2
    return p * math.log2(p) - m * math.log2(m)


def fold_untrusted_detector(T_G: float, xi_G: float, det: DetectorModel) -> tuple[float, float]:
    """Absorb an untrusted detector into the channel.

    Detector loss becomes channel loss and electronic noise becomes excess
    noise referred to the channel input: ``T <- eta*T`` and
    ``xi <- xi + 2*v_el/(eta*T)`` (the factor 2 converts per-quadrature
    heterodyne noise to mode variance).
    """
    folded_T = det.eta * T_G
    return folded_T, xi_G + 2 * det.v_el / folded_T


def _bob_cov(V_A: float, T_G: float, xi_G: float) -> TwoModeCov:
    z_tms = math.sqrt(V_A * V_A + 2 * V_A)
    return TwoModeCov(a=V_A + 1, b=1 + T_G * V_A + T_G * xi_G, c=math.sqrt(T_G) * z_tms)


def _conditional_entropy_trusted(cov: TwoModeCov, det: DetectorModel) -> float:
    """S(A F G | y) for a trusted detector modelled as beamsplitter + EPR ancilla."""
    eta = det.eta
    if eta == 1.0:
        if det.v_el > 0:
            raise UsageError("trusted electronic noise requires eta < 1 in the beamsplitter model")
        v = 1.0
    else:
        v = 1 + 2 * det.v_el / (1 - eta)
    cv = math.sqrt(max(v * v - 1, 0.0))

    # mode order: A, B, F0 (enters the beamsplitter), F (kept EPR half)
    g = np.zeros((8, 8))
    g[:4, :4] = cov.matrix()
    g[4:6, 4:6] = v * _I2
    g[6:8, 6:8] = v * _I2
    g[4:6, 6:8] = cv * _SZ
    g[6:8, 4:6] = cv * _SZ

    s = np.eye(8)
    te, re = math.sqrt(eta), math.sqrt(1 - eta)
    s[2:4, 2:4] = te * _I2
    s[2:4, 4:6] = re * _I2
    s[4:6, 2:4] = -re * _I2
    s[4:6, 4:6] = te * _I2
    g = s @ g @ s.T
    # after the beamsplitter: A, B' (measured), G, F

    keep = [0, 1, 4, 5, 6, 7]
    meas = [2, 3]
    g_keep = g[np.ix_(keep, keep)]
    cross = g[np.ix_(keep, meas)]
    g_meas = g[np.ix_(meas, meas)]
    g_cond = g_keep - cross @ np.linalg.solve(g_meas + _I2, cross.T)
    return sum(g_entropy(nu) for nu in symplectic_spectrum(g_cond))


def holevo_bound(V_A: float, T_G: float, xi_G: float, det: DetectorModel = IDEAL_DETECTOR) -> float:
    """Holevo information chi(y;E) in bits per coherent state.

    Eve is assumed to purify the Gaussian channel ``(T_G, xi_G)``; Bob's
    heterodyne outcome is the reference (reverse reconciliation).

    Parameters
    ----------
    V_A : float
        Modulation variance in SNU.
    T_G, xi_G : float
        Transmission and input-referred excess noise of the (Gaussian
        equivalent) channel.
    det : DetectorModel
        Trusted detectors are modelled by a beamsplitter of transmittance
        ``eta`` fed by an EPR ancilla; untrusted ones are folded into the
        channel before the bound is evaluated.

    Returns
    -------
    float
        ``S(E) - S(E|y)``, never negative.
    """
    if V_A < 0:
        raise UsageError(f"V_A must be >= 0, got {V_A}")
    if not 0 < T_G <= 1:
        raise UsageError(f"T_G must lie in (0, 1], got {T_G}")
    if V_A == 0:
        return 0.0
    if not det.trusted:
        T_G, xi_G = fold_untrusted_detector(T_G, xi_G, det)
    cov = _bob_cov(V_A, T_G, xi_G)
    s_e = sum(g_entropy(nu) for nu in symplectic_eigenvalues(cov))
    if det.trusted:
        s_cond = _conditional_entropy_trusted(cov, det)
    else:
        # heterodyne on B leaves A with variance a - c^2/(b+1)
        nu_cond = cov.a - cov.c ** 2 / (cov.b + 1)
        s_cond = g_entropy(nu_cond)
    return max(s_e - s_cond, 0.0)
