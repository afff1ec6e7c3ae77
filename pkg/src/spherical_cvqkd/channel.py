"""Linear quantum channel followed by heterodyne detection.

Per coordinate, Bob records ``y = sqrt(eta*T/2) * q + z`` with
``Var(z) = 1 + eta*T*xi/2 + v_el``. The 1/2 factors come from the
heterodyne beamsplitter: a mode of variance ``b`` heterodynes to
outcomes of variance ``(b+1)/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .gaussian import DetectorModel

NOISE_SHAPES = ("gaussian", "uniform", "laplace")
DEFAULT_LOSS_DB_PER_KM = 0.2


@dataclass(frozen=True)
class ChannelModel:
    """Linear channel ``X_out = g_x X_in + B_X``, ``P_out = g_p P_in + B_P``.

    ``xi`` is referred to the channel input. ``g_x``/``g_p`` default to
    ``sqrt(T)``; added noise of any shape is variance-matched.
    """

    T: float
    xi: float = 0.0
    noise_shape: str = "gaussian"
    g_x: float | None = None
    g_p: float | None = None

    def __post_init__(self):
        if not 0 < self.T <= 1:
            raise UsageError(f"T must lie in (0, 1], got {self.T}")
        if self.xi < 0:
            raise UsageError(f"xi must be >= 0, got {self.xi}")
        if self.noise_shape not in NOISE_SHAPES:
            raise UsageError(f"noise_shape must be one of {NOISE_SHAPES}")
        for g in (self.g_x, self.g_p):
            if g is not None and not 0 < g <= 1:
                raise UsageError(f"gain must lie in (0, 1], got {g}")

    @property
    def T_x(self) -> float:
        return self.T if self.g_x is None else self.g_x ** 2

    @property
    def T_p(self) -> float:
        return self.T if self.g_p is None else self.g_p ** 2

    def added_noise_variance(self) -> tuple[float, float]:
        """Mode-level variances of ``B_X`` and ``B_P`` (loss vacuum + excess)."""
        return (1 - self.T_x + self.T_x * self.xi, 1 - self.T_p + self.T_p * self.xi)


def distance_to_transmission(d_km: float, loss_db_per_km: float = DEFAULT_LOSS_DB_PER_KM) -> float:
    if d_km < 0:
        raise UsageError(f"distance must be >= 0, got {d_km}")
    return 10 ** (-loss_db_per_km * d_km / 10)


def _draw_noise(shape: str, size, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean, unit-variance samples of the requested shape."""
    if shape == "gaussian":
        return rng.standard_normal(size)
    if shape == "uniform":
        s3 = math.sqrt(3.0)
        return rng.uniform(-s3, s3, size)
    return rng.laplace(0.0, 1 / math.sqrt(2.0), size)


def heterodyne_params(ch: ChannelModel, det: DetectorModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate gain and noise variance for the 8 block coordinates."""
    tx, tp = ch.T_x, ch.T_p
    gains = np.array([math.sqrt(det.eta * t / 2) for t in (tx, tp)] * 4)
    var = np.array([1 + det.eta * t * ch.xi / 2 + det.v_el for t in (tx, tp)] * 4)
    return gains, var


def transmit(points, ch: ChannelModel, det: DetectorModel, rng: np.random.Generator) -> np.ndarray:
    """Bob's heterodyne records for Alice's blocks.

    Parameters
    ----------
    points : array_like, shape (n_blocks, 8)
        Displacements; a sequence of ``ModulationPoint`` is accepted too.
    """
    if len(points) and hasattr(points[0], "q"):
        points = np.stack([p.q for p in points])
    x = np.asarray(points, dtype=float)
    gains, var = heterodyne_params(ch, det)
    z = _draw_noise(ch.noise_shape, x.shape, rng) * np.sqrt(var)
    return gains * x + z


def effective_snr(V_A: float, ch: ChannelModel, det: DetectorModel) -> float:
    """Signal-to-noise ratio ``t**2 V_A / sigma**2`` of one heterodyne coordinate."""
    return (det.eta * ch.T * V_A / 2) / (1 + det.eta * ch.T * ch.xi / 2 + det.v_el)
