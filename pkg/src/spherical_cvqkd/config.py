"""Run configuration (JSON) for the command-line tools.

Every key is optional; unknown keys are rejected. Defaults follow the
figure parameters used throughout the package (eta = 0.6, xi = 0.01,
beta = 0.8, half of the blocks disclosed for estimation).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .channel import NOISE_SHAPES, ChannelModel, distance_to_transmission
from .errors import UsageError
from .gaussian import DetectorModel


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    # protocol
    V_A: float = 1.0
    N: int = 8192                 # blocks of four coherent states
    pe_fraction: float = 0.5
    code: str = "r1/2-n4096"
    repetition: int = 1
    max_iter: int = 200
    beta_target: float = 0.8
    # channel
    T: float | None = None
    distance_km: float | None = None
    loss_db_per_km: float = 0.2
    xi: float = 0.01
    noise_shape: str = "gaussian"
    g_x: float | None = None
    g_p: float | None = None
    # detector
    eta: float = 0.6
    v_el: float = 0.0
    trusted: bool = True
    # security parameters
    eps_PE: float = 1e-10
    eps_PA: float = 1e-10
    eps_bar: float = 1e-10
    # execution
    workers: int = 1
    out_dir: str = "run"

    def __post_init__(self):
        if self.N < 2:
            raise UsageError("N must be >= 2 blocks")
        if self.V_A <= 0:
            raise UsageError("V_A must be > 0")
        if self.noise_shape not in NOISE_SHAPES:
            raise UsageError(f"noise_shape must be one of {NOISE_SHAPES}")
        if self.T is not None and self.distance_km is not None:
            raise UsageError("give either T or distance_km, not both")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise UsageError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise UsageError(f"{path}: top level must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def transmission(self) -> float:
        if self.T is not None:
            return self.T
        if self.distance_km is not None:
            return distance_to_transmission(self.distance_km, self.loss_db_per_km)
        return 1.0

    def channel(self) -> ChannelModel:
        return ChannelModel(T=self.transmission(), xi=self.xi, noise_shape=self.noise_shape,
                            g_x=self.g_x, g_p=self.g_p)

    def detector(self) -> DetectorModel:
        return DetectorModel(eta=self.eta, v_el=self.v_el, trusted=self.trusted)
