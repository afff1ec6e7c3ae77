"""End-to-end simulated run: modulation, channel, estimation,
reconciliation and privacy amplification."""
from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .channel import transmit
from .config import RunConfig
from .errors import CVQKDError
from .estimation import EstimationResult, confidence_bounds, estimate, split_for_estimation
from .keyrate import COORDS_PER_BLOCK, KeyRateReport, finite_rate
from .ldpc import load_code
from .modulation import sample_sphere_points
from .privacy import privacy_amplification
from .reconciliation import ReconciliationResult, reconcile

log = logging.getLogger(__name__)


class KeyMismatchError(CVQKDError):
    """Reconciled or final keys differ although every check passed."""


@dataclass
class RunResult:
    config: RunConfig
    estimation: EstimationResult
    reconciliation: ReconciliationResult | None
    report: KeyRateReport | None
    pe_indices: np.ndarray
    key_length: int
    key_alice: np.ndarray
    key_bob: np.ndarray
    pa_seed: int
    notice: str

    def record(self) -> dict:
        """JSON-serialisable summary (keys themselves are written separately)."""
        est = {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
               for k, v in self.estimation.__dict__.items()}
        rec = self.reconciliation.summary() if self.reconciliation else None
        leakage = None
        if self.reconciliation:
            r = self.reconciliation
            leakage = {
                "syndrome_bits_per_frame": r.syndrome_bits_per_frame,
                "checksum_bits_per_frame": r.checksum_bits_per_frame,
                "leaked_bits_per_frame": r.leaked_bits_per_frame,
                "total_leaked_bits": r.leaked_bits_per_frame * r.n_frames,
            }
        report = self.report.to_dict() if self.report else None
        if report:
            report = {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                      for k, v in report.items()}
        return {
            "notice": self.notice,
            "key_length": self.key_length,
            "pa_seed": self.pa_seed,
            "estimation": est,
            "reconciliation": rec,
            "leakage": leakage,
            "key_rate": report,
        }


@contextmanager
def stage(name: str):
    """Tag any package or IO error raised inside with the protocol stage."""
    try:
        yield
    except (CVQKDError, OSError) as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


def final_key_length(report: KeyRateReport, n_coords_total: int, checksum_leak: int,
                     available: int) -> int:
    """``floor(N K_finite) - checksum bits``, clipped to ``[0, available]``."""
    if report.K_finite_raw is None or not math.isfinite(report.K_finite_raw):
        return 0
    length = math.floor(n_coords_total * report.K_finite_raw) - checksum_leak
    return int(min(max(length, 0), available))


def simulate(cfg: RunConfig, workers: int | None = None) -> RunResult:
    workers = cfg.workers if workers is None else workers
    ss = np.random.SeedSequence(cfg.seed)
    s_mod, s_chan, s_split, s_rec, s_pa = ss.spawn(5)
    empty = np.zeros(0, dtype=np.uint8)
    pa_seed = int(np.random.default_rng(s_pa).integers(0, 2**63 - 1))

    with stage("setup"):
        det = cfg.detector()
        ch = cfg.channel()
        code = load_code(cfg.code, repetition=cfg.repetition, max_iter=cfg.max_iter)
    with stage("modulation"):
        x = sample_sphere_points(cfg.N, cfg.V_A, np.random.default_rng(s_mod))
    with stage("channel"):
        y = transmit(x, ch, det, np.random.default_rng(s_chan))
    with stage("estimation"):
        pe_idx, key_idx = split_for_estimation(cfg.N, cfg.pe_fraction, np.random.default_rng(s_split))
        est = confidence_bounds(estimate(x[pe_idx], y[pe_idx]), cfg.eps_PE, det)
    log.info("estimation: T_hat=%.6g xi_hat=%.6g T_min=%.6g xi_max=%.6g",
             est.T_hat, est.xi_hat, est.T_min, est.xi_max)
    if est.inconclusive:
        return RunResult(cfg, est, None, None, pe_idx, 0, empty, empty, pa_seed,
                         "estimation inconclusive: no positive rate")

    with stage("reconciliation"):
        rec = reconcile(y[key_idx], x[key_idx], code, t=est.t_hat, sigma2=est.sigma2_hat,
                        seed=s_rec, workers=workers, V_A=cfg.V_A)
        if not np.array_equal(rec.bob_key, rec.alice_key):
            raise KeyMismatchError("reconciled strings differ on a frame that passed the checksum")
    log.info("reconciliation: %d/%d frames ok, beta=%.4f", int(rec.success.sum()), rec.n_frames,
             rec.measured_beta)

    n_total = COORDS_PER_BLOCK * cfg.N
    n_used = rec.n_frames * rec.frame_bits
    if n_used == 0:
        return RunResult(cfg, est, rec, None, pe_idx, 0, empty, empty, pa_seed,
                         "too few blocks for one code frame: no positive rate")
    with stage("key rate"):
        beta = min(rec.measured_beta, 1.0)
        report = finite_rate(cfg.V_A, est, det, beta, N=n_total, n=n_used,
                             eps_bar=cfg.eps_bar, eps_pa=cfg.eps_PA)
        length = final_key_length(report, n_total,
                                  rec.checksum_bits_per_frame * int(rec.success.sum()),
                                  rec.bob_key.size)
    with stage("privacy amplification"):
        key_bob = privacy_amplification(rec.bob_key, pa_seed, length)
        key_alice = privacy_amplification(rec.alice_key, pa_seed, length)
        if not np.array_equal(key_bob, key_alice):
            raise KeyMismatchError("final keys differ")
    notice = "ok" if length > 0 else "no positive rate"
    return RunResult(cfg, est, rec, report, pe_idx, length, key_alice, key_bob, pa_seed, notice)
