"""Reverse reconciliation of the spherical modulation.

Per frame of ``code.frame_blocks`` blocks:

1. Bob draws uniform bits ``u``, maps each byte to the hypercube vertex of
   radius ``|y|``, and publishes the octonion coefficients taking ``y`` to
   that vertex together with ``|y|``.
2. Bob publishes the syndrome of ``u`` under LDPC x repetition: the
   repetition part relates every copy ``u[j + r*n]`` to ``u[j]``, the LDPC
   part is ``H u[:n]``. A CRC-32 of ``u[:n]`` is sent as a checksum.
3. Alice rotates her own block, forms LLRs, folds the repetition copies
   onto ``u[:n]`` and runs syndrome-constrained belief propagation.

The reconciled string of a frame is ``u[:n]`` (n = LDPC length).
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel, transmit
from .errors import UsageError
from .gaussian import DetectorModel
from .ldpc import CodeSpec
from .modulation import sample_sphere_points
from .octonion import apply_rotations, map_bits_to_hypercube, rotation_coefficients

GH_NODES = 128
_GH_X, _GH_W = np.polynomial.hermite_e.hermegauss(GH_NODES)
_GH_W = _GH_W / _GH_W.sum()


def biawgn_capacity(s: float) -> float:
    """Capacity in bits of the binary-input AWGN channel at SNR ``s``.

    ``C(s) = 1 - E_w[log2(1 + exp(-2s - 2 sqrt(s) w))]`` with ``w`` standard
    normal, by Gauss-Hermite quadrature.
    """
    if s < 0:
        raise UsageError(f"SNR must be >= 0, got {s}")
    if s == 0:
        return 0.0
    arg = -2 * s - 2 * math.sqrt(s) * _GH_X
    return float(1 - np.dot(_GH_W, np.logaddexp(0.0, arg)) / math.log(2))


def crc32_bits(bits: np.ndarray) -> int:
    return zlib.crc32(np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes())


@dataclass
class BobMessage:
    """Everything Bob discloses for one frame."""

    alpha: np.ndarray        # (frame_blocks, 8)
    norm_y: np.ndarray       # (frame_blocks,)
    rep_syndrome: np.ndarray  # (repetition - 1, n)
    ldpc_syndrome: np.ndarray
    checksum: int


def bob_encode(y_frame: np.ndarray, code: CodeSpec, rng: np.random.Generator) -> tuple[np.ndarray, BobMessage]:
    """Bob's side for one frame; returns his reconciled bits and the message."""
    n = code.ldpc.cols
    bits = rng.integers(0, 2, code.frame_bits, dtype=np.uint8)
    norm_y = np.linalg.norm(y_frame, axis=1)
    u = map_bits_to_hypercube(bits.reshape(-1, 8), norm_y)
    alpha = rotation_coefficients(y_frame, u)
    copies = bits.reshape(code.repetition, n)
    rep_syn = copies[1:] ^ copies[0]
    key = copies[0].copy()
    msg = BobMessage(alpha=alpha, norm_y=norm_y, rep_syndrome=rep_syn,
                     ldpc_syndrome=code.ldpc.syndrome(key), checksum=crc32_bits(key))
    return key, msg


def alice_llrs(x_frame: np.ndarray, msg: BobMessage, t: float, sigma2: float) -> np.ndarray:
    """Per-bit LLRs (positive favours bit 0) of Bob's full frame string."""
    v = apply_rotations(msg.alpha, x_frame)
    amp = msg.norm_y / (2 * math.sqrt(2))
    return (2 * t * amp[:, None] * v / sigma2).ravel()


def alice_decode(x_frame: np.ndarray, msg: BobMessage, code: CodeSpec, t: float, sigma2: float):
    """Alice's side for one frame: ``(bits, success, iterations)``."""
    n = code.ldpc.cols
    llr = alice_llrs(x_frame, msg, t, sigma2).reshape(code.repetition, n)
    signs = 1.0 - 2.0 * msg.rep_syndrome
    folded = llr[0] + (llr[1:] * signs).sum(axis=0)
    bits, iters, converged = code.decode(folded, msg.ldpc_syndrome)
    success = bool(converged) and crc32_bits(bits) == msg.checksum
    return bits, success, int(iters)


@dataclass
class ReconciliationResult:
    bob_key: np.ndarray
    alice_key: np.ndarray
    success: np.ndarray
    iterations: np.ndarray
    frame_error_rate: float
    snr: float
    capacity: float
    measured_beta: float
    code_rate: float
    frame_bits: int
    key_bits_per_frame: int
    syndrome_bits_per_frame: int
    checksum_bits_per_frame: int
    extra: dict = field(default_factory=dict)

    @property
    def leaked_bits_per_frame(self) -> int:
        return self.syndrome_bits_per_frame + self.checksum_bits_per_frame

    @property
    def n_frames(self) -> int:
        return int(self.success.size)

    def summary(self) -> dict:
        return {
            "frames": self.n_frames,
            "frames_ok": int(self.success.sum()),
            "frame_error_rate": self.frame_error_rate,
            "snr": self.snr,
            "capacity": self.capacity,
            "code_rate": self.code_rate,
            "measured_beta": self.measured_beta,
            "frame_bits": self.frame_bits,
            "key_bits_per_frame": self.key_bits_per_frame,
            "syndrome_bits_per_frame": self.syndrome_bits_per_frame,
            "checksum_bits_per_frame": self.checksum_bits_per_frame,
            "leaked_bits_per_frame": self.leaked_bits_per_frame,
            "mean_iterations": float(self.iterations.mean()) if self.iterations.size else 0.0,
        }


def reconcile(bob_blocks: np.ndarray, alice_blocks: np.ndarray, code: CodeSpec,
              t: float, sigma2: float, seed=None, workers: int = 1,
              V_A: float | None = None) -> ReconciliationResult:
    """Run reverse reconciliation over whole frames of blocks.

    Parameters
    ----------
    bob_blocks, alice_blocks : ndarray, shape (n_blocks, 8)
        Bob's heterodyne records and Alice's displacements. Blocks that do
        not fill a complete frame are dropped.
    t, sigma2 : float
        Channel gain and noise variance used by Alice for her LLRs
        (normally the estimated values).
    seed
        Seed for Bob's random bits; frame ``k`` uses the ``k``-th child of
        ``SeedSequence(seed)``, so results do not depend on ``workers``.
    V_A : float, optional
        Modulation variance for the SNR ``t**2 V_A / sigma2`` that enters
        the efficiency; defaults to the empirical per-coordinate power.
    """
    bob_blocks = np.asarray(bob_blocks, dtype=float)
    alice_blocks = np.asarray(alice_blocks, dtype=float)
    if bob_blocks.shape != alice_blocks.shape or bob_blocks.ndim != 2 or bob_blocks.shape[1] != 8:
        raise UsageError(f"block arrays must both be (n, 8); got {bob_blocks.shape} and {alice_blocks.shape}")
    fb = code.frame_blocks
    n_frames = bob_blocks.shape[0] // fb
    if V_A is None:
        V_A = float(np.mean(alice_blocks ** 2)) if alice_blocks.size else 0.0
    snr = t * t * V_A / sigma2
    cap = biawgn_capacity(snr)

    if isinstance(seed, np.random.SeedSequence):
        # fresh copy: spawning mutates the sequence's child counter
        root = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        root = np.random.SeedSequence(seed)
    seeds = root.spawn(n_frames)

    def run_frame(k):
        sl = slice(k * fb, (k + 1) * fb)
        bob_key, msg = bob_encode(bob_blocks[sl], code, np.random.default_rng(seeds[k]))
        alice_key, ok, iters = alice_decode(alice_blocks[sl], msg, code, t, sigma2)
        return bob_key, alice_key, ok, iters

    if workers > 1 and n_frames > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            frames = list(pool.map(run_frame, range(n_frames)))
    else:
        frames = [run_frame(k) for k in range(n_frames)]

    success = np.array([f[2] for f in frames], dtype=bool)
    iterations = np.array([f[3] for f in frames], dtype=np.int64)
    empty = np.zeros(0, dtype=np.uint8)
    bob_key = np.concatenate([f[0] for f, ok in zip(frames, success) if ok] or [empty])
    alice_key = np.concatenate([f[1] for f, ok in zip(frames, success) if ok] or [empty])
    fer = float(1 - success.mean()) if n_frames else 1.0
    beta = code.rate * (1 - fer) / cap if cap > 0 else 0.0
    return ReconciliationResult(
        bob_key=bob_key, alice_key=alice_key, success=success, iterations=iterations,
        frame_error_rate=fer, snr=snr, capacity=cap, measured_beta=beta,
        code_rate=code.rate, frame_bits=code.frame_bits,
        key_bits_per_frame=code.ldpc.cols, syndrome_bits_per_frame=code.syndrome_bits,
        checksum_bits_per_frame=code.checksum_bits,
    )


def benchmark_point(code: CodeSpec, snr: float, frames: int, seed=0, workers: int = 1) -> ReconciliationResult:
    """Reconcile ``frames`` frames over an ideal channel tuned to SNR ``snr``.

    Uses ``T = 1``, ``xi = 0``, a perfect detector and ``V_A = 2 snr``, so the
    per-coordinate gain is ``sqrt(1/2)`` and the noise variance is 1.
    """
    if snr <= 0:
        raise UsageError(f"SNR must be > 0, got {snr}")
    s_mod, s_chan, s_rec = np.random.SeedSequence(seed).spawn(3)
    V_A = 2 * snr
    n_blocks = frames * code.frame_blocks
    x = sample_sphere_points(n_blocks, V_A, np.random.default_rng(s_mod))
    y = transmit(x, ChannelModel(T=1.0), DetectorModel(eta=1.0), np.random.default_rng(s_chan))
    return reconcile(y, x, code, t=math.sqrt(0.5), sigma2=1.0, seed=s_rec, workers=workers, V_A=V_A)
