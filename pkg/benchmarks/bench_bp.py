"""Compare the numba and numpy belief-propagation kernels.

    python3 benchmarks/bench_bp.py [--code r1/2-n4096] [--repetition 3] [--snr 0.5] [--frames 10]

Both kernels decode the same frames; the script checks that their outputs
agree bit for bit and prints mean wall time per frame. A second row uses
a fixed 200-iteration budget on a frame that does not converge.
"""
import argparse
import math
import time

import numpy as np

from spherical_cvqkd import _kernels
from spherical_cvqkd._accel import HAVE_NUMBA
from spherical_cvqkd.channel import ChannelModel, transmit
from spherical_cvqkd.gaussian import DetectorModel
from spherical_cvqkd.ldpc import load_code
from spherical_cvqkd.modulation import sample_sphere_points
from spherical_cvqkd.reconciliation import alice_llrs, bob_encode


def make_frames(code, snr, frames, seed):
    rng = np.random.default_rng(seed)
    V_A = 2 * snr
    x = sample_sphere_points(frames * code.frame_blocks, V_A, rng)
    y = transmit(x, ChannelModel(T=1.0), DetectorModel(eta=1.0), rng)
    fb = code.frame_blocks
    out = []
    for k in range(frames):
        sl = slice(k * fb, (k + 1) * fb)
        _, msg = bob_encode(y[sl], code, rng)
        llr = alice_llrs(x[sl], msg, math.sqrt(0.5), 1.0).reshape(code.repetition, -1)
        folded = llr[0] + (llr[1:] * (1.0 - 2.0 * msg.rep_syndrome)).sum(axis=0)
        out.append((folded, msg.ldpc_syndrome))
    return out


def time_kernel(kernel, h, frames, max_iter):
    results, t0 = [], time.perf_counter()
    for llr, syn in frames:
        results.append(kernel(llr, syn, h.check_ptr, h.edge_var, max_iter, _kernels.PHI_TABLE))
    return (time.perf_counter() - t0) / len(frames), results


def run(code_id="r1/2-n4096", repetition=3, snr=0.5, frames=10, seed=0):
    code = load_code(code_id, repetition=repetition)
    h = code.ldpc
    rows = []
    cases = [("converging", make_frames(code, snr, frames, seed), code.max_iter),
             ("200 iterations", make_frames(code, snr / 4, 2, seed + 1), 200)]
    if HAVE_NUMBA:  # compile outside the timed region
        f0 = cases[0][1][0]
        _kernels.bp_decode_numba(f0[0], f0[1], h.check_ptr, h.edge_var, 1, _kernels.PHI_TABLE)
    for label, data, max_iter in cases:
        t_np, r_np = time_kernel(_kernels.bp_decode_numpy, h, data, max_iter)
        if HAVE_NUMBA:
            t_nb, r_nb = time_kernel(_kernels.bp_decode_numba, h, data, max_iter)
            same = all(np.array_equal(a[0], b[0]) and a[1] == b[1] and a[2] == b[2]
                       for a, b in zip(r_np, r_nb))
        else:
            t_nb, same = float("nan"), True
        iters = float(np.mean([r[1] for r in r_np]))
        rows.append((label, iters, t_np, t_nb, same))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code", default="r1/2-n4096")
    ap.add_argument("--repetition", type=int, default=3)
    ap.add_argument("--snr", type=float, default=0.5)
    ap.add_argument("--frames", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    print(f"{'case':<16}{'iters':>8}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}  identical")
    for label, iters, t_np, t_nb, same in run(a.code, a.repetition, a.snr, a.frames, a.seed):
        print(f"{label:<16}{iters:8.1f}{1e3 * t_np:11.2f}{1e3 * t_nb:11.2f}{t_np / t_nb:9.2f}  {same}")


if __name__ == "__main__":
    main()
