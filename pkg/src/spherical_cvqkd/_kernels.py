"""Syndrome-constrained sum-product decoding kernels.

Messages live on edges, which are stored sorted by check node. Both
implementations use the same log-domain check update

    |r| = phi(sum_{e' != e} phi(|q_e'|)),  phi(x) = -log(tanh(x/2)),

and the same arithmetic, so their outputs are identical. ``phi`` is read
from a table with linear interpolation on ``[PHI_SMALL, PHI_TABLE_MAX]``
(absolute error below 5e-5) and evaluated exactly below ``PHI_SMALL``
where it is steep; this keeps the numba loop free of libm calls on the
common path.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

MSG_MIN = 1e-10
MSG_MAX = 40.0
PHI_SMALL = 1.0 / 16
PHI_SCALE = 1024.0
PHI_TABLE_MAX = 32.0


def _build_phi_table():
    x = np.arange(int(PHI_TABLE_MAX * PHI_SCALE) + 2) / PHI_SCALE
    with np.errstate(divide="ignore"):
        t = -np.log(np.tanh(x / 2.0))
    t[0] = t[1]  # never read: x < PHI_SMALL takes the exact branch
    return t


PHI_TABLE = _build_phi_table()


@njit
def _phi_scalar(x, table):
    if x < PHI_SMALL:
        if x < MSG_MIN:
            x = MSG_MIN
        return -math.log(math.tanh(x / 2.0))
    if x >= PHI_TABLE_MAX:
        return table[table.shape[0] - 2]
    u = x * PHI_SCALE
    i = int(u)
    f = u - i
    return table[i] + f * (table[i + 1] - table[i])


@njit
def bp_decode_numba(llr, syndrome, check_ptr, edge_var, max_iter, table):
    """Decode one frame; returns ``(hard_bits, iterations, converged)``."""
    n = llr.shape[0]
    m = check_ptr.shape[0] - 1
    n_edges = edge_var.shape[0]
    q = np.empty(n_edges)
    r = np.zeros(n_edges)
    phis = np.empty(n_edges)
    total = np.empty(n)
    hard = np.zeros(n, dtype=np.uint8)
    for e in range(n_edges):
        q[e] = llr[edge_var[e]]

    it = 0
    converged = False
    while it < max_iter:
        it += 1
        for c in range(m):
            s = 0.0
            neg = syndrome[c]
            for e in range(check_ptr[c], check_ptr[c + 1]):
                p = _phi_scalar(abs(q[e]), table)
                phis[e] = p
                s += p
                if q[e] < 0:
                    neg ^= 1
            for e in range(check_ptr[c], check_ptr[c + 1]):
                mag = _phi_scalar(s - phis[e], table)
                if mag > MSG_MAX:
                    mag = MSG_MAX
                sgn = neg
                if q[e] < 0:
                    sgn ^= 1
                r[e] = -mag if sgn else mag

        for v in range(n):
            total[v] = 0.0
        for e in range(n_edges):
            total[edge_var[e]] += r[e]
        for v in range(n):
            total[v] = llr[v] + total[v]
            hard[v] = 1 if total[v] < 0 else 0
        for e in range(n_edges):
            q[e] = total[edge_var[e]] - r[e]

        converged = True
        for c in range(m):
            par = syndrome[c]
            for e in range(check_ptr[c], check_ptr[c + 1]):
                par ^= hard[edge_var[e]]
            if par:
                converged = False
                break
        if converged:
            break
    return hard, it, converged


def _phi(x, table):
    small = x < PHI_SMALL
    xs = np.maximum(np.where(small, x, PHI_SMALL), MSG_MIN)
    u = np.minimum(x, PHI_TABLE_MAX) * PHI_SCALE
    i = u.astype(np.int64)
    f = u - i
    i = np.minimum(i, table.shape[0] - 2)
    f = np.where(x >= PHI_TABLE_MAX, 0.0, f)
    out = table[i] + f * (table[i + 1] - table[i])
    return np.where(small, -np.log(np.tanh(xs / 2.0)), out)


def bp_decode_numpy(llr, syndrome, check_ptr, edge_var, max_iter, table):
    """Vectorised counterpart of :func:`bp_decode_numba`."""
    n = llr.shape[0]
    starts = check_ptr[:-1]
    check_of_edge = np.repeat(np.arange(len(starts)), np.diff(check_ptr))
    syn = syndrome.astype(np.int64)
    q = llr[edge_var].astype(float)
    hard = np.zeros(n, dtype=np.uint8)
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        phis = _phi(np.abs(q), table)
        sums = np.add.reduceat(phis, starts)
        negs = (q < 0).astype(np.int64)
        parity = (np.add.reduceat(negs, starts) + syn) & 1
        mag = np.minimum(_phi(sums[check_of_edge] - phis, table), MSG_MAX)
        sgn = parity[check_of_edge] ^ negs
        r = np.where(sgn == 1, -mag, mag)

        total = llr + np.bincount(edge_var, weights=r, minlength=n)
        hard = (total < 0).astype(np.uint8)
        q = total[edge_var] - r

        chk = (np.add.reduceat(hard[edge_var].astype(np.int64), starts) + syn) & 1
        if not chk.any():
            converged = True
            break
    return hard, it, converged


def bp_decode(llr, syndrome, check_ptr, edge_var, max_iter, use_numba=None):
    """Dispatch to the compiled or the numpy kernel (default: module setting)."""
    if use_numba is None:
        use_numba = USE_NUMBA
    kernel = bp_decode_numba if use_numba else bp_decode_numpy
    return kernel(llr, syndrome, check_ptr, edge_var, max_iter, PHI_TABLE)
