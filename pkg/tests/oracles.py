"""Independent reference implementations used only by the tests.

None of these import the package. They take different routes to the
same quantities: mpmath series, Eve's side of the purification instead
of Alice's, dense matrices instead of FFTs, recursive Cayley-Dickson
products on nested tuples instead of the vectorised quaternion form.
"""
import math

import mpmath as mp
import numpy as np


# -- spherical modulation correlation ---------------------------------------

def z_series_mp(V_A, dps=60):
    """``Z = 1/2 e^{-2V} sum_k sqrt(k+4)/k! (2V)^{k+1/2}`` at high precision."""
    with mp.workdps(dps):
        V = mp.mpf(V_A)
        x = 2 * V
        s = mp.nsum(lambda k: mp.sqrt(k + 4) / mp.factorial(k) * x ** (k + mp.mpf(0.5)), [0, mp.inf])
        return mp.mpf(0.5) * mp.exp(-2 * V) * s


def delta_xi_mp(V_A, dps=60):
    with mp.workdps(dps):
        V = mp.mpf(V_A)
        zt2 = V * V + 2 * V
        return (zt2 / z_series_mp(V_A, dps) ** 2 - 1) * V


# -- Gaussian entropies -----------------------------------------------------

def g_mp(nu):
    with mp.workdps(40):
        nu = mp.mpf(nu)
        if nu == 1:
            return 0.0
        p, m = (nu + 1) / 2, (nu - 1) / 2
        return float(p * mp.log(p, 2) - m * mp.log(m, 2))


def _det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _block(g, i, j):
    return [[g[2 * i][2 * j], g[2 * i][2 * j + 1]], [g[2 * i + 1][2 * j], g[2 * i + 1][2 * j + 1]]]


def two_mode_symplectic(g):
    """Symplectic eigenvalues of a 4x4 list-of-lists covariance via the
    invariants ``Delta = det A + det B + 2 det C`` and ``det g``."""
    A, B, C = _block(g, 0, 0), _block(g, 1, 1), _block(g, 0, 1)
    delta = _det2(A) + _det2(B) + 2 * _det2(C)
    D = float(np.linalg.det(np.array(g)))
    disc = max(delta * delta - 4 * D, 0.0)
    return math.sqrt((delta + math.sqrt(disc)) / 2), math.sqrt(max((delta - math.sqrt(disc)) / 2, 0.0))


def _g(nu):
    if nu <= 1:
        return 0.0
    p, m = (nu + 1) / 2, (nu - 1) / 2
    return p * math.log2(p) - m * math.log2(m)


def eve_holevo(V_A, T, xi, eta=1.0, v_el=0.0, trusted=True):
    """Holevo information computed on Eve's entangling-cloner modes.

    Eve injects one half (E0) of an EPR pair of variance ``W`` into a
    beamsplitter of transmittance ``T`` and keeps the reflected mode E1 and
    the other half E2. ``chi = S(E1 E2) - S(E1 E2 | y)`` where ``y`` is
    Bob's heterodyne outcome after a detector of efficiency ``eta`` fed by
    thermal noise (trusted), or after folding the detector into the
    channel (untrusted). Per coherent state; mode-level variances.
    """
    if not trusted:
        T, xi = eta * T, xi + 2 * v_el / (eta * T)
        eta, v_el = 1.0, 0.0
    V = V_A + 1
    W = 1 + T * xi / (1 - T)
    sw = math.sqrt(W * W - 1)
    rt, rr = math.sqrt(T), math.sqrt(1 - T)
    # Eve's covariance, order (E1 q, E1 p, E2 q, E2 p)
    e11 = (1 - T) * V + T * W
    ce = rt * sw
    gE = [[e11, 0, ce, 0], [0, e11, 0, -ce], [ce, 0, W, 0], [0, -ce, 0, W]]
    # cross-covariances with Bob's mode B before the detector
    cb1 = rt * rr * (W - V)
    cb2 = rr * sw
    varB = T * V + (1 - T) * W
    if eta < 1:
        v = 1 + 2 * v_el / (1 - eta)
        varB = eta * varB + (1 - eta) * v
        cb1, cb2 = math.sqrt(eta) * cb1, math.sqrt(eta) * cb2
    # C: rows E1q,E1p,E2q,E2p ; cols Bq,Bp
    C = [[cb1, 0], [0, cb1], [cb2, 0], [0, -cb2]]
    inv = 1 / (varB + 1)  # heterodyne: condition on (Gamma_B + I)
    gEy = [[gE[i][j] - inv * (C[i][0] * C[j][0] + C[i][1] * C[j][1]) for j in range(4)] for i in range(4)]
    s_e = sum(_g(n) for n in two_mode_symplectic(gE))
    s_ey = sum(_g(n) for n in two_mode_symplectic(gEy))
    return s_e - s_ey


# -- BI-AWGN capacity -------------------------------------------------------

def biawgn_monte_carlo(s, n=10_000_000, seed=12345, chunk=1_000_000):
    """Sample-mean estimate of ``1 - E log2(1 + exp(-2s - 2 sqrt(s) w))``."""
    rng = np.random.default_rng(seed)
    acc = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        w = rng.standard_normal(m)
        acc += np.logaddexp(0.0, -2 * s - 2 * math.sqrt(s) * w).sum()
        done += m
    return 1 - acc / n / math.log(2)


# -- octonions ----------------------------------------------------------------

def _cd_conj(x):
    if not isinstance(x, tuple):
        return x
    return (_cd_conj(x[0]), _cd_neg(x[1]))


def _cd_neg(x):
    if not isinstance(x, tuple):
        return -x
    return (_cd_neg(x[0]), _cd_neg(x[1]))


def _cd_add(x, y):
    if not isinstance(x, tuple):
        return x + y
    return (_cd_add(x[0], y[0]), _cd_add(x[1], y[1]))


def _cd_mul(x, y):
    """Cayley-Dickson ``(a,b)(c,d) = (ac - d*b, da + bc*)`` on nested pairs of reals."""
    if not isinstance(x, tuple):
        return x * y
    a, b = x
    c, d = y
    return (_cd_add(_cd_mul(a, c), _cd_neg(_cd_mul(_cd_conj(d), b))),
            _cd_add(_cd_mul(d, a), _cd_mul(b, _cd_conj(c))))


def _nest(v):
    if len(v) == 1:
        return v[0]
    h = len(v) // 2
    return (_nest(v[:h]), _nest(v[h:]))


def _flat(x):
    if not isinstance(x, tuple):
        return [x]
    return _flat(x[0]) + _flat(x[1])


def octonion_product_reference(x, y):
    return _flat(_cd_mul(_nest(list(x)), _nest(list(y))))


def basis_table_reference():
    """``sign * (k + 1)`` for ``e_i e_j = sign * e_k``."""
    table = []
    for i in range(8):
        row = []
        for j in range(8):
            ei = [0.0] * 8
            ej = [0.0] * 8
            ei[i] = ej[j] = 1.0
            p = octonion_product_reference(ei, ej)
            k = max(range(8), key=lambda t: abs(p[t]))
            row.append(int(round(p[k])) * (k + 1))
        table.append(tuple(row))
    return tuple(table)


# -- Toeplitz hashing -------------------------------------------------------

def toeplitz_hash_dense(bits, diagonals, out_len):
    """Dense ``out_len x n`` Toeplitz product mod 2; ``T[i, j] = d[i - j + n - 1]``."""
    from scipy.linalg import toeplitz

    n = len(bits)
    d = np.asarray(diagonals, dtype=np.int64)
    col = d[n - 1:n - 1 + out_len]          # T[i, 0]
    row = d[n - 1::-1][:n]                  # T[0, j] = d[n - 1 - j]
    mat = toeplitz(col, row)
    return (mat @ np.asarray(bits, dtype=np.int64)) % 2


# -- key rate -----------------------------------------------------------------

def capacity_quad(s):
    """BI-AWGN capacity by adaptive quadrature over the noise density."""
    from scipy.integrate import quad

    if s == 0:
        return 0.0
    f = lambda w: math.exp(-w * w / 2) / math.sqrt(2 * math.pi) * np.logaddexp(
        0.0, -2 * s - 2 * math.sqrt(s) * w)
    val, _ = quad(f, -40, 40, epsabs=1e-14, epsrel=1e-13, limit=400)
    return 1 - val / math.log(2)


def asymptotic_rate_reference(V_A, T, xi, eta, v_el, trusted, beta):
    """``beta C(s) - chi/2`` per coordinate, from the oracles above."""
    z = float(z_series_mp(V_A))
    F = (V_A * V_A + 2 * V_A) / z ** 2
    T_G, xi_G = T / F, F * xi + (F - 1) * V_A
    s = (eta * T * V_A / 2) / (1 + eta * T * xi / 2 + v_el)
    return beta * capacity_quad(s) - eve_holevo(V_A, T_G, xi_G, eta, v_el, trusted) / 2
