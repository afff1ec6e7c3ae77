import math
import os
import subprocess
import sys

import numpy as np
import pytest

from spherical_cvqkd import _kernels
from spherical_cvqkd._accel import DISABLE_ENV, HAVE_NUMBA
from spherical_cvqkd.errors import UsageError
from spherical_cvqkd.ldpc import (SHIPPED_CODES, CodeSpec, ParityCheckMatrix, build_regular_code,
                                  load_code, parse_code_id, read_code_file, write_code_file)


@pytest.fixture(scope="module")
def small_code():
    return build_regular_code(512, 0.5, seed=3)


def test_regular_structure(small_code):
    h = small_code.dense()
    assert h.shape == (256, 512)
    np.testing.assert_array_equal(h.sum(axis=0), 3)
    row_deg = h.sum(axis=1)
    assert row_deg.max() - row_deg.min() <= 1
    overlap = h.astype(np.int64) @ h.T.astype(np.int64)
    np.fill_diagonal(overlap, 0)
    assert overlap.max() <= 1  # no 4-cycles


def test_construction_is_deterministic():
    a = build_regular_code(256, 0.5, seed=9)
    b = build_regular_code(256, 0.5, seed=9)
    np.testing.assert_array_equal(a.edge_var, b.edge_var)
    c = build_regular_code(256, 0.5, seed=10)
    assert not np.array_equal(a.edge_var, c.edge_var)


def test_syndrome_matches_dense(small_code, rng):
    bits = rng.integers(0, 2, 512, dtype=np.uint8)
    np.testing.assert_array_equal(small_code.syndrome(bits), small_code.dense() @ bits % 2)


def _frame(h, rng, sigma):
    word = rng.integers(0, 2, h.cols, dtype=np.uint8)
    x = 1.0 - 2.0 * word + sigma * rng.standard_normal(h.cols)
    return word, 2 * x / sigma ** 2, h.syndrome(word)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("sigma", [0.5, 0.8, 1.2])
def test_numba_and_numpy_identical(small_code, sigma):
    rng = np.random.default_rng(int(sigma * 10))
    h = small_code
    for _ in range(5):
        _, llr, syn = _frame(h, rng, sigma)
        a = _kernels.bp_decode_numba(llr, syn, h.check_ptr, h.edge_var, 60, _kernels.PHI_TABLE)
        b = _kernels.bp_decode_numpy(llr, syn, h.check_ptr, h.edge_var, 60, _kernels.PHI_TABLE)
        np.testing.assert_array_equal(a[0], b[0])
        assert a[1] == b[1] and a[2] == b[2]


@pytest.mark.parametrize("use_numba", [False, True] if HAVE_NUMBA else [False])
def test_decoder_recovers_coset_word(small_code, use_numba):
    rng = np.random.default_rng(1)
    word, llr, syn = _frame(small_code, rng, 0.6)
    hard, iters, ok = _kernels.bp_decode(llr, syn, small_code.check_ptr, small_code.edge_var,
                                         100, use_numba=use_numba)
    assert ok and iters >= 1
    np.testing.assert_array_equal(hard, word)


def test_noiseless_frame_converges_in_one_iteration(small_code, rng):
    word = rng.integers(0, 2, small_code.cols, dtype=np.uint8)
    llr = 20.0 * (1.0 - 2.0 * word)
    hard, iters, ok = _kernels.bp_decode(llr, small_code.syndrome(word), small_code.check_ptr,
                                         small_code.edge_var, 50)
    assert ok and iters == 1
    np.testing.assert_array_equal(hard, word)


def test_phi_table_accuracy():
    x = np.linspace(1e-3, 40, 20001)
    exact = -np.log(np.tanh(np.maximum(x, 1e-10) / 2))
    assert np.max(np.abs(_kernels._phi(x, _kernels.PHI_TABLE) - exact)) < 5e-5
    # phi is an involution
    y = np.array([0.3, 1.0, 3.0])
    np.testing.assert_allclose(_kernels._phi(_kernels._phi(y, _kernels.PHI_TABLE), _kernels.PHI_TABLE),
                               y, rtol=1e-3)


def test_env_flag_disables_numba():
    code = "from spherical_cvqkd import _accel; print(_accel.USE_NUMBA)"
    env = dict(os.environ, **{DISABLE_ENV: "1"})
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_code_file_round_trip(small_code, tmp_path):
    path = tmp_path / "h.txt"
    write_code_file(small_code, path)
    first = path.read_text().splitlines()[0]
    assert first == f"{small_code.rows} {small_code.cols} {small_code.nnz}"
    back = read_code_file(path)
    np.testing.assert_array_equal(back.dense(), small_code.dense())
    spec = load_code(str(path), repetition=2)
    assert spec.frame_bits == 1024 and spec.rate == pytest.approx(0.25)


def test_code_file_errors(tmp_path):
    with pytest.raises(OSError):
        read_code_file(tmp_path / "missing.txt")
    bad = tmp_path / "bad.txt"
    bad.write_text("2 4 3\n0 0\n1 1\n")
    with pytest.raises(UsageError):
        read_code_file(bad)
    bad.write_text("2 4 x\n")
    with pytest.raises(UsageError):
        read_code_file(bad)
    bad.write_text("2 4 2\n0 0\n0 9\n")
    with pytest.raises(UsageError):
        read_code_file(bad)


def test_matrix_validation():
    with pytest.raises(UsageError):
        ParityCheckMatrix.from_pairs(2, 4, [0, 0], [1, 1])
    with pytest.raises(UsageError):
        ParityCheckMatrix.from_pairs(2, 4, [0], [1])


def test_code_ids_and_spec():
    assert parse_code_id("r1/2-n4096") == (0.5, 4096)
    assert "r1/2-n4096" in SHIPPED_CODES and len(SHIPPED_CODES) == 6
    with pytest.raises(UsageError):
        parse_code_id("half-4096")
    spec = load_code("r1/4-n1024", repetition=3)
    assert spec.ldpc.rows == 768 and spec.ldpc.cols == 1024
    assert spec.rate == pytest.approx(0.25 / 3)
    assert spec.frame_bits == 3072 and spec.frame_blocks == 384
    assert spec.syndrome_bits == 2 * 1024 + 768
    assert spec.leaked_bits == spec.syndrome_bits + 32
    with pytest.raises(UsageError):
        CodeSpec(spec.ldpc, repetition=0)


def test_load_code_is_cached():
    assert load_code("r1/2-n1024").ldpc is load_code("r1/2-n1024", repetition=2).ldpc
