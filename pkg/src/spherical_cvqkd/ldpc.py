"""LDPC codes: deterministic construction, text file format, syndromes.

File format (text)::

    rows cols nnz
    r0 c0
    r1 c1
    ...

one ``row col`` pair (0-based) per nonzero entry of the parity-check matrix.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import UsageError

DEFAULT_SEED = 20100701
CHECKSUM_BITS = 32
MAX_BP_ITER = 200

#: Code ids constructed on demand; all variable-regular with degree 3.
SHIPPED_CODES = tuple(f"r{r}-n{n}" for r in ("1/2", "1/4", "1/10") for n in (4096, 16384))

_ID_RE = re.compile(r"^r(\d+)/(\d+)-n(\d+)$")


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary matrix stored as edge lists sorted by (row, col)."""

    rows: int
    cols: int
    edge_check: np.ndarray
    edge_var: np.ndarray
    check_ptr: np.ndarray = field(repr=False)

    @classmethod
    def from_pairs(cls, rows: int, cols: int, r, c) -> "ParityCheckMatrix":
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        if r.size and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise UsageError("parity-check entry out of range")
        order = np.lexsort((c, r))
        r, c = r[order], c[order]
        if r.size > 1 and np.any((np.diff(r) == 0) & (np.diff(c) == 0)):
            raise UsageError("duplicate parity-check entry")
        counts = np.bincount(r, minlength=rows)
        if np.any(counts == 0):
            raise UsageError("parity-check matrix has an empty row")
        ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return cls(rows, cols, r, c, ptr)

    @property
    def nnz(self) -> int:
        return int(self.edge_var.size)

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        vals = np.asarray(bits, dtype=np.int64)[self.edge_var]
        return (np.add.reduceat(vals, self.check_ptr[:-1]) & 1).astype(np.uint8)

    def dense(self) -> np.ndarray:
        h = np.zeros((self.rows, self.cols), dtype=np.uint8)
        h[self.edge_check, self.edge_var] = 1
        return h


def build_regular_code(n: int, rate: float, var_degree: int = 3, seed: int = DEFAULT_SEED) -> ParityCheckMatrix:
    """Greedy progressive-edge-growth style construction.

    Edges are placed variable by variable on the lowest-degree check that
    does not close a 4-cycle (falling back to any unused check). Ties are
    broken by a generator seeded with ``seed``, so the result is
    reproducible.
    """
    m = int(round(n * (1 - rate)))
    if not 0 < m < n:
        raise UsageError(f"rate {rate} gives {m} checks for length {n}")
    if var_degree > m:
        raise UsageError("variable degree exceeds number of checks")
    rng = np.random.default_rng(seed)
    deg = np.zeros(m, dtype=np.int64)
    check_vars: list[list[int]] = [[] for _ in range(m)]
    var_checks: list[list[int]] = []
    pairs_r: list[int] = []
    pairs_c: list[int] = []
    for v in range(n):
        chosen: list[int] = []
        for _ in range(var_degree):
            allowed = np.ones(m, dtype=bool)
            allowed[chosen] = False
            strict = allowed.copy()
            for c in chosen:
                for u in check_vars[c]:
                    strict[var_checks[u]] = False
            pool = strict if strict.any() else allowed
            dmin = deg[pool].min()
            cand = np.flatnonzero(pool & (deg == dmin))
            c = int(cand[rng.integers(cand.size)])
            chosen.append(c)
            deg[c] += 1
        for c in chosen:
            check_vars[c].append(v)
            pairs_r.append(c)
            pairs_c.append(v)
        var_checks.append(chosen)
    return ParityCheckMatrix.from_pairs(m, n, pairs_r, pairs_c)


@dataclass(frozen=True)
class CodeSpec:
    """LDPC code concatenated with a repetition code of factor ``repetition``.

    Frame length in channel bits is ``ldpc.cols * repetition``.
    """

    ldpc: ParityCheckMatrix
    repetition: int = 1
    max_iter: int = MAX_BP_ITER
    checksum_bits: int = CHECKSUM_BITS
    name: str = "custom"

    def __post_init__(self):
        if self.repetition < 1:
            raise UsageError("repetition factor must be >= 1")
        if self.frame_bits % 8:
            raise UsageError("frame length must be a multiple of 8 bits")

    @property
    def ldpc_rate(self) -> float:
        return 1 - self.ldpc.rows / self.ldpc.cols

    @property
    def rate(self) -> float:
        return self.ldpc_rate / self.repetition

    @property
    def frame_bits(self) -> int:
        return self.ldpc.cols * self.repetition

    @property
    def frame_blocks(self) -> int:
        return self.frame_bits // 8

    @property
    def syndrome_bits(self) -> int:
        """Disclosed syndrome length: repetition checks plus LDPC checks."""
        return (self.repetition - 1) * self.ldpc.cols + self.ldpc.rows

    @property
    def leaked_bits(self) -> int:
        return self.syndrome_bits + self.checksum_bits

    def decode(self, llr: np.ndarray, syndrome: np.ndarray):
        return _kernels.bp_decode(np.ascontiguousarray(llr, dtype=np.float64),
                                  np.ascontiguousarray(syndrome, dtype=np.uint8),
                                  self.ldpc.check_ptr, self.ldpc.edge_var, self.max_iter)


def parse_code_id(code_id: str) -> tuple[Fraction, int]:
    m = _ID_RE.match(code_id)
    if not m:
        raise UsageError(f"bad code id {code_id!r}; expected e.g. 'r1/2-n4096'")
    return Fraction(int(m.group(1)), int(m.group(2))), int(m.group(3))


@lru_cache(maxsize=16)
def _cached_code(rate: Fraction, n: int, seed: int) -> ParityCheckMatrix:
    return build_regular_code(n, float(rate), seed=seed)


def load_code(code: str, repetition: int = 1, max_iter: int = MAX_BP_ITER,
              seed: int = DEFAULT_SEED) -> CodeSpec:
    """Resolve a code id (``'r1/2-n4096'``) or a path to a code file."""
    if _ID_RE.match(code):
        rate, n = parse_code_id(code)
        h = _cached_code(rate, n, seed)
    else:
        h = read_code_file(code)
    return CodeSpec(h, repetition=repetition, max_iter=max_iter, name=code)


def write_code_file(h: ParityCheckMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{h.rows} {h.cols} {h.nnz}\n")
        for r, c in zip(h.edge_check.tolist(), h.edge_var.tolist()):
            fh.write(f"{r} {c}\n")


def read_code_file(path) -> ParityCheckMatrix:
    """Read a parity-check matrix; raises ``OSError`` if the file is missing."""
    text = Path(path).read_text().split()
    try:
        rows, cols, nnz = (int(x) for x in text[:3])
        vals = np.array(text[3:], dtype=np.int64)
    except ValueError as exc:
        raise UsageError(f"malformed code file {path}: {exc}") from None
    if vals.size != 2 * nnz:
        raise UsageError(f"code file {path}: header says {nnz} entries, found {vals.size // 2}")
    return ParityCheckMatrix.from_pairs(rows, cols, vals[0::2], vals[1::2])
