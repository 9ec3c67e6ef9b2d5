"""Kernel selection for the hot integer-transform loops.

Two interchangeable implementations of the batched shift-add matrix
evaluation exist: a numba ``@njit`` kernel and a pure-numpy fallback.
Both are multiplier-free in structure (every product with a basis
constant is expanded into left shifts and adds, mirroring the modeled
datapath) and produce bit-identical results.

Selection: numba is used when importable unless the environment
variable ``WFCODEC_NO_NUMBA`` is set to a truthy value, in which case
the numpy path runs.  ``benchmarks/bench_kernels.py`` times the two
paths against each other.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("WFCODEC_NO_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but stay importable
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def bit_terms(c: int) -> list[int]:
    """Shift amounts of the binary decomposition of a positive constant."""
    if c <= 0:
        raise ValueError(f"constant must be positive, got {c}")
    return [s for s in range(c.bit_length()) if (c >> s) & 1]


def build_term_tables(mat: np.ndarray):
    """Flatten a signed integer matrix into shift-add term tables.

    Entry (k, n) of ``mat`` owns the terms ``offsets[k*N+n] ..
    offsets[k*N+n+1]``; each term contributes ``sign * (x << shift)``
    to output k.  Zero entries own no terms.
    """
    n = mat.shape[0]
    shifts: list[int] = []
    signs: list[int] = []
    offsets = np.zeros(n * n + 1, dtype=np.int32)
    flat = mat.ravel()
    for i, c in enumerate(flat):
        c = int(c)
        if c != 0:
            sgn = 1 if c > 0 else -1
            for s in bit_terms(abs(c)):
                shifts.append(s)
                signs.append(sgn)
        offsets[i + 1] = len(shifts)
    return (
        offsets,
        np.asarray(shifts, dtype=np.int8),
        np.asarray(signs, dtype=np.int8),
    )


@njit(cache=True)
def _int_matvec_terms(x, offsets, shifts, signs, rshift, out):  # pragma: no cover - jitted
    nw, n = x.shape
    half = 1 << (rshift - 1)
    for w in range(nw):
        for k in range(n):
            acc = np.int64(0)
            base = k * n
            for j in range(n):
                xv = x[w, j]
                for t in range(offsets[base + j], offsets[base + j + 1]):
                    if signs[t] > 0:
                        acc += xv << shifts[t]
                    else:
                        acc -= xv << shifts[t]
            out[w, k] = (acc + half) >> rshift
    return out


def int_matvec_numba(x: np.ndarray, tables, rshift: int) -> np.ndarray:
    """Jitted batched shift-add evaluation; ``x`` is (n_windows, N) int64."""
    offsets, shifts, signs = tables
    out = np.empty_like(x)
    _int_matvec_terms(x, offsets, shifts, signs, rshift, out)
    return out


def int_matvec_numpy(x: np.ndarray, mat: np.ndarray, rshift: int) -> np.ndarray:
    """Vectorized fallback: same shift-add structure, products shared per constant."""
    nw, n = x.shape
    prods: dict[int, np.ndarray] = {}
    for c in sorted({abs(int(v)) for v in mat.ravel() if v != 0}):
        acc = None
        for s in bit_terms(c):
            term = np.left_shift(x, s)
            acc = term if acc is None else acc + term
        prods[c] = acc
    out = np.empty((nw, n), dtype=np.int64)
    half = np.int64(1) << (rshift - 1)
    for k in range(n):
        acc = np.zeros(nw, dtype=np.int64)
        for j in range(n):
            c = int(mat[k, j])
            if c == 0:
                continue
            col = prods[abs(c)][:, j]
            if c > 0:
                acc += col
            else:
                acc -= col
        out[:, k] = (acc + half) >> rshift
    return out
