"""Forward/inverse cosine transforms in three flavors.

* ``dct_n`` / ``idct_n``: arbitrary-length floating-point transform pair
  (orthonormal, double precision).
* ``dct_w`` / ``idct_w``: the same transform applied to fixed windows of
  a channel, zero-padding the tail window.
* ``int_dct_w`` / ``int_idct_w``: windowed integer transform built on the
  HEVC core-transform matrices, evaluated with shifts and adds only.

The integer basis for N points approximates ``S * C`` where ``C`` is the
orthonormal cosine basis and ``S = 2**(6 + log2(N)/2)`` (181 for N=8 via
rounding, 256 for N=16).  Inputs are expected pre-scaled by ``S``; the
forward result is right-shifted so stored coefficients sit at a fixed
scale of ``S*S / 2**FORWARD_SHIFT[N]`` (~256x the orthonormal
coefficients) and the inverse shifts by 8 to land back on S-scaled
samples.  All integer arithmetic fits 32-bit accumulators for 16-bit
inputs, matching the modeled datapath headroom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _accel
from .errors import ParameterError, RangeOverflowError, ShapeError

SUPPORTED_WINDOW_SIZES = (8, 16)

#: Coefficient values that still fit one signed 16-bit memory slot, with the
#: minimum value reserved as the run-length codeword signature.
COEFF_MIN = -32767
COEFF_MAX = 32767


class TransformKind(Enum):
    """Which transform the codec runs."""

    DCT_N = "dct-n"
    DCT_W = "dct-w"
    INT_DCT_W = "int-dct-w"


@dataclass(frozen=True)
class TransformVariant:
    """Transform selector: kind plus window size (ignored for DCT_N)."""

    kind: TransformKind
    window_size: int = 16

    def __post_init__(self):
        if self.kind is not TransformKind.DCT_N and self.window_size not in SUPPORTED_WINDOW_SIZES:
            raise ParameterError(
                f"window_size must be one of {SUPPORTED_WINDOW_SIZES}, got {self.window_size}"
                " (32 is rejected: the engine cost outgrows the bandwidth gain)"
            )

    @property
    def is_integer(self) -> bool:
        return self.kind is TransformKind.INT_DCT_W


@dataclass
class OpCounter:
    """Datapath operation census, accumulated across transform calls.

    Counts model an unshared per-window datapath: one add per summed
    term plus the rounding add, one shift per nonzero-distance term plus
    the output shift.  Hardware resource tables count shared adders and
    shifters instead, so only the multiplier count is comparable across
    the two views (zero for the integer transforms).
    """

    multiplies: int = 0
    adds: int = 0
    shifts: int = 0

    def add(self, multiplies: int = 0, adds: int = 0, shifts: int = 0) -> None:
        self.multiplies += multiplies
        self.adds += adds
        self.shifts += shifts


# ---------------------------------------------------------------------------
# Floating-point transforms
# ---------------------------------------------------------------------------


def _ortho_basis(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    basis = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    basis[0] *= 1.0 / math.sqrt(2.0)
    return basis


_BASIS_CACHE: dict[int, np.ndarray] = {}


def _basis(n: int) -> np.ndarray:
    b = _BASIS_CACHE.get(n)
    if b is None:
        b = _ortho_basis(n)
        _BASIS_CACHE[n] = b
    return b


def _count_float_matvec(counter: OpCounter | None, n: int, n_windows: int = 1) -> None:
    if counter is not None:
        counter.add(multiplies=n * n * n_windows, adds=n * (n - 1) * n_windows)


def dct_n(x, counter: OpCounter | None = None) -> np.ndarray:
    """Forward transform of a full-length signal (orthonormal pair).

    The DC basis vector carries weight 1/sqrt(N) and the AC vectors
    sqrt(2/N), so ``idct_n(dct_n(x))`` reconstructs ``x`` exactly up to
    double-precision rounding.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ShapeError(f"expected a non-empty 1-D signal, got shape {x.shape}")
    _count_float_matvec(counter, x.size)
    return _basis(x.size) @ x


def idct_n(y, counter: OpCounter | None = None) -> np.ndarray:
    """Inverse of :func:`dct_n`."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size < 1:
        raise ShapeError(f"expected a non-empty 1-D spectrum, got shape {y.shape}")
    _count_float_matvec(counter, y.size)
    return _basis(y.size).T @ y


def split_windows(x, window_size: int) -> np.ndarray:
    """Reshape a channel into consecutive windows, zero-padding the tail."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-D channel, got shape {x.shape}")
    n_windows = max(1, -(-x.size // window_size))
    padded = np.zeros(n_windows * window_size, dtype=x.dtype)
    padded[: x.size] = x
    return padded.reshape(n_windows, window_size)


def dct_w(x, window_size: int, counter: OpCounter | None = None) -> np.ndarray:
    """Windowed forward transform; returns an (n_windows, window_size) array."""
    _check_window_size(window_size)
    windows = split_windows(np.asarray(x, dtype=np.float64), window_size)
    _count_float_matvec(counter, window_size, windows.shape[0])
    return windows @ _basis(window_size).T


def idct_w(coeffs, counter: OpCounter | None = None) -> np.ndarray:
    """Inverse windowed transform; returns the flattened sample stream."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    window_size = coeffs.shape[1]
    _check_window_size(window_size)
    _count_float_matvec(counter, window_size, coeffs.shape[0])
    return (coeffs @ _basis(window_size)).ravel()


# ---------------------------------------------------------------------------
# Integer transforms (HEVC core matrices, shift-add datapath)
# ---------------------------------------------------------------------------


def _hevc_matrix_8() -> np.ndarray:
    a, b, c, d, e, f, g = 64, 83, 36, 89, 75, 50, 18
    return np.array(
        [
            [a, a, a, a, a, a, a, a],
            [d, e, f, g, -g, -f, -e, -d],
            [b, c, -c, -b, -b, -c, c, b],
            [e, -g, -d, -f, f, d, g, -e],
            [a, -a, -a, a, a, -a, -a, a],
            [f, -d, g, e, -e, -g, d, -f],
            [c, -b, b, -c, -c, b, -b, c],
            [g, -f, e, -d, d, -e, f, -g],
        ],
        dtype=np.int64,
    )


def _hevc_matrix_16() -> np.ndarray:
    a, b, c, d, e, f, g = 64, 83, 36, 89, 75, 50, 18
    h, i, j, k, l, m, n, o = 90, 87, 80, 70, 57, 43, 25, 9
    return np.array(
        [
            [a, a, a, a, a, a, a, a, a, a, a, a, a, a, a, a],
            [h, i, j, k, l, m, n, o, -o, -n, -m, -l, -k, -j, -i, -h],
            [d, e, f, g, -g, -f, -e, -d, -d, -e, -f, -g, g, f, e, d],
            [i, l, o, -m, -j, -h, -k, -n, n, k, h, j, m, -o, -l, -i],
            [b, c, -c, -b, -b, -c, c, b, b, c, -c, -b, -b, -c, c, b],
            [j, o, -k, -i, -n, l, h, m, -m, -h, -l, n, i, k, -o, -j],
            [e, -g, -d, -f, f, d, g, -e, -e, g, d, f, -f, -d, -g, e],
            [k, -m, -i, o, h, n, -j, -l, l, j, -n, -h, -o, i, m, -k],
            [a, -a, -a, a, a, -a, -a, a, a, -a, -a, a, a, -a, -a, a],
            [l, -j, -n, h, -o, -i, m, k, -k, -m, i, o, -h, n, j, -l],
            [f, -d, g, e, -e, -g, d, -f, -f, d, -g, -e, e, g, -d, f],
            [m, -h, l, n, -i, k, o, -j, j, -o, -k, i, -n, -l, h, -m],
            [c, -b, b, -c, -c, b, -b, c, c, -b, b, -c, -c, b, -b, c],
            [n, -k, h, -j, m, o, -l, i, -i, l, -o, -m, j, -h, k, -n],
            [g, -f, e, -d, d, -e, f, -g, -g, f, -e, d, -d, e, -f, g],
            [o, -n, m, -l, k, -j, i, -h, h, -i, j, -k, l, -m, n, -o],
        ],
        dtype=np.int64,
    )


INT_MATRICES = {8: _hevc_matrix_8(), 16: _hevc_matrix_16()}

#: Right shift applied after the forward integer transform so stored
#: coefficients land on a dyadic scale for both window sizes.
FORWARD_SHIFT = {8: 7, 16: 8}
#: Right shift applied after the inverse integer transform, returning
#: S-scaled samples.
INVERSE_SHIFT = {8: 8, 16: 8}

#: Input samples must fit 16 signed bits.
INT_INPUT_LIMIT = 32767

_TERM_TABLES = {ws: _accel.build_term_tables(m) for ws, m in INT_MATRICES.items()}
_TERM_TABLES_T = {
    ws: _accel.build_term_tables(np.ascontiguousarray(m.T)) for ws, m in INT_MATRICES.items()
}

# Coefficient magnitude that keeps the inverse accumulator within 32 bits.
_INT_COEFF_LIMIT = {
    ws: int((2**31 - 1 - (1 << (INVERSE_SHIFT[ws] - 1))) // np.abs(m).sum(axis=0).max())
    for ws, m in INT_MATRICES.items()
}


def int_scale(window_size: int) -> int:
    """Integer input scale S = round(2**(6 + log2(N)/2)) for an N-point transform."""
    _check_window_size(window_size)
    return round(2.0 ** (6 + math.log2(window_size) / 2))


def coefficient_scale(window_size: int) -> float:
    """Ratio of a stored integer coefficient to the orthonormal coefficient
    of the unit-amplitude waveform (S**2 / 2**FORWARD_SHIFT, ~256)."""
    s = int_scale(window_size)
    return s * s / float(1 << FORWARD_SHIFT[window_size])


def _check_window_size(window_size: int) -> None:
    if window_size not in SUPPORTED_WINDOW_SIZES:
        raise ParameterError(
            f"window_size must be one of {SUPPORTED_WINDOW_SIZES}, got {window_size}"
        )


def _datapath_counts(window_size: int) -> tuple[int, int]:
    """(adds, shifts) per window for the shift-add datapath; same for
    forward and inverse since the transpose reuses the entry multiset."""
    offsets, shifts, _signs = _TERM_TABLES[window_size]
    total_terms = int(offsets[-1])
    nonzero_shift_terms = int(np.count_nonzero(shifts))
    n = window_size
    return total_terms + n, nonzero_shift_terms + n


_DATAPATH_COUNTS = {ws: _datapath_counts(ws) for ws in SUPPORTED_WINDOW_SIZES}


def _int_matvec(x: np.ndarray, window_size: int, inverse: bool) -> np.ndarray:
    mat = INT_MATRICES[window_size]
    rshift = INVERSE_SHIFT[window_size] if inverse else FORWARD_SHIFT[window_size]
    if _accel.USE_NUMBA:
        tables = _TERM_TABLES_T[window_size] if inverse else _TERM_TABLES[window_size]
        return _accel.int_matvec_numba(x, tables, rshift)
    return _accel.int_matvec_numpy(x, mat.T if inverse else mat, rshift)


def _count_int_windows(counter: OpCounter | None, window_size: int, n_windows: int) -> None:
    if counter is not None:
        adds, shifts = _DATAPATH_COUNTS[window_size]
        counter.add(adds=adds * n_windows, shifts=shifts * n_windows)


def int_dct_w(x, window_size: int, counter: OpCounter | None = None) -> np.ndarray:
    """Windowed forward integer transform of an S-scaled integer channel.

    Returns (n_windows, window_size) int64 coefficients.  Raises
    :class:`RangeOverflowError` if any input exceeds 16 signed bits.
    """
    _check_window_size(window_size)
    x = np.asarray(x, dtype=np.int64)
    bad = np.abs(x) > INT_INPUT_LIMIT
    if bad.any():
        idx = int(np.argmax(bad.ravel()))
        raise RangeOverflowError(
            f"input sample {idx} = {x.ravel()[idx]} exceeds the 16-bit transform range"
        )
    windows = split_windows(x, window_size)
    _count_int_windows(counter, window_size, windows.shape[0])
    return _int_matvec(np.ascontiguousarray(windows), window_size, inverse=False)


def int_idct_w(coeffs, counter: OpCounter | None = None) -> np.ndarray:
    """Inverse windowed integer transform; returns the flat S-scaled samples."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
    window_size = coeffs.shape[1]
    _check_window_size(window_size)
    limit = _INT_COEFF_LIMIT[window_size]
    bad = np.abs(coeffs) > limit
    if bad.any():
        idx = int(np.argmax(bad.ravel()))
        raise RangeOverflowError(
            f"coefficient {idx} = {coeffs.ravel()[idx]} exceeds the 32-bit datapath headroom"
            f" (|y| <= {limit})"
        )
    _count_int_windows(counter, window_size, coeffs.shape[0])
    return _int_matvec(np.ascontiguousarray(coeffs), window_size, inverse=True).ravel()
