"""End-to-end waveform compression.

Pipeline: (quantize for the integer variant) -> windowed transform ->
threshold -> trailing-zero run-length encoding per window -> per-index
slot alignment of the I and Q channels.  The fidelity-aware search
wraps the pipeline in a threshold-halving loop driven by decompressed
mean squared error.

Thresholds are always expressed in normalized amplitude units; for the
integer variant they are compared against descaled coefficient
magnitudes so one target error means the same thing for every variant.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CorruptStreamError, ParameterError, ShapeError
from .transform import (
    OpCounter,
    TransformKind,
    TransformVariant,
    coefficient_scale,
    dct_n,
    dct_w,
    idct_n,
    idct_w,
    int_dct_w,
    int_idct_w,
    int_scale,
)
from .waveform import QuantizedWaveform, Waveform, mse, quantize

#: Slot value reserved as the run-length codeword signature (minimum
#: representable signed 16-bit integer; legal coefficients are clamped
#: to [COEFF_MIN, COEFF_MAX]).
RLE_SENTINEL = -32768

#: Threshold floor below which the fidelity search reports no solution.
THRESHOLD_FLOOR = 1e-6

#: Fixed-point scale used when serializing float-variant coefficients.
FLOAT_SLOT_SCALE = 4096


@dataclass(frozen=True)
class CodecConfig:
    """Compression settings: transform variant plus threshold policy."""

    variant: TransformVariant
    threshold: float = 0.0
    bit_width: int = 16
    adaptive: bool = False

    def __post_init__(self):
        if self.threshold < 0:
            raise ParameterError(f"threshold must be >= 0, got {self.threshold}")
        if self.adaptive and self.variant.kind is not TransformKind.INT_DCT_W:
            raise ParameterError("adaptive plateau encoding is defined for int-dct-w only")


@dataclass(frozen=True)
class RleCodeword:
    """Single-slot codeword standing in for a trailing run of zeros."""

    zero_count: int
    signature: int = RLE_SENTINEL

    def __post_init__(self):
        if self.zero_count < 1:
            raise ParameterError(f"zero_count must be >= 1, got {self.zero_count}")


@dataclass(frozen=True)
class CompressedWindow:
    """Non-zero-prefix coefficients plus an optional trailing-run codeword."""

    values: np.ndarray
    rle: RleCodeword | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))

    @property
    def occupied_slots(self) -> int:
        return len(self.values) + (1 if self.rle is not None else 0)


@dataclass(frozen=True)
class PlateauRun:
    """A window-aligned constant span replayed from a single codeword.

    ``i_value``/``q_value`` are the reconstructed (S-scaled) sample
    values, so replaying them is bit-identical to decoding the windows
    the run replaced.
    """

    start_window: int
    n_windows: int
    i_value: int
    q_value: int


@dataclass(frozen=True)
class CompressedWaveform:
    label: str
    variant: TransformVariant
    window_size: int
    scale: int
    original_length: int
    threshold_used: float
    i_windows: tuple[CompressedWindow, ...]
    q_windows: tuple[CompressedWindow, ...]
    plateau: PlateauRun | None = None
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "i_windows", tuple(self.i_windows))
        object.__setattr__(self, "q_windows", tuple(self.q_windows))
        if len(self.i_windows) != len(self.q_windows):
            raise ShapeError(
                f"I and Q window counts differ: {len(self.i_windows)} vs {len(self.q_windows)}"
            )

    @property
    def n_windows_total(self) -> int:
        """Window count covering the waveform, plateau span included."""
        return max(1, -(-self.original_length // self.window_size))

    @property
    def n_windows_stored(self) -> int:
        return len(self.i_windows)

    @property
    def uniform_width(self) -> int:
        width = 1
        for w in self.i_windows + self.q_windows:
            width = max(width, w.occupied_slots)
        return width

    def paired_slot_counts(self) -> np.ndarray:
        """Per stored window index: max of the two channels' occupied slots
        (the channels are padded to a common count per index)."""
        i_occ = np.array([w.occupied_slots for w in self.i_windows], dtype=np.int64)
        q_occ = np.array([w.occupied_slots for w in self.q_windows], dtype=np.int64)
        return np.maximum(i_occ, q_occ)


# ---------------------------------------------------------------------------
# Thresholding and run-length encoding
# ---------------------------------------------------------------------------


def threshold(values, t: float, coeff_scale: float = 1.0) -> np.ndarray:
    """Zero every value with |v| < t * coeff_scale; t=0 is the identity."""
    if t < 0:
        raise ParameterError(f"threshold must be >= 0, got {t}")
    values = np.asarray(values)
    return np.where(np.abs(values) < t * coeff_scale, values.dtype.type(0), values)


def trailing_zero_counts(rows: np.ndarray) -> np.ndarray:
    """Length of the all-zero suffix of every row of a 2-D array."""
    rows = np.atleast_2d(rows)
    nonzero = rows != 0
    from_end = np.argmax(nonzero[:, ::-1], axis=1)
    return np.where(nonzero.any(axis=1), from_end, rows.shape[1])


def rle_encode(window) -> CompressedWindow:
    """Replace the trailing zero run of one full window with a codeword.

    Interior zeros stay verbatim; a window with a nonzero last value
    carries no codeword.
    """
    window = np.asarray(window)
    if window.ndim != 1 or window.size < 1:
        raise ShapeError(f"expected one 1-D window, got shape {window.shape}")
    run = int(trailing_zero_counts(window[None, :])[0])
    if run == 0:
        return CompressedWindow(window.copy(), None)
    return CompressedWindow(window[: window.size - run].copy(), RleCodeword(run))


def rle_decode(cw: CompressedWindow, window_size: int) -> np.ndarray:
    """Exact inverse of :func:`rle_encode` for a window of known size."""
    run = cw.rle.zero_count if cw.rle is not None else 0
    if len(cw.values) + run != window_size:
        raise CorruptStreamError(
            f"window expands to {len(cw.values) + run} values, expected {window_size}"
        )
    out = np.zeros(window_size, dtype=cw.values.dtype)
    out[: len(cw.values)] = cw.values
    return out


# ---------------------------------------------------------------------------
# Compression / decompression
# ---------------------------------------------------------------------------


def _transform_channels(w: Waveform, cfg: CodecConfig, counter: OpCounter | None = None):
    """Forward-transform both channels; returns (rows_i, rows_q, ws, scale,
    coeff_scale)."""
    kind = cfg.variant.kind
    if kind is TransformKind.INT_DCT_W:
        ws = cfg.variant.window_size
        s = int_scale(ws)
        qw = quantize(w, cfg.bit_width, s)
        rows_i = int_dct_w(qw.i_samples, ws, counter)
        rows_q = int_dct_w(qw.q_samples, ws, counter)
        return rows_i, rows_q, ws, s, coefficient_scale(ws)
    if kind is TransformKind.DCT_W:
        ws = cfg.variant.window_size
        rows_i = dct_w(w.i_samples, ws, counter)
        rows_q = dct_w(w.q_samples, ws, counter)
        return rows_i, rows_q, ws, 1, 1.0
    ws = len(w)
    rows_i = dct_n(w.i_samples, counter)[None, :]
    rows_q = dct_n(w.q_samples, counter)[None, :]
    return rows_i, rows_q, ws, 1, 1.0


def _encode_rows(rows: np.ndarray) -> list[CompressedWindow]:
    return [rle_encode(row) for row in rows]


def _quantized_channels(w: Waveform, cfg: CodecConfig) -> QuantizedWaveform:
    return quantize(w, cfg.bit_width, int_scale(cfg.variant.window_size))


def _detect_plateau(qw: QuantizedWaveform, ws: int) -> tuple[int, int] | None:
    """Longest window-aligned run of identical (I, Q) sample pairs covering
    at least two windows; returns (start_window, n_windows) or None."""
    i, q = qw.i_samples, qw.q_samples
    n = i.size
    change = np.flatnonzero((np.diff(i) != 0) | (np.diff(q) != 0))
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change + 1, [n]))
    best: tuple[int, int] | None = None
    for s, e in zip(starts, ends):
        w0 = -(-s // ws)
        w1 = e // ws
        if w1 - w0 >= 2 and (best is None or w1 - w0 > best[1]):
            best = (int(w0), int(w1 - w0))
    return best


def _decode_rows(c: CompressedWaveform, channel: str) -> np.ndarray:
    windows = c.i_windows if channel == "i" else c.q_windows
    out = np.zeros(
        (len(windows), c.window_size),
        dtype=np.int64 if c.variant.is_integer else np.float64,
    )
    for idx, cw in enumerate(windows):
        try:
            out[idx] = rle_decode(cw, c.window_size)
        except CorruptStreamError as exc:
            raise CorruptStreamError(f"{channel.upper()} window {idx}: {exc}") from exc
    return out


def compress(w: Waveform, cfg: CodecConfig, counter: OpCounter | None = None) -> CompressedWaveform:
    """Run the full pipeline at the config's fixed threshold."""
    rows_i, rows_q, ws, scale, cs = _transform_channels(w, cfg, counter)
    rows_i = threshold(rows_i, cfg.threshold, cs)
    rows_q = threshold(rows_q, cfg.threshold, cs)
    plateau = None
    if cfg.adaptive:
        qw = _quantized_channels(w, cfg)
        span = _detect_plateau(qw, ws)
        if span is not None:
            w0, nw = span
            rep_i = int_idct_w(rows_i[w0 : w0 + 1])
            rep_q = int_idct_w(rows_q[w0 : w0 + 1])
            if np.all(rep_i == rep_i[0]) and np.all(rep_q == rep_q[0]):
                plateau = PlateauRun(w0, nw, int(rep_i[0]), int(rep_q[0]))
                keep = np.ones(rows_i.shape[0], dtype=bool)
                keep[w0 : w0 + nw] = False
                rows_i = rows_i[keep]
                rows_q = rows_q[keep]
    return CompressedWaveform(
        label=w.label,
        variant=cfg.variant,
        window_size=ws,
        scale=scale,
        original_length=len(w),
        threshold_used=cfg.threshold,
        i_windows=_encode_rows(rows_i),
        q_windows=_encode_rows(rows_q),
        plateau=plateau,
        sample_rate_hz=w.sample_rate_hz,
    )


def decompress(c: CompressedWaveform, counter: OpCounter | None = None) -> Waveform:
    """Expand codewords, inverse-transform, descale, truncate."""
    rows_i = _decode_rows(c, "i")
    rows_q = _decode_rows(c, "q")
    n_total = c.n_windows_total
    if c.variant.is_integer:
        dec_i = int_idct_w(rows_i, counter) if len(rows_i) else np.zeros(0, np.int64)
        dec_q = int_idct_w(rows_q, counter) if len(rows_q) else np.zeros(0, np.int64)
        full_i = np.zeros(n_total * c.window_size, dtype=np.int64)
        full_q = np.zeros(n_total * c.window_size, dtype=np.int64)
    elif c.variant.kind is TransformKind.DCT_N:
        dec_i = idct_n(rows_i[0], counter)
        dec_q = idct_n(rows_q[0], counter)
        full_i = np.zeros(n_total * c.window_size)
        full_q = np.zeros(n_total * c.window_size)
    else:
        dec_i = idct_w(rows_i, counter) if len(rows_i) else np.zeros(0)
        dec_q = idct_w(rows_q, counter) if len(rows_q) else np.zeros(0)
        full_i = np.zeros(n_total * c.window_size)
        full_q = np.zeros(n_total * c.window_size)
    if c.plateau is None:
        if c.n_windows_stored != n_total:
            raise CorruptStreamError(
                f"stream stores {c.n_windows_stored} windows for"
                f" {n_total} expected (no plateau run present)"
            )
        full_i[:] = dec_i
        full_q[:] = dec_q
    else:
        p = c.plateau
        if c.n_windows_stored + p.n_windows != n_total:
            raise CorruptStreamError(
                f"stream stores {c.n_windows_stored} windows plus a {p.n_windows}-window"
                f" run for {n_total} expected"
            )
        ws = c.window_size
        a, b = p.start_window * ws, (p.start_window + p.n_windows) * ws
        full_i[:a], full_q[:a] = dec_i[:a], dec_q[:a]
        full_i[a:b], full_q[a:b] = p.i_value, p.q_value
        full_i[b:], full_q[b:] = dec_i[a:], dec_q[a:]
    i = full_i[: c.original_length] / c.scale
    q = full_q[: c.original_length] / c.scale
    return Waveform(i, q, c.sample_rate_hz, c.label)


# ---------------------------------------------------------------------------
# Fidelity-aware threshold search
# ---------------------------------------------------------------------------


def initial_threshold(w: Waveform, cfg: CodecConfig) -> float:
    """Largest descaled coefficient magnitude over all windows and channels."""
    rows_i, rows_q, _ws, _scale, cs = _transform_channels(w, cfg)
    peak = max(np.abs(rows_i).max(), np.abs(rows_q).max())
    return float(peak) / cs


def fidelity_aware_compress(
    w: Waveform,
    target_error: float,
    cfg: CodecConfig,
    trajectory: list[tuple[float, float]] | None = None,
) -> CompressedWaveform | None:
    """Halve the threshold until the decompressed error meets the target.

    Starts from the maximum descaled coefficient magnitude (maximally
    lossy) and returns the first compression whose MSE is at or below
    ``target_error``; returns None once the threshold falls under
    ``THRESHOLD_FLOOR`` without success.  ``trajectory``, when given,
    collects the visited (threshold, mse) pairs.
    """
    if target_error <= 0:
        raise ParameterError(f"target_error must be > 0, got {target_error}")
    t = initial_threshold(w, cfg)
    while True:
        candidate = compress(w, replace(cfg, threshold=t))
        err = mse(w, decompress(candidate))
        if trajectory is not None:
            trajectory.append((t, err))
        if err <= target_error:
            return candidate
        t = t / 2
        if t < THRESHOLD_FLOOR:
            return None


# ---------------------------------------------------------------------------
# Delta-compression baseline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaChannel:
    first: int
    deltas: np.ndarray
    half_width: bool

    def __post_init__(self):
        object.__setattr__(self, "deltas", np.asarray(self.deltas, dtype=np.int64))


@dataclass(frozen=True)
class DeltaStream:
    i: DeltaChannel
    q: DeltaChannel
    bit_width: int
    sample_rate_hz: float
    label: str

    @property
    def achieved_ratio(self) -> float:
        n = self.i.deltas.size + 1
        original = 2 * n * self.bit_width
        stored = 0
        for ch in (self.i, self.q):
            if ch.half_width:
                stored += self.bit_width + (n - 1) * (self.bit_width // 2)
            else:
                stored += n * self.bit_width
        return original / stored


def _delta_channel(samples: np.ndarray, bit_width: int) -> DeltaChannel:
    deltas = np.diff(samples.astype(np.int64))
    half_limit = (1 << (bit_width // 2 - 1)) - 1
    fits = bool(np.all(np.abs(deltas) <= half_limit)) if deltas.size else True
    return DeltaChannel(int(samples[0]), deltas, fits)


def delta_compress(qw: QuantizedWaveform) -> DeltaStream:
    """Store the first sample verbatim and successors as differences.

    Each channel keeps half-width deltas only when every delta fits;
    one oversized delta (the zero-crossing penalty) forces the whole
    channel back to full width, so its ratio contribution is 1.
    """
    return DeltaStream(
        _delta_channel(qw.i_samples, qw.bit_width),
        _delta_channel(qw.q_samples, qw.bit_width),
        qw.bit_width,
        qw.sample_rate_hz,
        qw.label,
    )


def delta_decompress(ds: DeltaStream) -> QuantizedWaveform:
    """Exact inverse of :func:`delta_compress`."""
    i = np.concatenate(([ds.i.first], ds.i.first + np.cumsum(ds.i.deltas)))
    q = np.concatenate(([ds.q.first], ds.q.first + np.cumsum(ds.q.deltas)))
    return QuantizedWaveform(i, q, ds.bit_width, 1, ds.sample_rate_hz, ds.label)


# ---------------------------------------------------------------------------
# Size accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompressionStats:
    """The three size views of one compressed waveform.

    ``r_uniform`` charges every stored window the library's uniform
    width (the banked-memory deployment); ``r_occupied`` charges only
    occupied slots before padding (per-pulse content size, the basis of
    the per-gate ratios); ``r_effective`` adds the entry header bytes to
    the uniform layout.
    """

    r_uniform: float
    r_occupied: float
    r_effective: float
    uniform_width: int
    occupied_slots: int
    header_bytes: int


def entry_header_bytes(c: CompressedWaveform) -> int:
    label = c.label.encode("utf-8")
    base = 2 + len(label) + 4 + 1 + 8
    if c.plateau is not None:
        base += 1 + 4 + 4 + 2 + 2
    return base


def compression_stats(c: CompressedWaveform, slot_bits: int = 16) -> CompressionStats:
    n = c.original_length
    width = c.uniform_width
    stored_windows = c.n_windows_stored + (1 if c.plateau is not None else 0)
    occupied = sum(w.occupied_slots for w in c.i_windows + c.q_windows)
    occupied += 2 if c.plateau is not None else 0
    header = entry_header_bytes(c)
    uniform_bits = 2 * stored_windows * width * slot_bits
    r_uniform = (2 * n * slot_bits) / uniform_bits
    r_occupied = (2 * n) / occupied
    r_effective = (2 * n * slot_bits) / (uniform_bits + 8 * header)
    return CompressionStats(r_uniform, r_occupied, r_effective, width, occupied, header)


def compression_ratio(original: Waveform, c: CompressedWaveform) -> float:
    """Uniform-width size reduction (header excluded); the asymptote for a
    long waveform is window_size / uniform_width."""
    if len(original) != c.original_length:
        raise ShapeError(
            f"original has {len(original)} samples, stream says {c.original_length}"
        )
    return compression_stats(c).r_uniform
