"""Bit-exact binary format for compressed waveform libraries ("CWMF").

Layout (all little-endian):

    magic "CWMF", u8 version, u8 variant, u8 window_size, u16 scale,
    u32 entry_count
    per entry:
        u16 label_len, UTF-8 label, u32 original_length,
        u8 uniform_width, f64 threshold_used,
        [version 2 only] u8 flags; flags bit 0 -> plateau record:
            u32 start_window, u32 n_windows, i16 i_value, i16 q_value
        stored windows as uniform_width signed 16-bit slots per channel,
        I window then Q window, interleaved by window index.

Within a window the coefficients come first; a slot equal to the
sentinel -32768 is the run-length codeword (its zero count is the
window remainder), and slots after it are zero padding.  Version 1
files carry no flags byte; the writer emits version 2 only when an
entry actually uses a plateau run.

Integer-variant slots store coefficients verbatim; float-variant slots
store round(value * scale) with scale recorded in the header, so float
libraries are quantized on write.  The arbitrary-length transform kind
has no fixed window size and cannot be serialized.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codec import (
    FLOAT_SLOT_SCALE,
    RLE_SENTINEL,
    CompressedWaveform,
    CompressedWindow,
    PlateauRun,
    RleCodeword,
)
from .errors import CorruptStreamError, ValidationError
from .transform import COEFF_MAX, COEFF_MIN, TransformKind, TransformVariant

MAGIC = b"CWMF"

_VARIANT_CODES = {TransformKind.DCT_W: 1, TransformKind.INT_DCT_W: 2}
_CODE_VARIANTS = {v: k for k, v in _VARIANT_CODES.items()}

_FLAG_PLATEAU = 0x01


def _window_slots(cw: CompressedWindow, width: int, to_int) -> np.ndarray:
    slots = np.zeros(width, dtype="<i2")
    vals = np.clip(to_int(cw.values), COEFF_MIN, COEFF_MAX).astype("<i2")
    slots[: len(vals)] = vals
    if cw.rle is not None:
        slots[len(vals)] = RLE_SENTINEL
    return slots


def write_cwmf(path: str | Path, entries: list[CompressedWaveform]) -> None:
    """Serialize a compressed library; all entries must share variant,
    window size, and scale."""
    if not entries:
        raise ValidationError("refusing to write an empty compressed library")
    first = entries[0]
    kind = first.variant.kind
    if kind not in _VARIANT_CODES:
        raise ValidationError(f"variant {kind.value} has no fixed window size; not serializable")
    for c in entries:
        if c.variant.kind is not kind or c.window_size != first.window_size:
            raise ValidationError(
                f"entry '{c.label}' mixes variants/window sizes within one library"
            )
        if c.scale != first.scale:
            raise ValidationError(f"entry '{c.label}' scale {c.scale} != {first.scale}")
    is_int = kind is TransformKind.INT_DCT_W
    header_scale = first.scale if is_int else FLOAT_SLOT_SCALE
    version = 2 if any(c.plateau is not None for c in entries) else 1

    if is_int:
        def to_int(vals):
            return np.asarray(vals, dtype=np.int64)
    else:
        def to_int(vals):
            scaled = np.asarray(vals, dtype=np.float64) * header_scale
            return (np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)).astype(np.int64)

    buf = bytearray()
    buf += MAGIC
    buf += struct.pack(
        "<BBBHI", version, _VARIANT_CODES[kind], first.window_size, header_scale, len(entries)
    )
    for c in entries:
        label = c.label.encode("utf-8")
        if len(label) > 0xFFFF:
            raise ValidationError(f"label too long ({len(label)} bytes)")
        width = c.uniform_width
        buf += struct.pack("<H", len(label)) + label
        buf += struct.pack("<IBd", c.original_length, width, c.threshold_used)
        if version == 2:
            flags = _FLAG_PLATEAU if c.plateau is not None else 0
            buf += struct.pack("<B", flags)
            if c.plateau is not None:
                p = c.plateau
                buf += struct.pack("<IIhh", p.start_window, p.n_windows, p.i_value, p.q_value)
        for wi, wq in zip(c.i_windows, c.q_windows):
            buf += _window_slots(wi, width, to_int).tobytes()
            buf += _window_slots(wq, width, to_int).tobytes()
    Path(path).write_bytes(bytes(buf))


class _Cursor:
    def __init__(self, data: bytes, path):
        self.data = data
        self.off = 0
        self.path = path

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.off + size > len(self.data):
            raise CorruptStreamError(f"{self.path}: truncated at offset {self.off}")
        out = struct.unpack_from(fmt, self.data, self.off)
        self.off += size
        return out

    def take_bytes(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise CorruptStreamError(f"{self.path}: truncated at offset {self.off}")
        out = self.data[self.off : self.off + n]
        self.off += n
        return out


def _parse_window(slots: np.ndarray, window_size: int, from_int, where: str) -> CompressedWindow:
    sentinel = np.flatnonzero(slots == RLE_SENTINEL)
    if sentinel.size == 0:
        if len(slots) < window_size:
            raise CorruptStreamError(f"{where}: window has no codeword and too few slots")
        return CompressedWindow(from_int(slots[:window_size]), None)
    p = int(sentinel[0])
    if np.any(slots[p + 1 :] != 0):
        raise CorruptStreamError(f"{where}: nonzero padding after the codeword")
    return CompressedWindow(from_int(slots[:p]), RleCodeword(window_size - p))


def read_cwmf(path: str | Path, sample_rate_hz: float = 1.0) -> list[CompressedWaveform]:
    """Deserialize a compressed library.

    The format carries no sample rate; pass the library's rate when the
    decompressed waveforms should report one.
    """
    cur = _Cursor(Path(path).read_bytes(), path)
    if cur.take_bytes(4) != MAGIC:
        raise CorruptStreamError(f"{path}: bad magic")
    version, variant_code, window_size, scale, count = cur.take("<BBBHI")
    if version not in (1, 2):
        raise CorruptStreamError(f"{path}: unsupported version {version}")
    if variant_code not in _CODE_VARIANTS:
        raise CorruptStreamError(f"{path}: unknown variant code {variant_code}")
    kind = _CODE_VARIANTS[variant_code]
    variant = TransformVariant(kind, window_size)
    is_int = kind is TransformKind.INT_DCT_W

    if is_int:
        def from_int(slots):
            return np.asarray(slots, dtype=np.int64)
    else:
        def from_int(slots):
            return np.asarray(slots, dtype=np.float64) / scale

    entries = []
    for e in range(count):
        (label_len,) = cur.take("<H")
        label = cur.take_bytes(label_len).decode("utf-8")
        original_length, width, threshold_used = cur.take("<IBd")
        plateau = None
        if version == 2:
            (flags,) = cur.take("<B")
            if flags & _FLAG_PLATEAU:
                start, n_run, iv, qv = cur.take("<IIhh")
                plateau = PlateauRun(start, n_run, iv, qv)
        n_total = max(1, -(-original_length // window_size))
        n_stored = n_total - (plateau.n_windows if plateau else 0)
        if n_stored < 0:
            raise CorruptStreamError(f"{path}: entry '{label}' plateau exceeds window count")
        i_windows, q_windows = [], []
        for idx in range(n_stored):
            where = f"{path}: entry '{label}' window {idx}"
            raw_i = np.frombuffer(cur.take_bytes(2 * width), dtype="<i2")
            raw_q = np.frombuffer(cur.take_bytes(2 * width), dtype="<i2")
            i_windows.append(_parse_window(raw_i, window_size, from_int, where + " (I)"))
            q_windows.append(_parse_window(raw_q, window_size, from_int, where + " (Q)"))
        entries.append(
            CompressedWaveform(
                label=label,
                variant=variant,
                window_size=window_size,
                scale=scale if is_int else 1,
                original_length=original_length,
                threshold_used=threshold_used,
                i_windows=tuple(i_windows),
                q_windows=tuple(q_windows),
                plateau=plateau,
                sample_rate_hz=sample_rate_hz,
            )
        )
    if cur.off != len(cur.data):
        raise CorruptStreamError(f"{path}: {len(cur.data) - cur.off} trailing bytes")
    return entries
