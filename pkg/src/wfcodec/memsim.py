"""Banked waveform memory and decompression pipeline model.

The fabric clock is slower than the DAC sample clock by ``clock_ratio``,
so samples (or compressed slots) are interleaved across parallel memory
banks.  ``simulate_stream`` walks fabric cycles through fetch -> RLE
decode -> inverse transform -> DAC FIFO and reports a per-cycle trace;
a bank plan is feasible exactly when the trace shows zero underruns.

Counts are per channel: the I and Q streams occupy the same number of
slots per window by construction, so one channel's trace describes
both.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

from .codec import CompressedWaveform, CompressedWindow, RleCodeword
from .errors import CapacityError, ParameterError
from .transform import SUPPORTED_WINDOW_SIZES, TransformKind, TransformVariant


@dataclass(frozen=True)
class PipelineConfig:
    """Clocking and geometry of the streaming pipeline."""

    fabric_clock_hz: float
    dac_rate_sps: float
    window_size: int = 16
    idct_latency_cycles: int = 1
    banks_available: int = 1260

    def __post_init__(self):
        if self.fabric_clock_hz <= 0 or self.dac_rate_sps <= 0:
            raise ParameterError("clock rates must be positive")
        if self.dac_rate_sps < self.fabric_clock_hz:
            raise ParameterError(
                f"dac_rate_sps ({self.dac_rate_sps}) must be >= fabric_clock_hz"
                f" ({self.fabric_clock_hz})"
            )
        if self.window_size not in SUPPORTED_WINDOW_SIZES:
            raise ParameterError(f"window_size must be one of {SUPPORTED_WINDOW_SIZES}")
        if self.idct_latency_cycles < 0 or self.banks_available < 1:
            raise ParameterError("idct latency must be >= 0 and banks_available >= 1")

    @property
    def clock_ratio(self) -> float:
        return self.dac_rate_sps / self.fabric_clock_hz


def _ceil_ratio(x: float) -> int:
    return math.ceil(round(x, 9))


class BankMode(Enum):
    UNCOMPRESSED = "uncompressed"
    COMPRESSED = "compressed"


@dataclass(frozen=True)
class BankPlan:
    banks_per_channel: int
    mode: BankMode
    slots_per_fetch: int
    engines: int = 0


def plan_banks(subject: CompressedWaveform | int, cfg: PipelineConfig) -> BankPlan:
    """Bank count per channel that sustains the DAC rate.

    Uncompressed streams need ``ceil(clock_ratio)`` banks.  Compressed
    streams need ``uniform_width`` banks per inverse-transform engine,
    with ``ceil(clock_ratio / window_size)`` engines (a window-size-8
    pipeline at ratio 16 instantiates two engines, doubling banks).
    """
    ratio = cfg.clock_ratio
    if isinstance(subject, CompressedWaveform):
        if subject.window_size != cfg.window_size:
            raise ParameterError(
                f"stream window size {subject.window_size} != config {cfg.window_size}"
            )
        engines = max(1, _ceil_ratio(ratio / cfg.window_size))
        banks = subject.uniform_width * engines
        mode = BankMode.COMPRESSED
    else:
        banks = _ceil_ratio(ratio)
        engines = 0
        mode = BankMode.UNCOMPRESSED
    if banks > cfg.banks_available:
        raise CapacityError(
            f"plan needs {banks} banks/channel, only {cfg.banks_available} available"
        )
    return BankPlan(banks, mode, banks, engines)


def min_sustaining_banks(cfg: PipelineConfig, uniform_width: int) -> int:
    """Fewest banks whose slot rate still covers the DAC demand
    (``uniform_width * ratio / window_size`` slots per cycle).  The plan
    formula quantizes whole engines, so it can exceed this bound at
    non-multiple clock ratios; below this bound a stream always
    underruns."""
    if uniform_width < 1:
        raise ParameterError(f"uniform_width must be >= 1, got {uniform_width}")
    return _ceil_ratio(uniform_width * cfg.clock_ratio / cfg.window_size)


def qubit_capacity_gain(cfg: PipelineConfig, uniform_width: int) -> Fraction:
    """Qubits supported with compression relative to the uncompressed
    baseline: exactly the ratio of the two bank plans."""
    if uniform_width < 1:
        raise ParameterError(f"uniform_width must be >= 1, got {uniform_width}")
    ratio = cfg.clock_ratio
    uncompressed = _ceil_ratio(ratio)
    engines = max(1, _ceil_ratio(ratio / cfg.window_size))
    compressed = uniform_width * engines
    return Fraction(uncompressed, compressed)


# ---------------------------------------------------------------------------
# Cycle-accurate streaming
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRow:
    cycle: int
    fetches: int
    decoder_out: int
    fifo_occupancy: int
    underrun: int


@dataclass
class StreamTrace:
    rows: list[TraceRow] = field(default_factory=list)
    underrun_count: int = 0
    memory_accesses: int = 0
    idct_invocations: int = 0
    mode: str = "compressed"
    samples_streamed: int = 0


@dataclass(frozen=True)
class AccessStats:
    """Per-channel event counts feeding the power proxy."""

    memory_accesses: int
    idct_invocations: int
    mode: str


class _Item:
    """One fetchable unit: a stored window or a plateau run."""

    __slots__ = ("slots", "samples", "is_run")

    def __init__(self, slots: int, samples: int, is_run: bool):
        self.slots = slots
        self.samples = samples
        self.is_run = is_run


def _stream_items(c: CompressedWaveform, width: int) -> list[_Item]:
    items: list[_Item] = []
    run_at = c.plateau.start_window if c.plateau is not None else None
    for idx in range(c.n_windows_stored):
        if run_at is not None and idx == run_at:
            items.append(_Item(1, c.plateau.n_windows * c.window_size, True))
            run_at = None
        items.append(_Item(width, c.window_size, False))
    if run_at is not None:
        items.append(_Item(1, c.plateau.n_windows * c.window_size, True))
    return items


def simulate_stream(
    subject: CompressedWaveform | int,
    cfg: PipelineConfig,
    banks: int | None = None,
) -> StreamTrace:
    """Stream one waveform through the pipeline, one fabric cycle at a time.

    Each cycle fetches one slot per bank, completed windows pass through
    RLE decode and the inverse transform (landing in the DAC FIFO after
    the pipeline latency), plateau runs replay their value straight into
    the FIFO, and the DAC drains ``clock_ratio`` samples per cycle once
    the FIFO has been primed with a window.  Underruns are recorded, not
    raised; ``banks`` overrides the planned count to probe starvation.
    """
    plan = plan_banks(subject, cfg)
    if banks is None:
        banks = plan.banks_per_channel
    if banks < 1:
        raise ParameterError(f"banks must be >= 1, got {banks}")
    compressed = isinstance(subject, CompressedWaveform)
    ratio = cfg.clock_ratio
    ws = cfg.window_size

    if compressed:
        total = subject.original_length
        width = subject.uniform_width
        engines = max(1, plan.engines)
        # two windows per engine, plus the samples the DAC drains while a
        # decoded window is still in flight
        depth = 2 * ws * engines + _ceil_ratio(ratio) * (1 + cfg.idct_latency_cycles)
        items = _stream_items(subject, width)
        prime = min(ws * engines, total)
    else:
        total = int(subject)
        if total < 1:
            raise ParameterError("uncompressed stream needs at least one sample")
        engines = 0
        depth = 2 * _ceil_ratio(ratio)
        items = []
        prime = min(_ceil_ratio(ratio), total)

    trace = StreamTrace(mode=plan.mode.value)
    fifo = 0
    inflight: list[list[int]] = []  # [land_cycle, samples]
    consumed = 0
    demand = 0.0
    dac_active = False
    underruns = 0

    item_idx = 0
    item_slots_done = 0
    ready: list[int] = []  # indices of fetched, not yet decoded items
    decode_next = 0  # next item index allowed to decode (in-order)
    run_remaining = 0
    samples_fetched = 0  # uncompressed only

    accesses = 0
    idct_calls = 0

    cycle = 0
    max_cycles = 1000 + 40 * (total + 1)
    while consumed < total:
        if cycle > max_cycles:
            raise RuntimeError("stream simulation failed to converge (model bug)")
        fetches = 0
        landed = 0

        if compressed:
            # fetch one slot per bank, prefetch bounded to two engine batches
            budget = banks
            while budget > 0 and item_idx < len(items) and len(ready) < 2 * engines + 1:
                need = items[item_idx].slots - item_slots_done
                take = min(budget, need)
                item_slots_done += take
                budget -= take
                fetches += take
                if item_slots_done == items[item_idx].slots:
                    ready.append(item_idx)
                    item_idx += 1
                    item_slots_done = 0
        else:
            room = depth - fifo
            take = min(banks, room, total - samples_fetched)
            samples_fetched += take
            fetches += take
            fifo += take
            landed += take
        accesses += fetches

        # emissions scheduled by earlier decodes land
        still = []
        for rec in inflight:
            if rec[0] <= cycle:
                fifo += rec[1]
                landed += rec[1]
            else:
                still.append(rec)
        inflight = still

        if not dac_active and fifo >= prime:
            dac_active = True

        under = 0
        if dac_active:
            demand += ratio
            want = min(int(demand), total - consumed)
            take = min(want, fifo)
            fifo -= take
            consumed += take
            demand -= take
            if take < want:
                under = 1
                underruns += 1

        if compressed:
            # in-order decode after the DAC freed room: up to `engines`
            # windows per cycle, or activation of a plateau run
            reserved = fifo + sum(r[1] for r in inflight) + run_remaining
            decoded = 0
            while ready and ready[0] == decode_next:
                it = items[ready[0]]
                if it.is_run:
                    if inflight or run_remaining:
                        break
                    run_remaining = it.samples
                    ready.pop(0)
                    decode_next += 1
                    continue
                if decoded >= engines or run_remaining:
                    break
                if reserved + it.samples > depth:
                    break
                ready.pop(0)
                decode_next += 1
                decoded += 1
                idct_calls += 1
                reserved += it.samples
                inflight.append([cycle + 1 + cfg.idct_latency_cycles, it.samples])

            # active plateau run replays directly into the FIFO
            if run_remaining:
                room = depth - fifo - sum(r[1] for r in inflight)
                emit = min(run_remaining, room)
                if emit > 0:
                    fifo += emit
                    landed += emit
                    run_remaining -= emit

        trace.rows.append(TraceRow(cycle, fetches, landed, fifo, under))
        cycle += 1

    trace.underrun_count = underruns
    trace.memory_accesses = accesses
    trace.idct_invocations = idct_calls
    trace.samples_streamed = consumed
    return trace


def access_stats(trace: StreamTrace) -> AccessStats:
    return AccessStats(trace.memory_accesses, trace.idct_invocations, trace.mode)


def adaptive_stream(c: CompressedWaveform, cfg: PipelineConfig) -> tuple[StreamTrace, AccessStats]:
    """Stream a plateau-compressed waveform with the bypass engaged.

    During the plateau the memory is idle and the inverse transform
    never fires; the returned stats are per channel, comparable against
    a non-adaptive compression of the same waveform.
    """
    trace = simulate_stream(c, cfg)
    stats = access_stats(trace)
    return trace, AccessStats(stats.memory_accesses, stats.idct_invocations, "adaptive")


# ---------------------------------------------------------------------------
# Library-level views
# ---------------------------------------------------------------------------


def samples_per_window_histogram(library) -> dict[int, int]:
    """Occupied-slot histogram over all windows and both channels,
    before any padding; plateau runs count as single-slot windows."""
    library = list(library)
    if not library:
        raise ParameterError("histogram needs at least one compressed waveform")
    hist: dict[int, int] = {}
    for c in library:
        for w in c.i_windows + c.q_windows:
            hist[w.occupied_slots] = hist.get(w.occupied_slots, 0) + 1
        if c.plateau is not None:
            hist[1] = hist.get(1, 0) + 2
    return dict(sorted(hist.items()))


@dataclass(frozen=True)
class EnergyWeights:
    """Relative energy charged per event; only ratios are meaningful."""

    memory_access: float = 1.0
    idct_invocation: float = 1.0

    def __post_init__(self):
        if self.memory_access < 0 or self.idct_invocation < 0:
            raise ParameterError("energy weights must be non-negative")


def power_proxy(stats: AccessStats, weights: EnergyWeights = EnergyWeights()) -> float:
    """Weighted event count standing in for energy; unit-free."""
    return weights.memory_access * stats.memory_accesses + (
        weights.idct_invocation * stats.idct_invocations
    )


def power_ratio(
    baseline: AccessStats, other: AccessStats, weights: EnergyWeights = EnergyWeights()
) -> float:
    """How many times less energy ``other`` uses than ``baseline``."""
    return power_proxy(baseline, weights) / power_proxy(other, weights)


def make_synthetic_stream(
    n_windows: int, occupied: int, window_size: int, label: str = "synthetic"
) -> CompressedWaveform:
    """A placeholder compressed waveform with fixed per-window occupancy,
    for bank/underrun sweeps that do not care about sample values."""
    if not 1 <= occupied <= window_size:
        raise ParameterError(f"occupied must be in [1, {window_size}], got {occupied}")
    if occupied == window_size:
        win = CompressedWindow(np.ones(window_size, dtype=np.int64), None)
    else:
        win = CompressedWindow(
            np.ones(occupied - 1, dtype=np.int64),
            RleCodeword(window_size - (occupied - 1)),
        )
    windows = tuple(win for _ in range(n_windows))
    return CompressedWaveform(
        label=label,
        variant=TransformVariant(TransformKind.INT_DCT_W, window_size),
        window_size=window_size,
        scale=256,
        original_length=n_windows * window_size,
        threshold_used=0.0,
        i_windows=windows,
        q_windows=windows,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def trace_to_csv(trace: StreamTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "fetches", "decoder_out", "fifo_occupancy", "underrun"])
        for row in trace.rows:
            writer.writerow([row.cycle, row.fetches, row.decoder_out, row.fifo_occupancy, row.underrun])


def stats_to_json(stats: AccessStats, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "memory_accesses": stats.memory_accesses,
                "idct_invocations": stats.idct_invocations,
                "mode": stats.mode,
            },
            indent=2,
        ),
        encoding="utf-8",
    )
