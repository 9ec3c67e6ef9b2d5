"""Waveform data model, pulse generators, fixed-point front end, and the
per-qubit memory capacity / bandwidth estimators.

Amplitudes are dimensionless envelope values normalized to DAC full
scale: every sample lies in [-1, 1].  Calibrated gate pulses typically
use only a fraction of full scale (a pi-pulse peaks around 0.2), and the
synthetic corpus reproduces that so error budgets behave like the real
libraries'.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, RangeOverflowError, ShapeError, ValidationError

LIBRARY_FORMAT_VERSION = 1

SUPPORTED_BIT_WIDTHS = (12, 14, 16)


@dataclass(frozen=True)
class Waveform:
    """A gate pulse envelope: paired I/Q sample sequences at a fixed rate."""

    i_samples: np.ndarray
    q_samples: np.ndarray
    sample_rate_hz: float
    label: str = ""

    def __post_init__(self):
        i = np.asarray(self.i_samples, dtype=np.float64)
        q = np.asarray(self.q_samples, dtype=np.float64)
        object.__setattr__(self, "i_samples", i)
        object.__setattr__(self, "q_samples", q)
        if i.ndim != 1 or q.ndim != 1 or i.size != q.size or i.size < 1:
            raise ShapeError(
                f"I/Q channels must be equal-length 1-D sequences of >= 1 sample,"
                f" got {i.shape} and {q.shape}"
            )
        if self.sample_rate_hz <= 0:
            raise ParameterError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        if not (np.isfinite(i).all() and np.isfinite(q).all()):
            raise ParameterError(f"waveform '{self.label}' contains non-finite samples")
        peak = max(np.abs(i).max(), np.abs(q).max())
        if peak > 1.0 + 1e-12:
            raise ParameterError(
                f"waveform '{self.label}' exceeds full scale (peak |amplitude| = {peak})"
            )

    def __len__(self) -> int:
        return self.i_samples.size

    def normalized(self) -> "Waveform":
        """Rescale so the peak |amplitude| is exactly 1.0 (no-op on silence)."""
        peak = max(np.abs(self.i_samples).max(), np.abs(self.q_samples).max())
        if peak == 0.0:
            return self
        return Waveform(
            self.i_samples / peak, self.q_samples / peak, self.sample_rate_hz, self.label
        )


@dataclass(frozen=True)
class QuantizedWaveform:
    """Fixed-point view of a waveform: samples = round(amplitude * scale)."""

    i_samples: np.ndarray
    q_samples: np.ndarray
    bit_width: int
    scale: int
    sample_rate_hz: float = 1.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "i_samples", np.asarray(self.i_samples, dtype=np.int32))
        object.__setattr__(self, "q_samples", np.asarray(self.q_samples, dtype=np.int32))
        if self.bit_width not in SUPPORTED_BIT_WIDTHS:
            raise ParameterError(
                f"bit_width must be one of {SUPPORTED_BIT_WIDTHS}, got {self.bit_width}"
            )
        limit = (1 << (self.bit_width - 1)) - 1
        for name, ch in (("I", self.i_samples), ("Q", self.q_samples)):
            bad = np.abs(ch) > limit
            if bad.any():
                idx = int(np.argmax(bad))
                raise RangeOverflowError(
                    f"{name} sample {idx} = {ch[idx]} does not fit {self.bit_width} signed bits"
                )

    def __len__(self) -> int:
        return self.i_samples.size


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(w: Waveform, bit_width: int, scale: int) -> QuantizedWaveform:
    """Quantize with round-half-away-from-zero; overflow raises with the
    offending sample index."""
    if scale < 1:
        raise ParameterError(f"scale must be a positive integer, got {scale}")
    i = _round_half_away(w.i_samples * scale).astype(np.int64)
    q = _round_half_away(w.q_samples * scale).astype(np.int64)
    return QuantizedWaveform(i, q, bit_width, scale, w.sample_rate_hz, w.label)


def dequantize(qw: QuantizedWaveform) -> Waveform:
    """Map fixed-point samples back to amplitude units."""
    return Waveform(
        qw.i_samples / qw.scale,
        qw.q_samples / qw.scale,
        qw.sample_rate_hz,
        qw.label,
    )


def mse(a: Waveform, b: Waveform) -> float:
    """Mean squared sample difference over both channels."""
    if len(a) != len(b):
        raise ShapeError(f"length mismatch: {len(a)} vs {len(b)}")
    di = a.i_samples - b.i_samples
    dq = a.q_samples - b.q_samples
    return float((np.sum(di * di) + np.sum(dq * dq)) / (2 * len(a)))


# ---------------------------------------------------------------------------
# Pulse generators
# ---------------------------------------------------------------------------


def _sample_grid(duration: float, sample_rate: float) -> np.ndarray:
    if duration <= 0:
        raise ParameterError(f"duration must be > 0, got {duration}")
    if sample_rate <= 0:
        raise ParameterError(f"sample_rate must be > 0, got {sample_rate}")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise ParameterError(
            f"duration {duration} at {sample_rate} S/s yields no samples"
        )
    return (np.arange(n) + 0.5) / sample_rate


def gen_drag(
    amplitude: float,
    sigma: float,
    beta: float,
    duration: float,
    sample_rate: float,
    label: str = "drag",
    zero_ends: bool = True,
) -> Waveform:
    """Derivative-removal pulse: Gaussian I envelope, scaled-derivative Q.

    The I channel is ``amplitude * exp(-(t-mu)^2 / (2 sigma^2))`` centered
    on the sampled span; with ``zero_ends`` (the default, matching
    calibrated hardware pulses) the envelope is lifted so it reaches
    exactly zero at the pulse edges while keeping the stated peak.  The
    Q channel is ``beta * sigma * dI/dt``, dimensionless; if the pair
    ever exceeds full scale both channels are rescaled together.
    """
    if not 0 < amplitude <= 1:
        raise ParameterError(f"amplitude must be in (0, 1], got {amplitude}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    t = _sample_grid(duration, sample_rate)
    n = t.size
    mu = n / (2 * sample_rate)
    g = np.exp(-((t - mu) ** 2) / (2 * sigma**2))
    if zero_ends:
        edge = float(np.exp(-(mu**2) / (2 * sigma**2)))
        i = amplitude * np.clip((g - edge) / (1 - edge), 0.0, None)
        q = -beta * amplitude * ((t - mu) / sigma) * g / (1 - edge)
    else:
        i = amplitude * g
        q = -beta * amplitude * ((t - mu) / sigma) * g
    if beta == 0:
        q = np.zeros_like(i)
    peak = max(np.abs(i).max(), np.abs(q).max())
    if peak > 1.0:
        i /= peak
        q /= peak
    return Waveform(i, q, sample_rate, label)


def _half_gaussian_rise(n_rise: int, amplitude: float) -> np.ndarray:
    # 2-sigma lifted rise: starts at zero, ends just below the plateau
    if n_rise == 0:
        return np.zeros(0)
    sigma = n_rise / 2.0
    u = (n_rise - np.arange(n_rise) - 0.5) / sigma
    edge = float(np.exp(-2.0))
    return amplitude * np.clip((np.exp(-(u**2) / 2.0) - edge) / (1 - edge), 0.0, None)


def gen_flat_top(
    amplitude: float,
    rise_seconds: float,
    flat_seconds: float,
    sample_rate: float,
    label: str = "flat_top",
) -> Waveform:
    """Gaussian rise, exactly-constant plateau, mirrored Gaussian fall.

    Total duration is ``2 * rise_seconds + flat_seconds``; the plateau
    holds ``round(flat_seconds * sample_rate)`` bit-identical samples.
    """
    if not 0 < amplitude <= 1:
        raise ParameterError(f"amplitude must be in (0, 1], got {amplitude}")
    if rise_seconds <= 0:
        raise ParameterError(f"rise_seconds must be > 0, got {rise_seconds}")
    if flat_seconds < 0:
        raise ParameterError(f"flat_seconds must be >= 0, got {flat_seconds}")
    duration = 2 * rise_seconds + flat_seconds
    n = _sample_grid(duration, sample_rate).size
    n_flat = int(round(flat_seconds * sample_rate))
    n_flat = min(n_flat, n)
    n_rise = (n - n_flat) // 2
    n_fall = n - n_flat - n_rise
    rise = _half_gaussian_rise(n_rise, amplitude)
    fall = _half_gaussian_rise(n_fall, amplitude)[::-1]
    i = np.concatenate([rise, np.full(n_flat, float(amplitude)), fall])
    return Waveform(i, np.zeros(n), sample_rate, label)


def gen_constant(
    amplitude: float, duration: float, sample_rate: float, label: str = "constant"
) -> Waveform:
    """A pulse holding one amplitude for its whole duration."""
    if not 0 < abs(amplitude) <= 1:
        raise ParameterError(f"amplitude must be in (0, 1], got {amplitude}")
    n = _sample_grid(duration, sample_rate).size
    return Waveform(np.full(n, float(amplitude)), np.zeros(n), sample_rate, label)


# ---------------------------------------------------------------------------
# Capacity / bandwidth model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ControlSystemParams:
    """Per-vendor control parameters driving the memory estimates.

    ``sample_size_bits`` covers both the I and Q channel of one sample;
    ``connectivity_degree`` is the average number of coupled neighbors,
    each of which needs its own two-qubit waveform set.
    """

    sampling_rate_sps: float
    sample_size_bits: int
    single_qubit_gates: tuple[tuple[str, float], ...]
    two_qubit_gates: tuple[tuple[str, float], ...]
    readout_latency_seconds: float
    connectivity_degree: float

    def __post_init__(self):
        object.__setattr__(self, "single_qubit_gates", tuple(self.single_qubit_gates))
        object.__setattr__(self, "two_qubit_gates", tuple(self.two_qubit_gates))
        if self.sampling_rate_sps <= 0:
            raise ParameterError(f"sampling_rate_sps must be > 0, got {self.sampling_rate_sps}")
        if self.sample_size_bits <= 0:
            raise ParameterError(f"sample_size_bits must be > 0, got {self.sample_size_bits}")
        for name, latency in self.single_qubit_gates + self.two_qubit_gates:
            if latency <= 0:
                raise ParameterError(f"gate '{name}' latency must be > 0, got {latency}")
        if self.readout_latency_seconds < 0:
            raise ParameterError(
                f"readout latency must be >= 0, got {self.readout_latency_seconds}"
            )
        if self.connectivity_degree < 0:
            raise ParameterError(
                f"connectivity_degree must be >= 0, got {self.connectivity_degree}"
            )


#: 27/16-qubit heavy-hex devices average about 2.1 couplers per qubit.
IBM_PARAMS = ControlSystemParams(
    sampling_rate_sps=4.54e9,
    sample_size_bits=32,
    single_qubit_gates=(("x", 30e-9), ("sx", 30e-9)),
    two_qubit_gates=(("cx", 300e-9),),
    readout_latency_seconds=300e-9,
    connectivity_degree=2.0,
)

GOOGLE_PARAMS = ControlSystemParams(
    sampling_rate_sps=1e9,
    sample_size_bits=28,
    single_qubit_gates=(("phased_xz", 25e-9),),
    two_qubit_gates=(("fsim", 30e-9), ("iswap", 30e-9)),
    readout_latency_seconds=500e-9,
    connectivity_degree=4.0,
)


def estimate_capacity(p: ControlSystemParams) -> float:
    """Waveform memory per qubit, in bytes.

    One gate waveform costs sampling_rate * sample_bytes * latency; the
    per-qubit total sums all single-qubit gates, all two-qubit gates
    once per coupled neighbor, and one readout pulse.
    """
    bytes_per_second = p.sampling_rate_sps * (p.sample_size_bits / 8.0)
    t_1q = sum(lat for _, lat in p.single_qubit_gates)
    t_2q = sum(lat for _, lat in p.two_qubit_gates)
    return bytes_per_second * (t_1q + p.connectivity_degree * t_2q + p.readout_latency_seconds)


def estimate_bandwidth(sampling_rate_sps: float, sample_size_bits: int) -> float:
    """Streaming bandwidth one DAC channel pair demands, in bytes/second."""
    if sampling_rate_sps <= 0 or sample_size_bits <= 0:
        raise ParameterError("sampling rate and sample size must be positive")
    return sampling_rate_sps * (sample_size_bits / 8.0)


# ---------------------------------------------------------------------------
# Waveform library files (JSON)
# ---------------------------------------------------------------------------


def save_library(
    path: str | Path,
    waveforms: list[Waveform],
    meta: dict | None = None,
) -> None:
    """Write a waveform library: {format_version, sample_rate_hz, entries}."""
    if not waveforms:
        raise ValidationError("refusing to write an empty waveform library")
    rate = waveforms[0].sample_rate_hz
    for w in waveforms:
        if w.sample_rate_hz != rate:
            raise ValidationError(
                f"library entries must share one sample rate: {w.label} has"
                f" {w.sample_rate_hz}, expected {rate}"
            )
    doc = {
        "format_version": LIBRARY_FORMAT_VERSION,
        "sample_rate_hz": rate,
        "entries": [
            {"label": w.label, "i": w.i_samples.tolist(), "q": w.q_samples.tolist()}
            for w in waveforms
        ],
    }
    if meta:
        doc["meta"] = meta
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_library(path: str | Path) -> list[Waveform]:
    """Read a waveform library written by :func:`save_library`."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not a valid waveform library: {exc}") from exc
    if not isinstance(doc, dict) or "entries" not in doc or "sample_rate_hz" not in doc:
        raise ValidationError(f"{path}: missing required library keys")
    if doc.get("format_version") != LIBRARY_FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported format_version {doc.get('format_version')}"
        )
    rate = float(doc["sample_rate_hz"])
    return [
        Waveform(np.asarray(e["i"]), np.asarray(e["q"]), rate, e.get("label", ""))
        for e in doc["entries"]
    ]


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

CORPUS_1Q_DURATION = 30e-9
CORPUS_2Q_DURATION = 300e-9
CORPUS_READOUT_DURATION = 300e-9


def build_corpus(
    n_qubits: int = 16,
    seed: int = 11,
    sample_rate_hz: float = 4.54e9,
    connectivity_degree: int = 2,
) -> list[Waveform]:
    """Deterministic stand-in for a calibrated pulse library.

    Per qubit: two derivative-removal 1Q pulses (30 ns), one flat-top 2Q
    pulse per coupled neighbor (300 ns), and one flat-top readout pulse
    (300 ns).  Amplitudes, widths, and derivative weights vary per qubit
    the way calibration spreads them across a device; two corpus-level
    calibration shapes (pure Gaussian, constant) round out the classes.
    """
    if n_qubits < 1:
        raise ParameterError(f"n_qubits must be >= 1, got {n_qubits}")
    rng = np.random.default_rng(seed)
    out: list[Waveform] = []
    for q in range(n_qubits):
        x_amp = rng.uniform(0.15, 0.22)
        beta = rng.uniform(0.10, 0.25)
        sigma = CORPUS_1Q_DURATION / 4
        out.append(
            gen_drag(x_amp, sigma, beta, CORPUS_1Q_DURATION, sample_rate_hz, f"q{q:02d}_x")
        )
        out.append(
            gen_drag(
                x_amp / 2, sigma, beta, CORPUS_1Q_DURATION, sample_rate_hz, f"q{q:02d}_sx"
            )
        )
        for c in range(connectivity_degree):
            cx_amp = rng.uniform(0.25, 0.40)
            out.append(
                gen_flat_top(
                    cx_amp,
                    20e-9,
                    CORPUS_2Q_DURATION - 40e-9,
                    sample_rate_hz,
                    f"q{q:02d}_cx{c}",
                )
            )
        ro_amp = rng.uniform(0.30, 0.50)
        out.append(
            gen_flat_top(
                ro_amp,
                30e-9,
                CORPUS_READOUT_DURATION - 60e-9,
                sample_rate_hz,
                f"q{q:02d}_readout",
            )
        )
    out.append(
        gen_drag(0.2, CORPUS_1Q_DURATION / 4, 0.0, CORPUS_1Q_DURATION, sample_rate_hz,
                 "cal_gaussian")
    )
    # constant calibration tone, length snapped to a whole number of
    # 16-sample windows so its spectrum is purely DC
    n_const = max(16, 16 * round(CORPUS_2Q_DURATION * sample_rate_hz / 16))
    out.append(gen_constant(0.3, n_const / sample_rate_hz, sample_rate_hz, "cal_constant"))
    return out
