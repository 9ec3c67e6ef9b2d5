"""Waveform compression codec and control-memory pipeline models."""

from .codec import (
    CodecConfig,
    CompressedWaveform,
    CompressedWindow,
    CompressionStats,
    DeltaStream,
    PlateauRun,
    RleCodeword,
    compress,
    compression_ratio,
    compression_stats,
    decompress,
    delta_compress,
    delta_decompress,
    fidelity_aware_compress,
    rle_decode,
    rle_encode,
    threshold,
)
from .cwmf import read_cwmf, write_cwmf
from .errors import (
    CapacityError,
    CorruptStreamError,
    ParameterError,
    RangeOverflowError,
    ShapeError,
    ValidationError,
    WfcodecError,
)
from .memsim import (
    AccessStats,
    BankMode,
    BankPlan,
    EnergyWeights,
    PipelineConfig,
    StreamTrace,
    adaptive_stream,
    plan_banks,
    power_proxy,
    power_ratio,
    qubit_capacity_gain,
    samples_per_window_histogram,
    simulate_stream,
)
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
from .waveform import (
    GOOGLE_PARAMS,
    IBM_PARAMS,
    ControlSystemParams,
    QuantizedWaveform,
    Waveform,
    build_corpus,
    dequantize,
    estimate_bandwidth,
    estimate_capacity,
    gen_constant,
    gen_drag,
    gen_flat_top,
    load_library,
    mse,
    quantize,
    save_library,
)

__version__ = "0.1.0"
