"""Photon-counting optical link: channel models, receiver chain, campaigns."""

from .channel import (
    ChannelParams,
    CountStream,
    LinkBudget,
    combine_equal_gain,
    lambda_from_budget,
    sample_chip_stream,
    sample_combined_symbol_counts,
)
from .estimation import (
    ChannelEstimate,
    LlrTables,
    estimate_exact,
    estimate_quantized,
    llr_exact,
    llr_table,
)
from .framing import Frame, FrameLayout, SyncSequence, default_sync_sequence
from .harness import (
    CampaignConfig,
    CampaignResult,
    PointRecord,
    ThroughputReport,
    compute_throughput,
    run_ber_sweep,
    run_fer_sweep,
    run_msr_sweep,
)
from .ldpc import (
    DecoderConfig,
    DecodeResult,
    ParityCheck,
    QcLdpcParams,
    SystematicGenerator,
    build_code,
    build_generator,
    code_for_rate,
    decode,
    encode,
    syndrome,
)
from .sync import SyncConfig, SyncResult, synchronize_full, synchronize_windowed
from .waveform import SampledWaveform, WaveformConfig, count_pulses, synthesize

__version__ = "0.1.0"

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "ChannelEstimate",
    "ChannelParams",
    "CountStream",
    "DecodeResult",
    "DecoderConfig",
    "Frame",
    "FrameLayout",
    "LinkBudget",
    "LlrTables",
    "ParityCheck",
    "PointRecord",
    "QcLdpcParams",
    "SampledWaveform",
    "SyncConfig",
    "SyncResult",
    "SyncSequence",
    "SystematicGenerator",
    "ThroughputReport",
    "WaveformConfig",
    "build_code",
    "build_generator",
    "code_for_rate",
    "combine_equal_gain",
    "compute_throughput",
    "count_pulses",
    "decode",
    "default_sync_sequence",
    "encode",
    "estimate_exact",
    "estimate_quantized",
    "lambda_from_budget",
    "llr_exact",
    "llr_table",
    "run_ber_sweep",
    "run_fer_sweep",
    "run_msr_sweep",
    "sample_chip_stream",
    "sample_combined_symbol_counts",
    "synchronize_full",
    "synchronize_windowed",
    "syndrome",
    "synthesize",
]
