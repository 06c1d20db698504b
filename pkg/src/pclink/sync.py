"""Chip-level frame synchronization by preamble correlation.

The receiver keeps the last L*M chip counts in an L x M matrix C whose rows,
oldest first, line up with the L preamble symbols when the stream position t
is the last chip of the preamble.  Synchronization maximizes the bipolar
correlation (2s - 1)^T C 1 over t.  The reduced-complexity variant scans the
cheap unipolar metric s^T C 1 and only searches for the bipolar peak inside a
short window once that metric crosses an activation threshold, giving a fixed
decision latency of W chips.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, CountStream, sample_chip_stream
from .framing import SyncSequence


def sync_tolerance(chips_per_symbol: int) -> int:
    """Success criterion: estimate within ceil(M/2) chips of the true position."""
    return (chips_per_symbol + 1) // 2


@dataclass(frozen=True)
class SyncConfig:
    """Windowed-search settings.

    activation_threshold None means: derive an operating threshold from the
    sweep intensities with signal_threshold().  window_width None means 2M.
    """

    activation_threshold: float | None = None
    window_width: int | None = None
    mode: str = "windowed"

    def __post_init__(self) -> None:
        if self.mode not in ("full", "windowed"):
            raise ValueError("mode must be 'full' or 'windowed'")
        if self.activation_threshold is not None and self.activation_threshold < 0:
            raise ValueError("activation_threshold must be non-negative")
        if self.window_width is not None and self.window_width < 1:
            raise ValueError("window_width must be >= 1")


@dataclass(frozen=True)
class SyncResult:
    chip_index: int | None
    activated: bool


class ChipMatrixTracker:
    """Streaming L x M chip-count matrix updated in O(L) per chip.

    Rows are oldest-first, so row i pairs with the i-th preamble symbol.  The
    buffer starts zero-filled, equivalent to a stream preceded by L*M empty
    chips.
    """

    def __init__(self, sync: SyncSequence, chips_per_symbol: int) -> None:
        if chips_per_symbol < 1:
            raise ValueError("chips_per_symbol must be >= 1")
        self._L = len(sync)
        self._M = chips_per_symbol
        self._span = self._L * self._M
        self._buf = np.zeros(self._span, dtype=np.int64)
        self._row_sums = np.zeros(self._L, dtype=np.int64)
        self._offsets = np.arange(self._L) * self._M
        self._weights = sync.bipolar()
        self._ones = sync.bits.astype(np.int64)
        self._count = 0

    @property
    def chips_seen(self) -> int:
        return self._count

    @property
    def counts(self) -> np.ndarray:
        """The current L x M matrix, rows oldest-first."""
        span = self._span
        order = (self._count + np.arange(span)) % span
        return self._buf[order].reshape(self._L, self._M)

    @property
    def row_sums(self) -> np.ndarray:
        return self._row_sums.copy()

    def push(self, count: int) -> None:
        """Slide the window one chip forward."""
        idx = (self._count + self._offsets) % self._span
        leaving = self._buf[idx]
        entering = np.empty_like(leaving)
        entering[:-1] = leaving[1:]
        entering[-1] = count
        self._row_sums += entering - leaving
        self._buf[idx[0]] = count
        self._count += 1

    def correlation_metric(self) -> int:
        return int(self._weights @ self._row_sums)

    def activation_metric(self) -> int:
        return int(self._ones @ self._row_sums)


def correlation_metric(matrix: np.ndarray, sync: SyncSequence) -> float:
    """Bipolar metric (2s - 1)^T C 1: ones-row sums minus zeros-row sums."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] != len(sync):
        raise ValueError("matrix row count must equal the preamble length")
    return float(sync.bipolar() @ matrix.sum(axis=1))


def activation_metric(matrix: np.ndarray, sync: SyncSequence) -> float:
    """Unipolar metric s^T C 1: total count in the ones rows."""
    matrix = np.asarray(matrix)
    if matrix.shape[0] != len(sync):
        raise ValueError("matrix row count must equal the preamble length")
    return float(sync.bits.astype(np.int64) @ matrix.sum(axis=1))


def symbol_window_sums(
    chip_counts: np.ndarray, start_chip: int, n_symbols: int, chips_per_symbol: int
) -> np.ndarray:
    """Sum n_symbols consecutive M-chip windows beginning at start_chip."""
    m = chips_per_symbol
    end = start_chip + n_symbols * m
    if start_chip < 0 or end > chip_counts.size:
        raise ValueError("symbol windows fall outside the stream")
    return chip_counts[start_chip:end].reshape(n_symbols, m).sum(axis=1)


def pilot_symbol_counts(stream: CountStream, chip_index: int, sync_len: int) -> np.ndarray:
    """Row sums of the chip matrix ending at chip_index: the L pilot counts."""
    m = stream.chips_per_symbol
    start = chip_index - sync_len * m + 1
    return symbol_window_sums(stream.chip_counts, start, sync_len, m)


def metric_profiles(
    chip_counts: np.ndarray, sync: SyncSequence, chips_per_symbol: int
) -> tuple[np.ndarray, np.ndarray]:
    """Bipolar and unipolar metrics for every full matrix position.

    Entry a corresponds to the matrix ending at chip t = a + L*M - 1; the
    profile therefore has len(chip_counts) - L*M + 1 entries.  Matches the
    streaming tracker exactly and runs in O(L * n) via prefix sums.
    """
    counts = np.asarray(chip_counts, dtype=np.int64)
    L, m = len(sync), chips_per_symbol
    span = L * m
    if counts.size < span:
        raise ValueError("stream shorter than the L*M correlation span")
    csum = np.concatenate([[0], np.cumsum(counts)])
    wsum = csum[m:] - csum[:-m]
    npos = counts.size - span + 1
    bipolar = np.zeros(npos, dtype=np.int64)
    unipolar = np.zeros(npos, dtype=np.int64)
    bits = sync.bits
    for i in range(L):
        seg = wsum[i * m : i * m + npos]
        if bits[i]:
            unipolar += seg
            bipolar += seg
        else:
            bipolar -= seg
    return bipolar, unipolar


def synchronize_full(stream: CountStream, sync: SyncSequence) -> int:
    """Chip index maximizing the bipolar metric; earliest index on ties."""
    bipolar, _ = metric_profiles(stream.chip_counts, sync, stream.chips_per_symbol)
    return int(np.argmax(bipolar)) + len(sync) * stream.chips_per_symbol - 1


def synchronize_windowed(
    stream: CountStream, sync: SyncSequence, cfg: SyncConfig
) -> SyncResult:
    """Threshold-activated peak search.

    Scans the unipolar metric until it first exceeds the activation threshold
    at some position, then returns the bipolar argmax over the next W chip
    positions.  Never activating is a result, not an error.
    """
    if cfg.activation_threshold is None:
        raise ValueError("windowed search needs a resolved activation threshold")
    m = stream.chips_per_symbol
    window = cfg.window_width if cfg.window_width is not None else 2 * m
    bipolar, unipolar = metric_profiles(stream.chip_counts, sync, m)
    hits = np.flatnonzero(unipolar > cfg.activation_threshold)
    if hits.size == 0:
        return SyncResult(None, False)
    a0 = int(hits[0])
    peak = a0 + int(np.argmax(bipolar[a0 : a0 + window]))
    return SyncResult(peak + len(sync) * m - 1, True)


def calibrate_threshold(
    params: ChannelParams,
    sync: SyncSequence,
    target_false_activation: float,
    rng: np.random.Generator,
    n_positions: int = 20000,
) -> float:
    """Noise-trained activation threshold.

    Simulates a background-only stream and returns the (1 - target) quantile
    of the unipolar metric over sliding positions, so a noise-only position
    exceeds the threshold with roughly the target probability.
    """
    if not 0 < target_false_activation < 1:
        raise ValueError("target_false_activation must be in (0, 1)")
    L, m = len(sync), params.chips_per_symbol
    n_symbols = L + int(np.ceil(n_positions / m))
    stream = sample_chip_stream(params, np.zeros(n_symbols, dtype=np.uint8), rng)
    _, unipolar = metric_profiles(stream.chip_counts, sync, m)
    return float(np.quantile(unipolar, 1.0 - target_false_activation))


def signal_threshold(
    sync: SyncSequence, lambda_s_total: float, lambda_b_total: float
) -> float:
    """Operating activation threshold between peak and worst sidelobe.

    A noise-quantile threshold fires on the partial-overlap ramp long before
    the preamble is aligned, so the windowed search would lock W chips early.
    This places the threshold midway between the expected aligned metric
    n1*(lambda_s + lambda_b) and the largest partial-overlap mean, computed
    from the preamble's aperiodic coincidence profile.
    """
    bits = sync.bits.astype(np.int64)
    corr = np.correlate(bits, bits, "full")
    u_max = int(np.delete(corr, corr.size // 2).max()) if corr.size > 1 else 0
    n1 = int(bits.sum())
    return n1 * lambda_b_total + (n1 + u_max) / 2.0 * lambda_s_total
