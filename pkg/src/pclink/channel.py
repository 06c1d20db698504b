"""Discrete-time Poisson count channel with OOK modulation and receiver diversity.

A transmitted symbol is either on (1) or off (0).  Detector k observes a
photoelectron count drawn from Poisson(lambda_s_k + lambda_b_k) for symbol on
and Poisson(lambda_b_k) for symbol off; detectors are independent.  Equal-gain
combining sums the K counts, which by Poisson superposition is again Poisson
with the summed intensity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Floor on per-detector background intensity.  A zero background makes the
# count log-likelihood ratio divide by zero, so construction rejects anything
# smaller than this while staying physically negligible.
MIN_BACKGROUND = 1e-6

_PLANCK = 6.62607015e-34
_C = 299792458.0


@dataclass(frozen=True)
class LinkBudget:
    """Optical link parameters mapping transmit power to mean signal counts.

    eta: detector quantum efficiency including the optical filter.
    P_t: transmit optical power in watts.
    xi: path loss (>= 1).
    h: Planck constant, J*s.
    nu: optical frequency in Hz (default: 266 nm solar-blind band).
    R_s: symbol rate in symbols/s.
    """

    eta: float
    P_t: float
    xi: float
    h: float = _PLANCK
    nu: float = _C / 266e-9
    R_s: float = 2e6

    def __post_init__(self) -> None:
        if self.eta < 0 or self.P_t < 0:
            raise ValueError("eta and P_t must be non-negative")
        for name in ("xi", "h", "nu", "R_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.xi < 1:
            raise ValueError("path loss xi must be >= 1")


def lambda_from_budget(budget: LinkBudget) -> float:
    """Mean signal photoelectrons per symbol for one detector."""
    return budget.eta * budget.P_t / (budget.xi * budget.h * budget.nu * budget.R_s)


@dataclass(frozen=True)
class ChannelParams:
    """Per-detector intensities for one operating point.

    lambda_s / lambda_b are per-detector mean signal / background counts per
    symbol.  chips_per_symbol is the receiver counting resolution M.  With
    isi_enabled, an extra intensity lambda_s/(2M) leaks into the first chip of
    a symbol whenever the previous symbol was on, modelling the modulator's
    low-pass tail.
    """

    lambda_s: tuple[float, ...]
    lambda_b: tuple[float, ...]
    chips_per_symbol: int = 10
    isi_enabled: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda_s", tuple(float(x) for x in self.lambda_s))
        object.__setattr__(self, "lambda_b", tuple(float(x) for x in self.lambda_b))
        if len(self.lambda_s) == 0 or len(self.lambda_s) != len(self.lambda_b):
            raise ValueError("lambda_s and lambda_b must be equal-length, non-empty")
        if any(x < 0 for x in self.lambda_s):
            raise ValueError("signal intensities must be non-negative")
        if any(x < MIN_BACKGROUND for x in self.lambda_b):
            raise ValueError(f"background intensities must be >= {MIN_BACKGROUND}")
        if self.chips_per_symbol < 1:
            raise ValueError("chips_per_symbol must be >= 1")

    @property
    def detector_count(self) -> int:
        return len(self.lambda_s)

    @property
    def total_lambda_s(self) -> float:
        return float(sum(self.lambda_s))

    @property
    def total_lambda_b(self) -> float:
        return float(sum(self.lambda_b))

    @classmethod
    def equal_split(
        cls,
        lambda_s_total: float,
        lambda_b_total: float,
        detector_count: int = 3,
        chips_per_symbol: int = 10,
        isi_enabled: bool = False,
    ) -> "ChannelParams":
        """Split combined intensities evenly over K identical detectors."""
        if detector_count < 1:
            raise ValueError("detector_count must be >= 1")
        k = detector_count
        return cls(
            lambda_s=(lambda_s_total / k,) * k,
            lambda_b=(lambda_b_total / k,) * k,
            chips_per_symbol=chips_per_symbol,
            isi_enabled=isi_enabled,
        )


@dataclass(frozen=True)
class CountStream:
    """Combined chip-resolution count stream."""

    chip_counts: np.ndarray
    chips_per_symbol: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.chip_counts, dtype=np.int64)
        if counts.ndim != 1:
            raise ValueError("chip_counts must be one-dimensional")
        if counts.size and counts.min() < 0:
            raise ValueError("chip counts must be non-negative")
        if self.chips_per_symbol < 1:
            raise ValueError("chips_per_symbol must be >= 1")
        object.__setattr__(self, "chip_counts", counts)

    def symbol_counts(self) -> np.ndarray:
        """Sum each group of M consecutive chips; trailing partial group dropped."""
        m = self.chips_per_symbol
        n = (self.chip_counts.size // m) * m
        return self.chip_counts[:n].reshape(-1, m).sum(axis=1)


def sample_symbol_counts(
    params: ChannelParams, symbol: int, rng: np.random.Generator
) -> np.ndarray:
    """One Poisson count per detector for a single OOK symbol."""
    means = np.asarray(params.lambda_b, dtype=float)
    if symbol:
        means = means + np.asarray(params.lambda_s, dtype=float)
    return rng.poisson(means)


def sample_chip_counts(
    params: ChannelParams,
    symbol: int,
    rng: np.random.Generator,
    prev_symbol: int = 0,
) -> np.ndarray:
    """K x M chip counts for one symbol.

    The symbol-level count is drawn first and then thinned uniformly over the
    M chips (multinomial split), so summing the chips reproduces the symbol
    draw exactly for the same generator state.  The ISI leak, when enabled and
    the previous symbol was on, is an independent extra Poisson contribution
    on the first chip.
    """
    m = params.chips_per_symbol
    totals = sample_symbol_counts(params, symbol, rng)
    out = np.empty((params.detector_count, m), dtype=np.int64)
    split = np.full(m, 1.0 / m)
    for k, total in enumerate(totals):
        out[k] = rng.multinomial(total, split)
    if params.isi_enabled and prev_symbol:
        out[:, 0] += rng.poisson(np.asarray(params.lambda_s) / (2.0 * m))
    return out


def combine_equal_gain(counts) -> int:
    """Sum counts over detectors."""
    arr = np.asarray(counts)
    if arr.size and arr.min() < 0:
        raise ValueError("counts must be non-negative")
    return int(arr.sum())


def chip_intensity_profile(
    params: ChannelParams, symbol_bits: np.ndarray, prev_symbol: int = 0
) -> np.ndarray:
    """Combined per-chip intensity for a symbol-bit sequence.

    Uses the summed (equal-gain) intensities; by superposition the combined
    count of K independent detectors has exactly this Poisson law.
    """
    bits = np.asarray(symbol_bits, dtype=np.int64)
    m = params.chips_per_symbol
    lam = np.full(bits.size * m, params.total_lambda_b / m)
    on = np.repeat(bits == 1, m)
    lam[on] += params.total_lambda_s / m
    if params.isi_enabled and bits.size:
        prev_on = np.concatenate([[prev_symbol], bits[:-1]]) == 1
        lam[np.flatnonzero(prev_on) * m] += params.total_lambda_s / (2.0 * m)
    return lam


def sample_chip_stream(
    params: ChannelParams,
    symbol_bits: np.ndarray,
    rng: np.random.Generator,
    prev_symbol: int = 0,
) -> CountStream:
    """Combined chip-count stream for a whole symbol-bit sequence."""
    lam = chip_intensity_profile(params, symbol_bits, prev_symbol)
    return CountStream(rng.poisson(lam), params.chips_per_symbol)


def sample_combined_symbol_counts(
    params: ChannelParams, symbol_bits: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Combined symbol-level counts for a bit sequence (no chip resolution)."""
    bits = np.asarray(symbol_bits, dtype=np.int64)
    lam = np.where(
        bits == 1,
        params.total_lambda_s + params.total_lambda_b,
        params.total_lambda_b,
    )
    return rng.poisson(lam)
