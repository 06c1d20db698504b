"""Pilot-based channel estimation and count LLR computation.

The preamble doubles as pilots: counts observed on the known ones symbols
estimate lambda_s + lambda_b, counts on the known zeros estimate lambda_b,
both by class means (unbiased).  The LLR of a count N is
N*ln((ls+lb)/lb) - ls with positive values favoring symbol on.

The table path mirrors the hardware realization: reciprocal tables theta
replace the divisions in the estimator, and the integer threshold table
phi[i, j] = ceil(p_s*i / ln((p_s*i + p_b*j)/(p_b*j))) turns the LLR into the
subtraction N - phi, a positively scaled version of the exact LLR, which a
min-sum decoder accepts unchanged.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .framing import SyncSequence

_MIN_EXACT_BACKGROUND = 1e-6


@dataclass(frozen=True)
class ChannelEstimate:
    lambda_s_hat: float
    lambda_b_hat: float

    def __post_init__(self) -> None:
        if self.lambda_s_hat < 0:
            raise ValueError("lambda_s_hat must be non-negative")
        if self.lambda_b_hat <= 0:
            raise ValueError("lambda_b_hat must be positive")


@dataclass(frozen=True)
class LlrTables:
    """Quantized estimator and LLR lookup tables.

    p_s / p_b are the estimation grid steps, cap_s / cap_b the maximum
    representable estimates, pilot_len the largest pilot class size the
    reciprocal tables must cover (the preamble length).
    """

    p_s: float = 0.5
    p_b: float = 0.01
    cap_s: float = 32.0
    cap_b: float = 2.0
    pilot_len: int = 64
    theta_s: np.ndarray = field(init=False, repr=False)
    theta_b: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.p_s <= 0 or self.p_b <= 0:
            raise ValueError("quantization steps must be positive")
        if self.cap_s < self.p_s or self.cap_b < self.p_b:
            raise ValueError("caps must admit at least one grid point")
        if self.pilot_len < 2:
            raise ValueError("pilot_len must be >= 2")
        counts = np.arange(self.pilot_len + 1, dtype=float)
        counts[0] = np.nan  # class size zero has no reciprocal
        object.__setattr__(self, "theta_s", 1.0 / (self.p_s * counts))
        object.__setattr__(self, "theta_b", 1.0 / (self.p_b * counts))
        i = np.arange(1, self.i_max + 1)[:, None] * self.p_s
        j = np.arange(1, self.j_max + 1)[None, :] * self.p_b
        ratio = np.log((i + j) / j)
        phi = np.full((self.i_max + 1, self.j_max + 1), 0, dtype=np.int64)
        phi[1:, 1:] = np.ceil(i / ratio).astype(np.int64)
        object.__setattr__(self, "phi", phi)

    @property
    def i_max(self) -> int:
        return int(round(self.cap_s / self.p_s))

    @property
    def j_max(self) -> int:
        return int(round(self.cap_b / self.p_b))


def _pilot_classes(
    pilot_counts: np.ndarray, sync: SyncSequence
) -> tuple[np.ndarray, np.ndarray]:
    counts = np.asarray(pilot_counts, dtype=np.int64)
    if counts.size != len(sync):
        raise ValueError("pilot counts must match the preamble length")
    ones = counts[sync.bits == 1]
    zeros = counts[sync.bits == 0]
    if ones.size == 0 or zeros.size == 0:
        raise ValueError("preamble must contain both symbol classes")
    return ones, zeros


def estimate_exact(pilot_counts: np.ndarray, sync: SyncSequence) -> ChannelEstimate:
    """Class-mean estimator; negative signal estimates clamp to zero."""
    ones, zeros = _pilot_classes(pilot_counts, sync)
    lam_b = max(float(zeros.mean()), _MIN_EXACT_BACKGROUND)
    lam_s = max(float(ones.mean()) - float(zeros.mean()), 0.0)
    return ChannelEstimate(lam_s, lam_b)


def snap_to_grid(est: ChannelEstimate, tables: LlrTables) -> ChannelEstimate:
    """Round an estimate onto the (p_s, p_b) grid, respecting floors and caps."""
    j = int(np.clip(np.rint(est.lambda_b_hat / tables.p_b), 1, tables.j_max))
    i = int(np.clip(np.rint(est.lambda_s_hat / tables.p_s), 0, tables.i_max))
    return ChannelEstimate(i * tables.p_s, j * tables.p_b)


def estimate_quantized(
    pilot_counts: np.ndarray, sync: SyncSequence, tables: LlrTables
) -> ChannelEstimate:
    """Table-driven estimator using reciprocal lookups instead of division.

    theta_s[n1] * sum(ones counts) is the ones-class mean in p_s grid units;
    the background estimate is subtracted after its own quantization, keeping
    the result within one grid step of estimate_exact in each coordinate
    (subject to the caps).
    """
    ones, zeros = _pilot_classes(pilot_counts, sync)
    if ones.size > tables.pilot_len or zeros.size > tables.pilot_len:
        raise ValueError("pilot class size exceeds the reciprocal table range")
    raw_on = tables.theta_s[ones.size] * float(ones.sum())
    raw_b = tables.theta_b[zeros.size] * float(zeros.sum())
    j = int(np.clip(np.rint(raw_b), 1, tables.j_max))
    lam_b = j * tables.p_b
    i = int(np.clip(np.rint(raw_on - lam_b / tables.p_s), 0, tables.i_max))
    return ChannelEstimate(i * tables.p_s, lam_b)


def llr_exact(N, est: ChannelEstimate):
    """N*ln((ls+lb)/lb) - ls; zero signal estimate gives LLR 0 for any N."""
    n = np.asarray(N, dtype=float)
    if np.any(n < 0):
        raise ValueError("counts must be non-negative")
    if est.lambda_s_hat == 0.0:
        out = np.zeros_like(n)
    else:
        ratio = np.log((est.lambda_s_hat + est.lambda_b_hat) / est.lambda_b_hat)
        out = n * ratio - est.lambda_s_hat
    return float(out) if np.isscalar(N) else out


def llr_table(N, est: ChannelEstimate, tables: LlrTables):
    """N - phi[i, j] with (i, j) the grid indices of the estimate.

    The result is the exact LLR scaled by 1/ln((ls+lb)/lb) up to the ceiling,
    so its sign matches llr_exact whenever N is at least one count away from
    the exact decision threshold.  Out-of-range estimates saturate at the
    table edges; a zero signal estimate returns 0 like the exact path.
    """
    n = np.asarray(N, dtype=float)
    if np.any(n < 0):
        raise ValueError("counts must be non-negative")
    i = int(np.clip(np.rint(est.lambda_s_hat / tables.p_s), 0, tables.i_max))
    if i == 0:
        out = np.zeros_like(n)
        return float(out) if np.isscalar(N) else out
    j = int(np.clip(np.rint(est.lambda_b_hat / tables.p_b), 1, tables.j_max))
    out = n - float(tables.phi[i, j])
    return float(out) if np.isscalar(N) else out


def dump_phi_csv(tables: LlrTables, path) -> Path:
    """Write the threshold table as (i, j, phi) rows for inspection."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "phi"])
        for i in range(1, tables.i_max + 1):
            for j in range(1, tables.j_max + 1):
                writer.writerow([i, j, int(tables.phi[i, j])])
    return path
