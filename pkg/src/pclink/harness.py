"""Monte-Carlo campaign harness: sweeps, throughput accounting, reporting.

Three sweep pipelines share one reporting backbone:

* ber: coded blocks through the combined Poisson channel with perfect
  synchronization, exact or table LLRs, min-sum decoding.
* msr: one framed preamble embedded in background noise at a random chip
  offset per trial; a miss is an estimate outside the half-symbol tolerance.
* fer: the full receive chain per block: Q framed segments, windowed (or
  full) synchronization, pilot estimation, table LLRs, indication decoding,
  reassembly and decoding; a block lost to any missed segment is an error.

Every trial draws its randomness from a counter-based substream keyed by
(master seed, grid-point index, trial index), so results are byte-identical
for any worker count.  Early stopping is decided on fixed-size chunks of
trials for the same reason.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .channel import ChannelParams, CountStream, chip_intensity_profile
from .estimation import (
    ChannelEstimate,
    LlrTables,
    estimate_exact,
    estimate_quantized,
    llr_exact,
    llr_table,
    snap_to_grid,
)
from .framing import (
    FrameLayout,
    build_frames,
    decode_indication_soft,
    default_sync_sequence,
)
from .ldpc import DecoderConfig, SystematicGenerator, code_for_rate, decode
from .sync import (
    SyncConfig,
    SyncResult,
    calibrate_threshold,
    metric_profiles,
    pilot_symbol_counts,
    signal_threshold,
    symbol_window_sums,
    sync_tolerance,
    synchronize_windowed,
)

CSV_COLUMNS = (
    "lambda_s",
    "lambda_b",
    "code_rate",
    "L",
    "metric_name",
    "errors",
    "trials",
    "rate",
    "seed",
)


@dataclass(frozen=True)
class CampaignConfig:
    """Sweep definition and fixed receiver parameters.

    Grids follow the reference campaigns: lambda values are combined
    (equal-gain) intensities split evenly over detector_count detectors.
    sync_mode 'genie' pins the synchronizer to the true offset and exists for
    pipeline cross-checks.  activation_threshold None resolves to the
    analytic signal-aware threshold at each grid point; activation_target
    instead calibrates a noise-quantile threshold.
    """

    lambda_s_grid: tuple[float, ...] = (3.0, 4.0, 5.0, 6.0, 7.0)
    lambda_b_grid: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    code_rates: tuple[float, ...] = (0.6, 0.8)
    sync_lengths: tuple[int, ...] = (64, 128)
    detector_count: int = 3
    chips_per_symbol: int = 10
    indication_len: int = 17
    segments: int = 10
    guard_len: int = 4
    alpha: float = 1.5
    max_iterations: int = 20
    sync_mode: str = "full"
    activation_threshold: float | None = None
    activation_target: float | None = None
    window_width: int | None = None
    llr_mode: str = "exact"
    estimator: str = "table"
    front_end: str = "ideal"
    isi: bool = False
    p_s: float = 0.5
    p_b: float = 0.01
    cap_s: float = 32.0
    cap_b: float = 2.0
    trials: int = 2000
    max_error_events: int = 100
    chunk_size: int = 50
    master_seed: int = 0
    threads: int = 1
    out_dir: str | None = None
    # Optional link budget; when eta, P_t and xi are all given, the combined
    # signal intensity is derived from them instead of lambda_s_grid.
    eta: float | None = None
    P_t: float | None = None
    xi: float | None = None
    R_s: float = 2e6

    def __post_init__(self) -> None:
        for name in ("lambda_s_grid", "lambda_b_grid", "code_rates", "sync_lengths"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.max_error_events < 1:
            raise ValueError("max_error_events must be >= 1")
        if self.sync_mode not in ("full", "windowed", "genie"):
            raise ValueError("sync_mode must be full, windowed, or genie")
        if self.llr_mode not in ("exact", "table"):
            raise ValueError("llr_mode must be exact or table")
        if self.estimator not in ("table", "exact", "genie"):
            raise ValueError("estimator must be table, exact, or genie")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")
        if self.front_end not in ("ideal", "waveform"):
            raise ValueError("front_end must be ideal or waveform")
        from .ldpc import code_for_rate

        for rate in self.code_rates:
            code_for_rate(rate)
        budget = (self.eta, self.P_t, self.xi)
        if any(v is not None for v in budget) and any(v is None for v in budget):
            raise ValueError("a link budget needs all of eta, P_t, xi")

    def signal_grid(self) -> tuple[float, ...]:
        """Combined-intensity sweep values, from the budget when one is set."""
        if self.eta is None:
            return self.lambda_s_grid
        from .channel import LinkBudget, lambda_from_budget

        per_detector = lambda_from_budget(
            LinkBudget(eta=self.eta, P_t=self.P_t, xi=self.xi, R_s=self.R_s)
        )
        return (self.detector_count * per_detector,)


@dataclass(frozen=True)
class PointRecord:
    lambda_s: float
    lambda_b: float
    code_rate: float
    L: int
    metric_name: str
    errors: int
    trials: int
    seed: int
    wall_time: float = 0.0

    @property
    def rate(self) -> float:
        return self.errors / self.trials


@dataclass(frozen=True)
class CampaignResult:
    records: tuple[PointRecord, ...]

    def by_metric(self, metric_name: str) -> list[PointRecord]:
        return [r for r in self.records if r.metric_name == metric_name]


@dataclass(frozen=True)
class ThroughputReport:
    total_frames: int
    miss_sync_frames: int
    error_frames: int
    payload_fraction: float
    code_rate: float
    symbol_rate: float
    throughput_bps: float


def compute_throughput(
    total_frames: int,
    miss_sync_frames: int,
    error_frames: int,
    payload_fraction: float,
    code_rate: float,
    symbol_rate: float,
) -> ThroughputReport:
    """(1 - (miss + err)/total) * payload_fraction * code_rate * symbol_rate."""
    if total_frames <= 0:
        raise ValueError("total_frames must be positive")
    if miss_sync_frames < 0 or error_frames < 0:
        raise ValueError("frame counters must be non-negative")
    if miss_sync_frames + error_frames > total_frames:
        raise ValueError("lost frames exceed the total")
    if not 0 < payload_fraction <= 1:
        raise ValueError("payload_fraction must be in (0, 1]")
    if code_rate <= 0 or symbol_rate <= 0:
        raise ValueError("code_rate and symbol_rate must be positive")
    loss = (miss_sync_frames + error_frames) / total_frames
    bps = (1.0 - loss) * payload_fraction * code_rate * symbol_rate
    return ThroughputReport(
        total_frames,
        miss_sync_frames,
        error_frames,
        payload_fraction,
        code_rate,
        symbol_rate,
        bps,
    )


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Independent counter-based substream for one Monte-Carlo trial."""
    counter = np.array([0, 0, trial_index, point_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=master_seed, counter=counter))


# Per-process caches for workers; built lazily so forked pools stay cheap.
_CODES: dict[float, object] = {}
_GENS: dict[float, SystematicGenerator] = {}
_SYNCS: dict[int, object] = {}
_TABLES: dict[tuple, LlrTables] = {}


def _code(rate: float):
    if rate not in _CODES:
        from .ldpc import build_code

        _CODES[rate] = build_code(code_for_rate(rate))
    return _CODES[rate]


def _generator(rate: float) -> SystematicGenerator:
    if rate not in _GENS:
        _GENS[rate] = SystematicGenerator(_code(rate))
    return _GENS[rate]


def _sync_seq(length: int):
    if length not in _SYNCS:
        _SYNCS[length] = default_sync_sequence(length)
    return _SYNCS[length]


def _tables(p_s: float, p_b: float, cap_s: float, cap_b: float, pilot_len: int) -> LlrTables:
    key = (p_s, p_b, cap_s, cap_b, pilot_len)
    if key not in _TABLES:
        _TABLES[key] = LlrTables(p_s, p_b, cap_s, cap_b, pilot_len)
    return _TABLES[key]


def _ber_trial(task: tuple) -> tuple[int, int]:
    (seed, pt, tr, rate, lam_s, lam_b, k_det, m_chips, alpha, max_iter, llr_mode,
     front_end, p_s, p_b, cap_s, cap_b) = task
    rng = trial_rng(seed, pt, tr)
    pc = _code(rate)
    gen = _generator(rate)
    message = rng.integers(0, 2, pc.k_c).astype(np.uint8)
    codeword = gen.encode(message)
    if front_end == "waveform":
        from .waveform import WaveformConfig, waveform_symbol_counts

        counts = waveform_symbol_counts(
            codeword, lam_s, lam_b, m_chips, WaveformConfig(), rng
        )
    else:
        lam = np.where(codeword == 1, lam_s + lam_b, lam_b)
        counts = rng.poisson(lam)
    if llr_mode == "table":
        tables = _tables(p_s, p_b, cap_s, cap_b, 64)
        est = snap_to_grid(ChannelEstimate(lam_s, lam_b), tables)
        llrs = llr_table(counts, est, tables)
    else:
        llrs = llr_exact(counts, ChannelEstimate(lam_s, lam_b))
    result = decode(llrs, pc, DecoderConfig(alpha, max_iter))
    errs = int((result.bits[: pc.k_c] != message).sum())
    return errs, int(errs > 0 or not result.converged)


def _msr_trial(task: tuple) -> tuple[int]:
    (seed, pt, tr, length, lam_s, lam_b, k_det, m_chips, mode, thd, window,
     payload_len, indication_len) = task
    rng = trial_rng(seed, pt, tr)
    seq = _sync_seq(length)
    m = m_chips
    span = length * m
    prefix = int(rng.integers(span, 3 * span))
    body = rng.integers(0, 2, indication_len + payload_len).astype(np.uint8)
    symbols = np.concatenate([seq.bits, body])
    chip_bits = np.concatenate(
        [
            np.zeros(prefix, dtype=np.uint8),
            np.repeat(symbols, m),
            np.zeros(4 * m, dtype=np.uint8),
        ]
    )
    lam = lam_b / m + chip_bits * (lam_s / m)
    counts = rng.poisson(lam)
    t_true = prefix + span - 1
    tol = sync_tolerance(m)
    bipolar, unipolar = metric_profiles(counts, seq, m)
    if mode == "full":
        t_hat = int(np.argmax(bipolar)) + span - 1
        return (int(abs(t_hat - t_true) > tol),)
    if thd is None:
        thd = signal_threshold(seq, lam_s, lam_b)
    window = window if window is not None else 2 * m
    hits = np.flatnonzero(unipolar > thd)
    if hits.size == 0:
        return (1,)
    a0 = int(hits[0])
    t_hat = a0 + int(np.argmax(bipolar[a0 : a0 + window])) + span - 1
    return (int(abs(t_hat - t_true) > tol),)


def _fer_trial(task: tuple) -> tuple[int, int, int, int]:
    (seed, pt, tr, rate, length, lam_s, lam_b, k_det, m_chips, indication_len,
     segments, guard_len, alpha, max_iter, sync_mode, thd, window, estimator,
     isi, p_s, p_b, cap_s, cap_b) = task
    rng = trial_rng(seed, pt, tr)
    pc = _code(rate)
    gen = _generator(rate)
    seq = _sync_seq(length)
    m = m_chips
    span = length * m
    layout = FrameLayout(
        sync_len=length,
        indication_len=indication_len,
        segments=segments,
        payload_len=pc.n_c // segments,
        chips_per_symbol=m,
        guard_len=guard_len,
    )
    params = ChannelParams.equal_split(lam_s, lam_b, k_det, m, isi_enabled=isi)
    tables = _tables(p_s, p_b, cap_s, cap_b, length)
    if thd is None and sync_mode == "windowed":
        thd = signal_threshold(seq, lam_s, lam_b)
    window = window if window is not None else 2 * m
    tol = sync_tolerance(m)

    message = rng.integers(0, 2, pc.k_c).astype(np.uint8)
    codeword = gen.encode(message)
    frames = build_frames(codeword, layout, seq)

    slots: dict[int, np.ndarray] = {}
    duplicate = False
    missed = errored = correct = 0
    for q, frame in enumerate(frames):
        prefix = int(rng.integers(span, 2 * span))
        lam_frame = chip_intensity_profile(params, frame.symbols())
        lam = np.concatenate(
            [
                np.full(prefix, lam_b / m),
                lam_frame,
                np.full((layout.guard_len + 2) * m, lam_b / m),
            ]
        )
        counts = rng.poisson(lam)
        stream = CountStream(counts, m)
        t_true = prefix + span - 1

        if sync_mode == "genie":
            t_hat: int | None = t_true
        elif sync_mode == "full":
            bipolar, _ = metric_profiles(counts, seq, m)
            t_hat = int(np.argmax(bipolar)) + span - 1
        else:
            res: SyncResult = synchronize_windowed(
                stream, seq, SyncConfig(activation_threshold=thd, window_width=window)
            )
            t_hat = res.chip_index

        payload_start = None
        if t_hat is not None:
            payload_start = t_hat + 1 + indication_len * m
            if (
                t_hat - span + 1 < 0
                or payload_start + layout.payload_len * m > counts.size
            ):
                payload_start = None
        if payload_start is None:
            missed += 1
            continue

        pilots = pilot_symbol_counts(stream, t_hat, length)
        if estimator == "genie":
            est = ChannelEstimate(lam_s, lam_b)
        elif estimator == "exact":
            est = estimate_exact(pilots, seq)
        else:
            est = estimate_quantized(pilots, seq, tables)

        ind_counts = symbol_window_sums(counts, t_hat + 1, indication_len, m)
        pay_counts = symbol_window_sums(counts, payload_start, layout.payload_len, m)
        if estimator == "table":
            ind_llr = llr_table(ind_counts, est, tables)
            pay_llr = llr_table(pay_counts, est, tables)
        else:
            ind_llr = llr_exact(ind_counts, est)
            pay_llr = llr_exact(pay_counts, est)

        # Genie placement pins the segment label too, so the mode degenerates
        # cleanly to the perfect-sync pipeline for cross-checks.
        if sync_mode == "genie":
            q_hat = q
        else:
            q_hat = decode_indication_soft(ind_llr, indication_len)
        if abs(t_hat - t_true) > tol or q_hat != q:
            errored += 1
        else:
            correct += 1
        if q_hat in slots or q_hat >= segments:
            duplicate = True
        else:
            slots[q_hat] = pay_llr

    if duplicate or len(slots) < segments:
        return 1, missed, errored, correct
    llrs = np.concatenate([slots[q] for q in range(segments)])
    result = decode(llrs, pc, DecoderConfig(alpha, max_iter))
    block_err = int(
        not result.converged or (result.bits[: pc.k_c] != message).any()
    )
    return block_err, missed, errored, correct


def _run_point(
    worker,
    make_task,
    cfg: CampaignConfig,
    point_index: int,
    pool: Executor | None,
    event_slot: int,
) -> list[tuple]:
    """Chunked trial loop with deterministic early stopping.

    event_slot selects which element of the worker tuple counts as an error
    event.  The chunk boundaries depend only on the config, so results do not
    change with the worker count.
    """
    out: list[tuple] = []
    events = 0
    for start in range(0, cfg.trials, cfg.chunk_size):
        idxs = range(start, min(start + cfg.chunk_size, cfg.trials))
        tasks = [make_task(point_index, t) for t in idxs]
        if pool is None:
            results = [worker(t) for t in tasks]
        else:
            results = list(pool.map(worker, tasks))
        out.extend(results)
        events += sum(r[event_slot] for r in results)
        if events >= cfg.max_error_events:
            break
    return out


def _make_pool(cfg: CampaignConfig) -> Executor | None:
    if cfg.threads <= 1:
        return None
    return ProcessPoolExecutor(max_workers=cfg.threads)


def run_ber_sweep(cfg: CampaignConfig) -> CampaignResult:
    """Perfect-sync coded BER/FER over the (rate, lambda_b, lambda_s) grid."""
    records: list[PointRecord] = []
    points = [
        (rate, lb, ls)
        for rate in cfg.code_rates
        for lb in cfg.lambda_b_grid
        for ls in cfg.signal_grid()
    ]
    pool = _make_pool(cfg)
    try:
        for pi, (rate, lb, ls) in enumerate(points):
            pc = _code(rate)
            t0 = time.perf_counter()

            def task(point, trial, rate=rate, lb=lb, ls=ls):
                return (
                    cfg.master_seed, point, trial, rate, ls, lb,
                    cfg.detector_count, cfg.chips_per_symbol, cfg.alpha,
                    cfg.max_iterations, cfg.llr_mode, cfg.front_end,
                    cfg.p_s, cfg.p_b, cfg.cap_s, cfg.cap_b,
                )

            results = _run_point(_ber_trial, task, cfg, pi, pool, event_slot=1)
            wall = time.perf_counter() - t0
            bit_errors = sum(r[0] for r in results)
            block_errors = sum(r[1] for r in results)
            blocks = len(results)
            records.append(
                PointRecord(ls, lb, rate, 0, "ber", bit_errors, blocks * pc.k_c,
                            cfg.master_seed, wall)
            )
            records.append(
                PointRecord(ls, lb, rate, 0, "fer", block_errors, blocks,
                            cfg.master_seed, wall)
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return CampaignResult(tuple(records))


def _resolved_threshold(
    cfg: CampaignConfig, point_index: int, length: int, ls: float, lb: float
) -> float | None:
    """Explicit threshold wins; else calibrate to the target if one is set.

    None falls through to the analytic signal-aware threshold inside the
    trial workers.
    """
    if cfg.activation_threshold is not None or cfg.activation_target is None:
        return cfg.activation_threshold
    params = ChannelParams.equal_split(
        ls, lb, cfg.detector_count, cfg.chips_per_symbol
    )
    rng = np.random.default_rng((cfg.master_seed, 1, point_index))
    return calibrate_threshold(params, _sync_seq(length), cfg.activation_target, rng)


def run_msr_sweep(cfg: CampaignConfig) -> CampaignResult:
    """Miss-synchronization rate over the (L, lambda_b, lambda_s) grid."""
    records: list[PointRecord] = []
    points = [
        (length, lb, ls)
        for length in cfg.sync_lengths
        for lb in cfg.lambda_b_grid
        for ls in cfg.signal_grid()
    ]
    payload_len = _code(cfg.code_rates[0]).n_c // cfg.segments
    pool = _make_pool(cfg)
    try:
        for pi, (length, lb, ls) in enumerate(points):
            t0 = time.perf_counter()
            thd = _resolved_threshold(cfg, pi, length, ls, lb)

            def task(point, trial, length=length, lb=lb, ls=ls, thd=thd):
                return (
                    cfg.master_seed, point, trial, length, ls, lb,
                    cfg.detector_count, cfg.chips_per_symbol, cfg.sync_mode,
                    thd, cfg.window_width, payload_len,
                    cfg.indication_len,
                )

            results = _run_point(_msr_trial, task, cfg, pi, pool, event_slot=0)
            wall = time.perf_counter() - t0
            misses = sum(r[0] for r in results)
            records.append(
                PointRecord(ls, lb, 0.0, length, "msr", misses, len(results),
                            cfg.master_seed, wall)
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return CampaignResult(tuple(records))


def run_fer_sweep(cfg: CampaignConfig) -> CampaignResult:
    """Full-pipeline frame error rate over the (rate, lambda_b, lambda_s) grid."""
    records: list[PointRecord] = []
    length = cfg.sync_lengths[0]
    points = [
        (rate, lb, ls)
        for rate in cfg.code_rates
        for lb in cfg.lambda_b_grid
        for ls in cfg.signal_grid()
    ]
    pool = _make_pool(cfg)
    try:
        for pi, (rate, lb, ls) in enumerate(points):
            t0 = time.perf_counter()
            thd = _resolved_threshold(cfg, pi, length, ls, lb)

            def task(point, trial, rate=rate, lb=lb, ls=ls, thd=thd):
                return (
                    cfg.master_seed, point, trial, rate, length, ls, lb,
                    cfg.detector_count, cfg.chips_per_symbol, cfg.indication_len,
                    cfg.segments, cfg.guard_len, cfg.alpha, cfg.max_iterations,
                    cfg.sync_mode, thd, cfg.window_width,
                    cfg.estimator, cfg.isi, cfg.p_s, cfg.p_b, cfg.cap_s,
                    cfg.cap_b,
                )

            results = _run_point(_fer_trial, task, cfg, pi, pool, event_slot=0)
            wall = time.perf_counter() - t0
            block_errors = sum(r[0] for r in results)
            records.append(
                PointRecord(ls, lb, rate, length, "fer", block_errors,
                            len(results), cfg.master_seed, wall)
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return CampaignResult(tuple(records))


def write_csv(records, path) -> Path:
    """One row per record in the fixed column order, canonically sorted."""
    path = Path(path)
    ordered = sorted(
        records,
        key=lambda r: (r.metric_name, r.code_rate, r.L, r.lambda_b, r.lambda_s),
    )
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in ordered:
            writer.writerow(
                [
                    repr(float(r.lambda_s)),
                    repr(float(r.lambda_b)),
                    repr(float(r.code_rate)),
                    r.L,
                    r.metric_name,
                    r.errors,
                    r.trials,
                    repr(r.rate),
                    r.seed,
                ]
            )
    return path


def save_campaign(result: CampaignResult, out_dir, stem: str) -> list[Path]:
    """Write the CSV report and its companion figures; returns written paths."""
    from .plots import render_campaign_plots

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [write_csv(result.records, out / f"{stem}.csv")]
    paths.extend(render_campaign_plots(result.records, out, stem))
    return paths


def load_config_file(path) -> dict[str, str]:
    """Flat key = value lines; blank lines and # comments ignored."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def _parse_tuple(cast):
    def parse(text: str):
        items = [t for t in text.replace(",", " ").split() if t]
        return tuple(cast(t) for t in items)

    return parse


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _parse_optional(cast):
    def parse(text: str):
        return None if text.lower() in ("none", "auto") else cast(text)

    return parse


_FIELD_PARSERS = {
    "lambda_s_grid": _parse_tuple(float),
    "lambda_b_grid": _parse_tuple(float),
    "code_rates": _parse_tuple(float),
    "sync_lengths": _parse_tuple(int),
    "detector_count": int,
    "chips_per_symbol": int,
    "indication_len": int,
    "segments": int,
    "guard_len": int,
    "alpha": float,
    "max_iterations": int,
    "sync_mode": str,
    "activation_threshold": _parse_optional(float),
    "activation_target": _parse_optional(float),
    "window_width": _parse_optional(int),
    "llr_mode": str,
    "estimator": str,
    "front_end": str,
    "isi": _parse_bool,
    "p_s": float,
    "p_b": float,
    "cap_s": float,
    "cap_b": float,
    "trials": int,
    "max_error_events": int,
    "chunk_size": int,
    "master_seed": int,
    "threads": int,
    "out_dir": str,
    "eta": _parse_optional(float),
    "P_t": _parse_optional(float),
    "xi": _parse_optional(float),
    "R_s": float,
}

# Short config keys matching the air-interface notation.
_KEY_ALIASES = {
    "L": "sync_lengths",
    "L_p": "indication_len",
    "Q": "segments",
    "M": "chips_per_symbol",
    "K": "detector_count",
    "mode": "sync_mode",
    "C_thd": "activation_threshold",
    "W": "window_width",
}


def apply_overrides(cfg: CampaignConfig, mapping: dict[str, str]) -> CampaignConfig:
    """Typed application of flat config keys onto a config object."""
    known = {f.name for f in fields(CampaignConfig)}
    updates = {}
    for key, text in mapping.items():
        key = _KEY_ALIASES.get(key, key)
        if key not in known:
            raise ValueError(f"unknown config key: {key}")
        try:
            updates[key] = _FIELD_PARSERS[key](text)
        except ValueError as exc:
            raise ValueError(f"bad value for {key}: {text} ({exc})") from exc
    return replace(cfg, **updates)
