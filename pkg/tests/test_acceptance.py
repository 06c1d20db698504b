"""Acceptance gate: one test per shipped guarantee, tolerances pinned.

Run with -v to get one pass/fail line per criterion.  Each test prints a
PASS line with the measured quantity so the log doubles as a report.
"""

import math
import time
from decimal import ROUND_CEILING, Decimal, getcontext

import numpy as np
import pytest
from scipy import stats

from pclink.channel import ChannelParams, CountStream, combine_equal_gain, sample_chip_counts, sample_symbol_counts
from pclink.estimation import ChannelEstimate, LlrTables, estimate_exact, llr_exact, llr_table
from pclink.framing import FrameLayout, build_frames, default_sync_sequence, reassemble
from pclink.harness import CampaignConfig, compute_throughput, run_ber_sweep, run_msr_sweep
from pclink.ldpc import (
    PAPER_CODES,
    DecoderConfig,
    QcLdpcParams,
    build_code,
    build_generator,
    decode,
    decode_campaign_point,
    syndrome,
)
from pclink.sync import SyncConfig, synchronize_full, synchronize_windowed
from pclink.waveform import WaveformConfig, count_pulses, end_to_end_count_fidelity, synthesize


def test_criterion_01_code_orthogonality_and_girth():
    """Full-size rate-0.6 code: G orthogonal to H, no 4-cycles in 1e6 sampled pairs; < 60 s."""
    t0 = time.perf_counter()
    pc = build_code(PAPER_CODES[0.6])
    gen = build_generator(pc)
    # Every unit message exercises one generator row; by linearity this covers
    # the whole row space, i.e. G H^T = 0 exhaustively.
    for i in range(pc.k_c):
        msg = np.zeros(pc.k_c, dtype=np.uint8)
        msg[i] = 1
        assert not syndrome(gen.encode(msg), pc).any()
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert not syndrome(gen.encode(rng.integers(0, 2, pc.k_c).astype(np.uint8)), pc).any()

    # column -> incident checks, padded; message columns have degree J
    col_rows = [[] for _ in range(pc.n_c)]
    for r, row in enumerate(pc.cols):
        for c in row:
            if c < pc.n_c:
                col_rows[int(c)].append(r)
    width = max(len(c) for c in col_rows)
    padded = np.full((pc.n_c, width), -1, dtype=np.int32)
    for c, rows in enumerate(col_rows):
        padded[c, : len(rows)] = rows

    pairs = 0
    worst = 0
    while pairs < 1_000_000:
        batch = min(100_000, 1_000_000 - pairs)
        a = rng.integers(0, pc.n_c, batch)
        b = rng.integers(0, pc.n_c, batch)
        keep = a != b
        a, b = a[keep], b[keep]
        common = ((padded[a][:, :, None] == padded[b][:, None, :]) & (padded[a][:, :, None] >= 0)).sum(axis=(1, 2))
        worst = max(worst, int(common.max()))
        assert worst <= 1, "two columns share two checks: 4-cycle"
        pairs += int(keep.sum())
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"PASS criterion 1: GH^T = 0 over all {pc.k_c} generator rows, "
          f"max shared checks {worst} over {pairs} column pairs, {elapsed:.1f} s")


def test_criterion_02_high_snr_decoding_clean_and_fast():
    """100 blocks at lambda_s=20, lambda_b=0.1 decode with zero errors, < 50 ms/block."""
    pc = build_code(PAPER_CODES[0.6])
    params = ChannelParams.equal_split(20.0, 0.1, 3, 10)
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    ber, fer = decode_campaign_point(params, pc, DecoderConfig(1.5, 20), 100, rng)
    per_block = (time.perf_counter() - t0) / 100
    assert ber == 0.0
    assert fer == 0.0
    assert per_block < 0.05
    print(f"PASS criterion 2: 100 clean blocks, {per_block * 1e3:.1f} ms/block")


def test_criterion_03_coded_ber_floor():
    """Rate 0.6, lambda_b=0.5: BER < 1e-5 at lambda_s=5.0 over >= 1e7 information bits."""
    cfg = CampaignConfig(
        lambda_s_grid=(5.0,),
        lambda_b_grid=(0.5,),
        code_rates=(0.6,),
        llr_mode="exact",
        trials=1400,
        chunk_size=200,
        max_error_events=10**9,
        master_seed=2026,
    )
    t0 = time.perf_counter()
    rec = run_ber_sweep(cfg).by_metric("ber")[0]
    elapsed = time.perf_counter() - t0
    assert rec.trials == 1400 * 7578
    assert rec.trials >= 10**7
    assert rec.rate < 1e-5
    assert elapsed < 1800.0
    print(f"PASS criterion 3: BER {rec.rate:.2e} ({rec.errors} errors / {rec.trials} bits), {elapsed:.0f} s")


def test_criterion_04_msr_performance_and_length_ordering():
    """Full-search MSR < 1e-3 at (L=64, lambda_s=5, lambda_b=0.5) over 1e4 frames;
    L=128 never worse than L=64 beyond 3 sigma across the lambda_s grid."""
    point_cfg = CampaignConfig(
        lambda_s_grid=(5.0,),
        lambda_b_grid=(0.5,),
        sync_lengths=(64,),
        sync_mode="full",
        trials=10_000,
        chunk_size=1000,
        max_error_events=10**9,
        master_seed=40,
    )
    rec = run_msr_sweep(point_cfg).records[0]
    assert rec.trials == 10_000
    assert rec.rate < 1e-3

    grid_cfg = CampaignConfig(
        lambda_s_grid=(2.0, 3.0, 4.0, 5.0),
        lambda_b_grid=(0.5,),
        sync_lengths=(64, 128),
        sync_mode="full",
        trials=1200,
        chunk_size=1200,
        max_error_events=10**9,
        master_seed=41,
    )
    recs = run_msr_sweep(grid_cfg).records
    for lam_s in grid_cfg.lambda_s_grid:
        p64 = next(r for r in recs if r.L == 64 and r.lambda_s == lam_s).rate
        p128 = next(r for r in recs if r.L == 128 and r.lambda_s == lam_s).rate
        n = 1200
        se = math.sqrt(p64 * (1 - p64) / n + p128 * (1 - p128) / n)
        assert p128 <= p64 + 3 * se, f"L=128 worse at lambda_s={lam_s}: {p128} vs {p64}"
    print(f"PASS criterion 4: MSR {rec.rate:.1e} at the operating point; "
          f"L=128 within 3 sigma of L=64 at all {len(grid_cfg.lambda_s_grid)} grid points")


def test_criterion_05_throughput_presets():
    """Frame-accounting arithmetic reproduces 1.125 and 1.113 Mbps to 3 decimals."""
    lab = compute_throughput(20_000, 50, 1, 1263 / 1344, 0.6, 2e6)
    field_rpt = compute_throughput(17_000, 221, 5, 1263 / 1344, 0.6, 2e6)
    assert round(lab.throughput_bps / 1e6, 3) == 1.125
    assert round(field_rpt.throughput_bps / 1e6, 3) == 1.113
    print(f"PASS criterion 5: {lab.throughput_bps / 1e6:.3f} and {field_rpt.throughput_bps / 1e6:.3f} Mbps")


def test_criterion_06_estimator_unbiased():
    """Class-mean estimates over 1e5 pilot blocks stay within 3 SE of the truth."""
    sync = default_sync_sequence(64)
    lam = sync.bits.astype(float) * 5.0 + 0.5
    rng = np.random.default_rng(6)
    n = 100_000
    pilots = rng.poisson(lam, size=(n, 64))
    ls = np.empty(n)
    lb = np.empty(n)
    for k in range(n):
        est = estimate_exact(pilots[k], sync)
        ls[k] = est.lambda_s_hat
        lb[k] = est.lambda_b_hat
    for name, vals, truth in (("lambda_s", ls, 5.0), ("lambda_b", lb, 0.5)):
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - truth) < 3 * se, f"{name} biased: {vals.mean()} vs {truth}"
    print(f"PASS criterion 6: means ({ls.mean():.4f}, {lb.mean():.4f}) vs (5.0, 0.5) over {n} blocks")


def test_criterion_07_threshold_table_exactness():
    """Every threshold cell equals the ceiling formula in 50-digit arithmetic;
    table and exact LLRs agree in sign whenever the count is >= 1 from the threshold."""
    tables = LlrTables()
    getcontext().prec = 50
    ps, pb = Decimal("0.5"), Decimal("0.01")
    checked = 0
    for i in range(1, tables.i_max + 1):
        for j in range(1, tables.j_max + 1):
            ls, lb = ps * i, pb * j
            thr = ls / ((ls + lb) / lb).ln()
            ref = int(thr.to_integral_value(rounding=ROUND_CEILING))
            assert int(tables.phi[i, j]) == ref, (i, j)
            checked += 1

            est = ChannelEstimate(0.5 * i, 0.01 * j)
            fthr = float(thr)
            counts = np.arange(0, int(tables.phi[i, j]) + 6)
            away = np.abs(counts - fthr) >= 1.0
            tl = llr_table(counts[away], est, tables)
            ex = llr_exact(counts[away], est)
            assert np.all(np.sign(tl) == np.sign(ex)), (i, j)
    assert checked == tables.i_max * tables.j_max
    print(f"PASS criterion 7: {checked} cells exact, signs agree away from threshold")


def test_criterion_08_diversity_superposition():
    """Summed K=3 detector counts are indistinguishable from one Poisson stream
    at the total intensity (chi-square, 1% level, 1e5 samples)."""
    params = ChannelParams(lambda_s=(1.0, 1.0, 1.0), lambda_b=(0.1, 0.1, 0.1), chips_per_symbol=10)
    rng = np.random.default_rng(8)
    n = 100_000
    draws = np.empty(n, dtype=np.int64)
    for k in range(n):
        draws[k] = combine_equal_gain(sample_symbol_counts(params, 1, rng))
    kmax = int(draws.max())
    observed = np.bincount(draws, minlength=kmax + 1).astype(float)
    expected = stats.poisson.pmf(np.arange(kmax + 1), 3.3) * n
    # fold the sparse upper tail into the last healthy bin
    cut = int(np.argmax(expected < 5.0)) if (expected < 5.0).any() else expected.size
    obs = np.concatenate([observed[:cut], [observed[cut:].sum()]])
    exp = np.concatenate([expected[:cut], [n - expected[:cut].sum()]])
    statval, pvalue = stats.chisquare(obs, exp)
    assert pvalue > 0.01, f"chi-square p = {pvalue}"
    print(f"PASS criterion 8: chi-square p = {pvalue:.3f} over {cut + 1} bins, n = {n}")


def test_criterion_09_windowed_degenerates_to_full():
    """Zero activation threshold plus a stream-wide window reproduces the full
    search index on 1e3 random streams."""
    sync = default_sync_sequence(64)
    m = 10
    span = 64 * m
    rng = np.random.default_rng(9)
    for _ in range(1000):
        lam_s = float(rng.uniform(2.0, 8.0))
        lam_b = float(rng.uniform(0.1, 1.0))
        prefix = int(rng.integers(span, 3 * span))
        body = rng.integers(0, 2, 40).astype(np.uint8)
        bits = np.concatenate([sync.bits, body])
        chip_bits = np.concatenate([
            np.zeros(prefix, dtype=np.uint8),
            np.repeat(bits, m),
            np.zeros(2 * m, dtype=np.uint8),
        ])
        counts = rng.poisson(lam_b / m + chip_bits * (lam_s / m))
        stream = CountStream(counts, m)
        cfg = SyncConfig(activation_threshold=0.0, window_width=counts.size)
        res = synchronize_windowed(stream, sync, cfg)
        assert res.activated
        assert res.chip_index == synchronize_full(stream, sync)
    print("PASS criterion 9: windowed == full on 1000 random streams")


def test_criterion_10_property_suites():
    """Four randomized invariants, >= 1e3 cases each."""
    # 1. normalized min-sum is invariant to positive scaling of its inputs
    pc = build_code(QcLdpcParams(3, 2, 7, 3, 2))
    rng = np.random.default_rng(10)
    dcfg = DecoderConfig(1.5, 20)
    for _ in range(1000):
        llrs = rng.normal(0.0, 2.0, pc.n_c)
        scale = float(rng.uniform(0.05, 20.0))
        a = decode(llrs, pc, dcfg)
        b = decode(scale * llrs, pc, dcfg)
        assert np.array_equal(a.bits, b.bits)
        assert a.converged == b.converged

    # 2. chip-level sampling preserves the symbol-level draw for any seed
    for _ in range(1000):
        k = int(rng.integers(1, 5))
        m_chips = int(rng.integers(1, 17))
        lam_s = float(rng.uniform(0.0, 12.0))
        lam_b = float(rng.uniform(0.05, 2.0))
        symbol = int(rng.integers(0, 2))
        seed = int(rng.integers(0, 2**31))
        params = ChannelParams.equal_split(lam_s, lam_b, k, m_chips)
        chips = sample_chip_counts(params, symbol, np.random.default_rng(seed))
        direct = sample_symbol_counts(params, symbol, np.random.default_rng(seed))
        assert np.array_equal(chips.sum(axis=1), direct)

    # 3. segmentation round-trips any codeword through shuffled frames
    for _ in range(1000):
        segments = int(rng.choice([1, 2, 4, 5, 10]))
        payload = int(rng.integers(20, 101))
        sync_len = int(rng.choice([16, 32, 64]))
        layout = FrameLayout(
            sync_len=sync_len,
            indication_len=17,
            segments=segments,
            payload_len=payload,
            chips_per_symbol=2,
        )
        sync = default_sync_sequence(sync_len)
        codeword = rng.integers(0, 2, segments * payload).astype(np.uint8)
        frames = build_frames(codeword, layout, sync)
        order = rng.permutation(segments)
        assert np.array_equal(reassemble([frames[q] for q in order], layout), codeword)

    # 4a. threshold crossings never exceed true arrivals
    wcfg = WaveformConfig()
    for _ in range(1000):
        n_arr = int(rng.integers(1, 40))
        arrivals = np.sort(rng.uniform(0.0, 5e-7, n_arr))
        w = synthesize(arrivals, wcfg)
        assert count_pulses(w, wcfg.v_thd)[0] <= n_arr
    # 4b. fidelity decays monotonically with intensity, 1e4 trials per point
    ratios = [
        end_to_end_count_fidelity(lam, wcfg, 10_000, np.random.default_rng(100 + k))
        for k, lam in enumerate((0.5, 5.0, 20.0, 50.0))
    ]
    assert all(a > b for a, b in zip(ratios, ratios[1:])), ratios
    assert ratios[0] > 0.9
    print("PASS criterion 10: scaling, chip-sum, framing, waveform suites "
          f"(fidelity {', '.join(f'{r:.3f}' for r in ratios)})")
