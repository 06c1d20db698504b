"""Quasi-cyclic LDPC construction, systematic encoding, min-sum decoding."""

import numpy as np
import pytest

from pclink.channel import ChannelParams
from pclink.ldpc import (
    PAPER_CODES,
    DecoderConfig,
    QcLdpcParams,
    build_code,
    build_generator,
    code_for_rate,
    decode,
    decode_campaign_point,
    encode,
    export_alist,
    is_prime,
    multiplicative_order,
    parse_alist,
    syndrome,
)

TOY = QcLdpcParams(3, 2, 7, 3, 2)  # n=35, k=14, small enough to enumerate


def gf2_inverse(mat):
    """Gaussian elimination over GF(2), used as an independent oracle."""
    n = mat.shape[0]
    a = np.concatenate([mat.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivot = col + int(np.argmax(a[col:, col]))
        assert a[pivot, col] == 1, "singular"
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
        rows = np.flatnonzero(a[:, col])
        rows = rows[rows != col]
        a[rows] ^= a[col]
    return a[:, n:]


def test_primality_and_order():
    assert is_prime(421)
    assert not is_prime(1)
    assert not is_prime(420)
    assert multiplicative_order(3, 7) == 6
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(6, 7) == 2


def test_paper_code_dimensions():
    p06 = PAPER_CODES[0.6]
    assert (p06.J, p06.D, p06.p) == (12, 18, 421)
    assert p06.n_c == 12630
    assert p06.k_c == 7578
    assert p06.rate == pytest.approx(0.6)
    p08 = PAPER_CODES[0.8]
    assert (p08.J, p08.D, p08.p) == (6, 24, 421)
    assert p08.n_c == 12630
    assert p08.k_c == 10104
    assert p08.rate == pytest.approx(0.8)


def test_code_for_rate():
    assert code_for_rate(0.6) is PAPER_CODES[0.6]
    assert code_for_rate(0.8) is PAPER_CODES[0.8]
    with pytest.raises(ValueError):
        code_for_rate(0.5)


def test_params_validation():
    with pytest.raises(ValueError):
        QcLdpcParams(2, 2, 8, 3, 2)  # p not prime
    with pytest.raises(ValueError):
        QcLdpcParams(2, 2, 7, 3, 3)  # q1 == q2
    with pytest.raises(ValueError):
        QcLdpcParams(3, 2, 7, 6, 2)  # ord(6)=2 < J
    with pytest.raises(ValueError):
        QcLdpcParams(2, 4, 7, 3, 6)  # ord(6)=2 < D
    with pytest.raises(ValueError):
        QcLdpcParams(2, 2, 7, 9, 2)  # q1 outside [1, p)


def test_shift_array_hand_case():
    pc = build_code(QcLdpcParams(2, 2, 7, 3, 2))
    assert np.all(pc.shifts[0, :] == 0)
    assert np.all(pc.shifts[:, 0] == 0)
    assert pc.shifts[1, 1] == 2  # (3-1)(2-1) mod 7


def test_parity_check_shape_and_degrees():
    pc = build_code(TOY)
    assert pc.n_c == 35
    assert pc.k_c == 14
    assert pc.m == 21
    degs = pc.row_degrees()
    assert degs[0] == TOY.D + 1  # first parity row has no predecessor column
    assert np.all(degs[1:] == TOY.D + 2)


def test_dense_matches_adjacency():
    pc = build_code(TOY)
    H = pc.dense()
    assert H.shape == (21, 35)
    for row, cols in enumerate(pc.cols):
        live = [c for c in cols if c < pc.n_c]
        assert sorted(np.flatnonzero(H[row]).tolist()) == sorted(live)


@pytest.mark.parametrize("params", [QcLdpcParams(2, 2, 7, 3, 2), QcLdpcParams(2, 3, 11, 3, 2)])
def test_exhaustive_girth_small_codes(params):
    # no two columns of the full H share more than one check
    H = build_code(params).dense()
    gram = H.astype(np.int32).T @ H.astype(np.int32)
    np.fill_diagonal(gram, 0)
    assert gram.max() <= 1


def test_parity_solver_matches_dense_inverse():
    pc = build_code(TOY)
    H = pc.dense()
    H2 = H[:, pc.k_c :]
    # lower bidiagonal sawtooth inverts to lower-triangular all-ones
    assert np.array_equal(gf2_inverse(H2), np.tril(np.ones((pc.m, pc.m), dtype=np.uint8)))
    gen = build_generator(pc)
    rng = np.random.default_rng(0)
    for _ in range(20):
        msg = rng.integers(0, 2, pc.k_c).astype(np.uint8)
        expected = (gf2_inverse(H2) @ ((H[:, : pc.k_c] @ msg) % 2)) % 2
        assert np.array_equal(gen.parity_of(msg), expected)


def test_generator_rows_are_codewords():
    pc = build_code(TOY)
    G = build_generator(pc).dense()
    assert G.shape == (pc.k_c, pc.n_c)
    assert np.array_equal(G[:, : pc.k_c], np.eye(pc.k_c, dtype=np.uint8))
    assert not ((G @ pc.dense().T) % 2).any()


def test_encode_zero_and_random():
    pc = build_code(TOY)
    assert encode(np.zeros(pc.k_c, dtype=np.uint8), pc).sum() == 0
    rng = np.random.default_rng(5)
    for _ in range(50):
        cw = encode(rng.integers(0, 2, pc.k_c).astype(np.uint8), pc)
        assert cw.size == pc.n_c
        assert not syndrome(cw, pc).any()


def test_syndrome_flags_single_flips():
    pc = build_code(TOY)
    cw = encode(np.random.default_rng(1).integers(0, 2, pc.k_c).astype(np.uint8), pc)
    for pos in range(0, pc.n_c, 3):
        bad = cw.copy()
        bad[pos] ^= 1
        assert syndrome(bad, pc).any()


def test_decode_noiseless_fixed_point():
    pc = build_code(TOY)
    cw = encode(np.random.default_rng(2).integers(0, 2, pc.k_c).astype(np.uint8), pc)
    llrs = np.where(cw == 1, 8.0, -8.0)
    result = decode(llrs, pc, DecoderConfig())
    assert result.converged
    assert result.iterations_used == 1
    assert np.array_equal(result.bits, cw)


def test_decode_all_zero_llrs_converges_to_zero_word():
    pc = build_code(TOY)
    result = decode(np.zeros(pc.n_c), pc, DecoderConfig())
    assert result.converged
    assert result.bits.sum() == 0


def test_decode_validation():
    pc = build_code(TOY)
    with pytest.raises(ValueError):
        decode(np.zeros(pc.n_c - 1), pc, DecoderConfig())
    with pytest.raises(ValueError):
        DecoderConfig(alpha=1.0)
    with pytest.raises(ValueError):
        DecoderConfig(max_iterations=0)


def test_decode_corrects_noisy_blocks():
    pc = build_code(TOY)
    params = ChannelParams.equal_split(12.0, 0.3, 3, 10)
    rng = np.random.default_rng(3)
    ber, fer = decode_campaign_point(params, pc, DecoderConfig(), 50, rng)
    assert ber == 0.0
    assert fer == 0.0


def test_converged_implies_zero_syndrome():
    pc = build_code(TOY)
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(300):
        llrs = rng.normal(0.0, 2.0, pc.n_c)
        result = decode(llrs, pc, DecoderConfig())
        assert result.iterations_used <= DecoderConfig().max_iterations
        if result.converged:
            assert not syndrome(result.bits, pc).any()
            checked += 1
    assert checked > 0


def test_decoder_matches_ml_on_toy_code():
    # exhaustive max-likelihood over all 2^14 codewords as the reference
    pc = build_code(TOY)
    G = build_generator(pc).dense()
    messages = ((np.arange(1 << pc.k_c)[:, None] >> np.arange(pc.k_c)[None, :]) & 1).astype(np.uint8)
    book = (messages @ G) % 2
    params = ChannelParams.equal_split(10.0, 0.1, 3, 10)
    ratio = np.log(10.1 / 0.1)
    rng = np.random.default_rng(6)
    agree = 0
    trials = 500
    for _ in range(trials):
        msg = rng.integers(0, 2, pc.k_c).astype(np.uint8)
        cw = encode(msg, pc)
        counts = rng.poisson(0.1 + 10.0 * cw)
        llrs = counts * ratio - 10.0
        ml = book[int(np.argmax(book.astype(np.float32) @ llrs.astype(np.float32)))]
        mn = decode(llrs, pc, DecoderConfig()).bits
        agree += int(np.array_equal(ml, mn))
    assert agree / trials >= 0.95


def test_campaign_point_zero_signal_is_coin_flip():
    pc = build_code(TOY)
    params = ChannelParams.equal_split(0.0, 0.5, 3, 10)
    ber, fer = decode_campaign_point(params, pc, DecoderConfig(), 30, np.random.default_rng(7))
    assert 0.35 < ber < 0.65
    assert fer == 1.0


def test_alist_round_trip(tmp_path):
    pc = build_code(TOY)
    path = export_alist(pc, tmp_path / "toy.alist")
    m, n, rows = parse_alist(path)
    assert (m, n) == (pc.m, pc.n_c)
    for row, cols in zip(rows, pc.cols):
        live = sorted(int(c) for c in cols if c < pc.n_c)
        assert sorted(row) == live


def test_alist_header_fields(tmp_path):
    pc = build_code(TOY)
    path = export_alist(pc, tmp_path / "toy.alist")
    first, second = path.read_text().splitlines()[:2]
    assert first.split() == [str(pc.m), str(pc.n_c)]
    # max row degree D+2, max column degree J (message columns)
    assert second.split() == [str(TOY.D + 2), str(TOY.J)]
