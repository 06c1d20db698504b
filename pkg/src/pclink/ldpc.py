"""Quasi-cyclic LDPC code construction, systematic encoding, min-sum decoding.

The parity-check matrix is H = [H1 | H2].  H1 is a J x D grid of p x p
circulant permutation blocks; block (j, l) is I_p(v) with shift
v = (q1^j - 1)(q2^l - 1) mod p for 0-based j, l, so the first block row and
column are identity blocks.  With ord(q1) >= J and ord(q2) >= D every pair of
blocks differs consistently and H1's Tanner graph has no 4-cycles.  H2 is the
square lower-bidiagonal sawtooth, whose inverse is lower-triangular all-ones;
encoding therefore reduces to H1 times the message followed by a running XOR.

Decoding is flooding normalized min-sum: check messages are the sign product
times the minimum extrinsic magnitude divided by alpha, variable messages are
the channel LLR plus extrinsic check messages, and iteration stops early once
the hard decisions satisfy every check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def multiplicative_order(a: int, p: int) -> int:
    """Order of a in the multiplicative group mod p."""
    if a % p == 0:
        raise ValueError("a must be nonzero mod p")
    x = a % p
    order = 1
    while x != 1:
        x = (x * a) % p
        order += 1
        if order > p:
            raise ValueError("no order found; p is not prime")
    return order


@dataclass(frozen=True)
class QcLdpcParams:
    """Code family parameters.

    J, D: block rows and columns of H1.  p: circulant size, prime.
    q1, q2: distinct nonzero field elements generating the shifts; their
    multiplicative orders must cover J and D respectively, which is exactly
    the 4-cycle-free condition for H1.
    """

    J: int
    D: int
    p: int
    q1: int = 2
    q2: int = 3

    def __post_init__(self) -> None:
        if self.J < 1 or self.D < 1:
            raise ValueError("J and D must be >= 1")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if not (1 <= self.q1 < self.p and 1 <= self.q2 < self.p):
            raise ValueError("q1 and q2 must be nonzero elements of GF(p)")
        if self.q1 == self.q2:
            raise ValueError("q1 and q2 must be distinct")
        if multiplicative_order(self.q1, self.p) < self.J:
            raise ValueError("order of q1 is smaller than J; shifts would repeat")
        if multiplicative_order(self.q2, self.p) < self.D:
            raise ValueError("order of q2 is smaller than D; shifts would repeat")

    @property
    def n_c(self) -> int:
        return (self.D + self.J) * self.p

    @property
    def k_c(self) -> int:
        return self.D * self.p

    @property
    def rate(self) -> float:
        return self.k_c / self.n_c


# The two code sizes used throughout the simulation campaigns.  The rate-0.8
# block splits the same 2526 parity bits as J = 6 block rows.
PAPER_CODES = {
    0.6: QcLdpcParams(J=12, D=18, p=421),
    0.8: QcLdpcParams(J=6, D=24, p=421),
}


def code_for_rate(rate: float) -> QcLdpcParams:
    for key, params in PAPER_CODES.items():
        if abs(rate - key) < 1e-9:
            return params
    raise ValueError(f"no registered code with rate {rate}")


@dataclass(frozen=True)
class ParityCheck:
    """Sparse parity-check structure.

    cols is check-major: row r lists the variable indices of check r, padded
    with the sentinel index n_c (a phantom always-zero bit) so the array stays
    rectangular; only check 0 carries the sentinel, having no left parity
    neighbour.
    """

    params: QcLdpcParams
    shifts: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)

    @property
    def n_c(self) -> int:
        return self.params.n_c

    @property
    def k_c(self) -> int:
        return self.params.k_c

    @property
    def m(self) -> int:
        return self.params.J * self.params.p

    def row_degrees(self) -> np.ndarray:
        return (self.cols < self.n_c).sum(axis=1)

    def dense(self) -> np.ndarray:
        """Dense 0/1 matrix for small codes."""
        if self.m * self.n_c > 4_000_000:
            raise ValueError("code too large to densify")
        H = np.zeros((self.m, self.n_c), dtype=np.uint8)
        rows = np.repeat(np.arange(self.m), self.cols.shape[1])
        cc = self.cols.ravel()
        keep = cc < self.n_c
        H[rows[keep], cc[keep]] = 1
        return H


def build_code(params: QcLdpcParams) -> ParityCheck:
    J, D, p = params.J, params.D, params.p
    jj = np.arange(J)
    ll = np.arange(D)
    q1_pow = np.array([pow(params.q1, int(e), p) for e in jj], dtype=np.int64)
    q2_pow = np.array([pow(params.q2, int(e), p) for e in ll], dtype=np.int64)
    shifts = ((q1_pow[:, None] - 1) * (q2_pow[None, :] - 1)) % p

    m, k = J * p, D * p
    n = k + m
    deg = D + 2
    cols = np.full((m, deg), n, dtype=np.int32)
    r = np.arange(m)
    local = r % p
    block = r // p
    for l in range(D):
        cols[:, l] = l * p + (local + shifts[block, l]) % p
    cols[:, D] = k + r
    cols[1:, D + 1] = k + r[1:] - 1  # check 0 keeps the sentinel pad
    return ParityCheck(params=params, shifts=shifts, cols=cols)


class SystematicGenerator:
    """Implicit systematic generator G = [I, (H2^-1 H1 m)^T-shaped parity].

    Never materialized densely: the parity of a message is H1 times the
    message followed by a prefix XOR, which is multiplication by the
    sawtooth inverse.
    """

    def __init__(self, pc: ParityCheck) -> None:
        self.pc = pc

    def parity_of(self, message: np.ndarray) -> np.ndarray:
        params = self.pc.params
        J, D, p = params.J, params.D, params.p
        message = np.asarray(message, dtype=np.uint8)
        if message.size != self.pc.k_c:
            raise ValueError("message length mismatch")
        blocks = message.reshape(D, p)
        u = np.empty(J * p, dtype=np.uint8)
        for j in range(J):
            acc = np.zeros(p, dtype=np.uint8)
            for l in range(D):
                acc ^= np.roll(blocks[l], -int(self.pc.shifts[j, l]))
            u[j * p : (j + 1) * p] = acc
        return np.bitwise_xor.accumulate(u)

    def encode(self, message: np.ndarray) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8)
        return np.concatenate([message, self.parity_of(message)])

    def dense(self) -> np.ndarray:
        """Dense generator for small codes (row i = encoding of unit message i)."""
        k = self.pc.k_c
        if k * self.pc.n_c > 4_000_000:
            raise ValueError("generator too large to densify")
        G = np.empty((k, self.pc.n_c), dtype=np.uint8)
        e = np.zeros(k, dtype=np.uint8)
        for i in range(k):
            e[i] = 1
            G[i] = self.encode(e)
            e[i] = 0
        return G


def build_generator(pc: ParityCheck) -> SystematicGenerator:
    return SystematicGenerator(pc)


def encode(message: np.ndarray, pc: ParityCheck) -> np.ndarray:
    """Systematic encoding: first k_c bits are the message."""
    return SystematicGenerator(pc).encode(message)


def syndrome(bits: np.ndarray, pc: ParityCheck) -> np.ndarray:
    """H times the candidate word over GF(2), one entry per check."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size != pc.n_c:
        raise ValueError("word length mismatch")
    ext = np.concatenate([bits, np.zeros(1, dtype=np.uint8)])
    return ext[pc.cols].sum(axis=1, dtype=np.int64) & 1


@dataclass(frozen=True)
class DecoderConfig:
    alpha: float = 1.5
    max_iterations: int = 20

    def __post_init__(self) -> None:
        if self.alpha <= 1:
            raise ValueError("normalization constant alpha must exceed 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class DecodeResult:
    bits: np.ndarray
    iterations_used: int
    converged: bool


def decode(llrs: np.ndarray, pc: ParityCheck, cfg: DecoderConfig) -> DecodeResult:
    """Flooding normalized min-sum decoding.

    Input sign convention: positive LLR favors bit 1.  Internally the sign is
    flipped so that the plain sign-product check rule is exact for any check
    degree and the sentinel pad (+inf, a known zero bit) is the XOR identity.
    Hard decisions map a zero total to bit 0.  Returns as soon as the
    decisions satisfy every check; converged implies a zero syndrome.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.size != pc.n_c:
        raise ValueError("LLR length mismatch")
    n, m = pc.n_c, pc.m
    cols = pc.cols
    deg = cols.shape[1]
    flat = cols.ravel()
    sentinel = cols == n

    chan = np.concatenate([-llrs, [0.0]])  # internal: positive favors bit 0
    msgs = np.zeros((m, deg))
    rows = np.arange(m)
    col_slots = np.arange(deg)
    bits = np.zeros(n + 1, dtype=np.uint8)
    iterations = 0

    for iterations in range(1, cfg.max_iterations + 1):
        total = chan + np.bincount(flat, weights=msgs.ravel(), minlength=n + 1)
        extr = total[cols] - msgs
        extr[sentinel] = np.inf
        signs = np.where(extr < 0, -1.0, 1.0)
        sign_prod = signs.prod(axis=1)
        mag = np.abs(extr)
        arg = mag.argmin(axis=1)
        min1 = mag[rows, arg]
        mag[rows, arg] = np.inf
        min2 = mag.min(axis=1)
        picked = np.where(col_slots == arg[:, None], min2[:, None], min1[:, None])
        msgs = (sign_prod[:, None] * signs) * picked / cfg.alpha

        total = chan + np.bincount(flat, weights=msgs.ravel(), minlength=n + 1)
        bits = (total < 0).astype(np.uint8)
        bits[n] = 0
        if not (bits[cols].sum(axis=1, dtype=np.int64) & 1).any():
            return DecodeResult(bits[:n], iterations, True)
    return DecodeResult(bits[:n], iterations, False)


def decode_campaign_point(
    params,
    pc: ParityCheck,
    cfg: DecoderConfig,
    n_blocks: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """(BER, FER) over random blocks through the combined Poisson channel.

    Information-bit errors only; a block counts as errored when any info bit
    is wrong or the decoder reports failure.  Uses the true intensities for
    the LLRs (perfect synchronization and estimation).
    """
    from .channel import sample_combined_symbol_counts

    gen = SystematicGenerator(pc)
    lam_s, lam_b = params.total_lambda_s, params.total_lambda_b
    ratio = np.log((lam_s + lam_b) / lam_b) if lam_s > 0 else 0.0
    bit_errors = 0
    block_errors = 0
    for _ in range(n_blocks):
        message = rng.integers(0, 2, pc.k_c).astype(np.uint8)
        codeword = gen.encode(message)
        counts = sample_combined_symbol_counts(params, codeword, rng)
        llrs = counts * ratio - lam_s
        result = decode(llrs, pc, cfg)
        errs = int((result.bits[: pc.k_c] != message).sum())
        bit_errors += errs
        block_errors += int(errs > 0 or not result.converged)
    return bit_errors / (pc.k_c * n_blocks), block_errors / n_blocks


def export_alist(pc: ParityCheck, path) -> Path:
    """Sparse text export of H, alist style.

    Header: checks and variables, then the maximum row and column degrees,
    then all row degrees, then all column degrees; the body lists 1-based
    variable indices per check, then 1-based check indices per variable.
    """
    path = Path(path)
    n, m = pc.n_c, pc.m
    row_lists = [np.sort(row[row < n]) for row in pc.cols]
    col_lists: list[list[int]] = [[] for _ in range(n)]
    for r, row in enumerate(row_lists):
        for v in row:
            col_lists[int(v)].append(r)
    row_deg = [len(r) for r in row_lists]
    col_deg = [len(c) for c in col_lists]
    with path.open("w") as fh:
        fh.write(f"{m} {n}\n")
        fh.write(f"{max(row_deg)} {max(col_deg)}\n")
        fh.write(" ".join(map(str, row_deg)) + "\n")
        fh.write(" ".join(map(str, col_deg)) + "\n")
        for row in row_lists:
            fh.write(" ".join(str(int(v) + 1) for v in row) + "\n")
        for col in col_lists:
            fh.write(" ".join(str(r + 1) for r in col) + "\n")
    return path


def parse_alist(path) -> tuple[int, int, list[list[int]]]:
    """Read back an exported file: (checks, variables, 0-based rows)."""
    lines = Path(path).read_text().strip().splitlines()
    m, n = map(int, lines[0].split())
    rows = []
    for line in lines[4 : 4 + m]:
        rows.append([int(tok) - 1 for tok in line.split()])
    return m, n, rows
