"""Air-interface framing: sync preamble, segment indication, payload segments.

A coded block of n_c bits is split into Q segments.  Each over-the-air frame
carries one segment preceded by an L-symbol synchronization sequence and an
L_p-symbol indication field encoding the segment index.  Frames are separated
by a short all-off guard.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Primitive trinomials x^r + x^t + 1 used for maximal-length sequences.
_PRIMITIVE_TAPS = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 1),
    9: (9, 4),
    10: (10, 3),
    11: (11, 2),
    15: (15, 1),
}

_INDICATION_REPS = 4


def maximal_length_sequence(degree: int) -> np.ndarray:
    """Binary m-sequence of length 2**degree - 1 from an all-ones LFSR seed."""
    if degree not in _PRIMITIVE_TAPS:
        raise ValueError(f"no primitive trinomial registered for degree {degree}")
    taps = _PRIMITIVE_TAPS[degree]
    state = np.ones(degree, dtype=np.uint8)
    out = np.empty((1 << degree) - 1, dtype=np.uint8)
    for t in range(out.size):
        out[t] = state[-1]
        fb = 0
        for tap in taps:
            fb ^= state[degree - tap]
        state[1:] = state[:-1]
        state[0] = fb
    return out


@dataclass(frozen=True)
class SyncSequence:
    """Known binary preamble of length L.

    Kept balanced (ones within 10% of L/2) so that both pilot classes used by
    the channel estimator have enough symbols.
    """

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 2:
            raise ValueError("sync sequence needs at least two symbols")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("sync sequence must be binary")
        ones = int(bits.sum())
        if abs(ones - bits.size / 2) > bits.size / 10:
            raise ValueError("sync sequence must be balanced within 10%")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return self.bits.size

    @property
    def n_ones(self) -> int:
        return int(self.bits.sum())

    def bipolar(self) -> np.ndarray:
        """The +/-1 view 2s - 1."""
        return 2 * self.bits.astype(np.int64) - 1


def default_sync_sequence(length: int) -> SyncSequence:
    """m-sequence of length 2**r - 1 extended by one zero to an even length.

    The extension makes the sequence exactly balanced; lengths 64 and 128 use
    x^6+x+1 and x^7+x+1 respectively.
    """
    degree = int(length).bit_length() - 1
    if length != (1 << degree):
        raise ValueError("default sync length must be a power of two")
    seq = maximal_length_sequence(degree)
    return SyncSequence(np.concatenate([seq, [0]]))


@dataclass(frozen=True)
class FrameLayout:
    """Symbol-level frame geometry.

    payload_len must equal n_c / Q for the code in use; frame length is
    payload_len + sync_len + indication_len symbols, plus guard_len off
    symbols appended after each frame.
    """

    sync_len: int = 64
    indication_len: int = 17
    segments: int = 10
    payload_len: int = 1263
    chips_per_symbol: int = 10
    guard_len: int = 4

    def __post_init__(self) -> None:
        for name in ("sync_len", "indication_len", "segments", "payload_len", "chips_per_symbol"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.guard_len < 0:
            raise ValueError("guard_len must be >= 0")
        if self.segments > 1 << (self.indication_len // _INDICATION_REPS):
            raise ValueError("indication field too short for the segment count")

    @property
    def frame_len(self) -> int:
        """Frame length in symbols, excluding the guard."""
        return self.payload_len + self.sync_len + self.indication_len

    @property
    def block_len(self) -> int:
        """Coded block length n_c carried by one group of Q frames."""
        return self.payload_len * self.segments

    def frame_chips(self) -> int:
        """Chips per frame including the guard."""
        return (self.frame_len + self.guard_len) * self.chips_per_symbol


@dataclass(frozen=True)
class Frame:
    sync: SyncSequence
    indication: np.ndarray
    payload: np.ndarray

    def symbols(self) -> np.ndarray:
        """Concatenated symbol sequence: sync, indication, payload."""
        return np.concatenate(
            [
                self.sync.bits,
                np.asarray(self.indication, dtype=np.uint8),
                np.asarray(self.payload, dtype=np.uint8),
            ]
        )


def encode_indication(segment_index: int, indication_len: int) -> np.ndarray:
    """Repetition-protected segment index.

    The index is written with indication_len // 4 bits (MSB first), repeated
    four times; if a bit of room remains, the overall parity of the repeated
    part is appended, then zero padding.  With the default 17-symbol field
    this is a 4-bit index repeated 4x plus one parity bit.
    """
    idx_bits = indication_len // _INDICATION_REPS
    if idx_bits < 1:
        raise ValueError("indication field shorter than one repetition group")
    if not 0 <= segment_index < (1 << idx_bits):
        raise ValueError(f"segment index {segment_index} out of range")
    word = [(segment_index >> (idx_bits - 1 - b)) & 1 for b in range(idx_bits)]
    bits = np.array(word * _INDICATION_REPS, dtype=np.uint8)
    out = np.zeros(indication_len, dtype=np.uint8)
    out[: bits.size] = bits
    if indication_len > bits.size:
        out[bits.size] = bits.sum() % 2
    return out


def decode_indication(bits: np.ndarray, indication_len: int) -> int:
    """Majority vote over the four repetitions of the index word."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size != indication_len:
        raise ValueError("indication length mismatch")
    idx_bits = indication_len // _INDICATION_REPS
    groups = bits[: idx_bits * _INDICATION_REPS].reshape(_INDICATION_REPS, idx_bits)
    votes = groups.sum(axis=0)
    word = (2 * votes > _INDICATION_REPS).astype(np.int64)
    index = 0
    for b in word:
        index = (index << 1) | int(b)
    return index


def decode_indication_soft(llrs: np.ndarray, indication_len: int) -> int:
    """Index decision from repetition-combined soft values.

    Positive LLR means symbol on.  Summing the four repetitions before
    slicing buys roughly 6 dB over bit-wise majority voting, which matters
    because the indication field has no LDPC protection.
    """
    llrs = np.asarray(llrs, dtype=float)
    if llrs.size != indication_len:
        raise ValueError("indication length mismatch")
    idx_bits = indication_len // _INDICATION_REPS
    groups = llrs[: idx_bits * _INDICATION_REPS].reshape(_INDICATION_REPS, idx_bits)
    word = groups.sum(axis=0) > 0
    index = 0
    for b in word:
        index = (index << 1) | int(b)
    return index


def build_frames(
    codeword: np.ndarray, layout: FrameLayout, sync: SyncSequence
) -> list[Frame]:
    """Split a coded block into Q indexed frames."""
    codeword = np.asarray(codeword, dtype=np.uint8)
    if codeword.size != layout.block_len:
        raise ValueError(
            f"codeword length {codeword.size} != Q*payload_len {layout.block_len}"
        )
    if len(sync) != layout.sync_len:
        raise ValueError("sync sequence length does not match the layout")
    frames = []
    for q in range(layout.segments):
        seg = codeword[q * layout.payload_len : (q + 1) * layout.payload_len]
        frames.append(
            Frame(sync, encode_indication(q, layout.indication_len), seg.copy())
        )
    return frames


def reassemble(frames: list[Frame], layout: FrameLayout) -> np.ndarray:
    """Reorder frame payloads by their decoded indication into one codeword.

    Raises ValueError when any segment index is missing or duplicated; the
    caller decides how to account for the lost block.
    """
    slots: dict[int, np.ndarray] = {}
    for frame in frames:
        q = decode_indication(frame.indication, layout.indication_len)
        if q in slots:
            raise ValueError(f"duplicate segment index {q}")
        slots[q] = np.asarray(frame.payload, dtype=np.uint8)
    missing = [q for q in range(layout.segments) if q not in slots]
    if missing:
        raise ValueError(f"missing segment indices {missing}")
    return np.concatenate([slots[q] for q in range(layout.segments)])


def modulate_to_chips(frame: Frame, layout: FrameLayout) -> np.ndarray:
    """Replicate each symbol over M chips and append the all-off guard."""
    symbols = frame.symbols()
    if symbols.size != layout.frame_len:
        raise ValueError("frame does not match the layout")
    chips = np.repeat(symbols, layout.chips_per_symbol)
    guard = np.zeros(layout.guard_len * layout.chips_per_symbol, dtype=np.uint8)
    return np.concatenate([chips, guard])
