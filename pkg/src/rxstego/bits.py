"""Bit-message plumbing: byte/bit packing, repetition code, framing,
capacity padding and the keyed interleaver.

A bit message is a 1-D uint8 numpy array whose values are 0 or 1.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import BadMagic, CapacityExceeded, LengthFieldInvalid, LengthMismatch, PayloadTooLarge
from .keystream import KeyedStream

FRAME_MAGIC = b"RX01"
FRAME_HEADER_BYTES = len(FRAME_MAGIC) + 4  # magic + big-endian payload length
FRAME_HEADER_BITS = FRAME_HEADER_BYTES * 8

PAD_LABEL = "rx-pad"
PERM_LABEL = "rx-perm"


def as_bits(bits) -> np.ndarray:
    """Coerce a sequence of 0/1 to the canonical uint8 array form."""
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit message may only contain 0 and 1")
    return arr


def bytes_to_bits(data: bytes) -> np.ndarray:
    """MSB-first bit expansion of a byte string."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    if len(bits) % 8 != 0:
        raise LengthMismatch(f"bit length {len(bits)} is not a multiple of 8")
    return np.packbits(as_bits(bits)).tobytes()


# --- repetition code ---------------------------------------------------------


def check_rate(r: int) -> int:
    if r < 1 or r % 2 == 0:
        raise ValueError(f"ecc rate must be an odd integer >= 1, got {r}")
    return r


def ecc_encode(bits, r: int) -> np.ndarray:
    """Repeat every bit ``r`` times consecutively."""
    check_rate(r)
    return np.repeat(as_bits(bits), r)


def ecc_decode(coded, r: int) -> np.ndarray:
    """Majority vote per block of ``r`` bits; fixes up to r//2 flips a block."""
    check_rate(r)
    coded = as_bits(coded)
    if len(coded) % r != 0:
        raise LengthMismatch(f"coded length {len(coded)} not divisible by rate {r}")
    sums = coded.reshape(-1, r).sum(axis=1)
    return (sums > r // 2).astype(np.uint8)


# --- framing -----------------------------------------------------------------


def frame_payload(payload: bytes) -> np.ndarray:
    """Wrap payload bytes in the self-describing frame and emit bits.

    Layout: magic "RX01", 4-byte big-endian byte count, then the payload,
    all MSB-first. The length field is what lets the extractor discard
    padding without knowing the message size in advance.
    """
    if len(payload) > 0xFFFFFFFF:
        raise PayloadTooLarge(f"payload of {len(payload)} bytes exceeds 2^32 - 1")
    header = FRAME_MAGIC + struct.pack(">I", len(payload))
    return bytes_to_bits(header + bytes(payload))


def unframe_payload(bits) -> bytes:
    """Parse a framed bit message back to payload bytes.

    Trailing bits beyond the declared length are padding and ignored.
    """
    bits = as_bits(bits)
    if len(bits) < FRAME_HEADER_BITS:
        raise BadMagic("message shorter than the frame header")
    header = np.packbits(bits[:FRAME_HEADER_BITS]).tobytes()
    if header[:4] != FRAME_MAGIC:
        raise BadMagic("frame magic mismatch (wrong key or no embedded message)")
    (length,) = struct.unpack(">I", header[4:8])
    available = (len(bits) - FRAME_HEADER_BITS) // 8
    if length > available:
        raise LengthFieldInvalid(
            f"declared payload of {length} bytes but only {available} available"
        )
    start = FRAME_HEADER_BITS
    return np.packbits(bits[start : start + 8 * length]).tobytes() if length else b""


# --- capacity padding --------------------------------------------------------


def capacity_bits(total_chips: int, c: int, r: int) -> int:
    """Message bits an image of ``total_chips`` pixels can carry."""
    return (total_chips // c) // r


def pad_to_capacity(framed, key: bytes, total_chips: int, c: int, r: int) -> np.ndarray:
    """Extend a framed message with keyed filler bits up to capacity.

    The filler comes from the "rx-pad" keystream, so without the key the
    padding is indistinguishable from message bits.
    """
    framed = as_bits(framed)
    cap = capacity_bits(total_chips, c, r)
    if len(framed) > cap:
        raise CapacityExceeded(
            f"message needs {len(framed)} bits but the image provides {cap}"
        )
    if len(framed) == cap:
        return framed
    filler = KeyedStream(key, PAD_LABEL).bits(cap - len(framed))
    return np.concatenate([framed, filler])


# --- keyed interleaver -------------------------------------------------------


def _permutation(n: int, key: bytes) -> np.ndarray:
    """Fisher-Yates permutation of range(n) driven by the "rx-perm" stream."""
    stream = KeyedStream(key, PERM_LABEL)
    perm = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = stream.randbelow(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def interleave(bits, key: bytes) -> np.ndarray:
    """Disperse bits across positions with the keyed permutation."""
    bits = as_bits(bits)
    if len(bits) == 0:
        return bits
    perm = _permutation(len(bits), key)
    out = np.empty_like(bits)
    out[perm] = bits
    return out


def deinterleave(bits, key: bytes) -> np.ndarray:
    """Exact inverse of :func:`interleave` under the same key."""
    bits = as_bits(bits)
    if len(bits) == 0:
        return bits
    perm = _permutation(len(bits), key)
    return bits[perm]
