"""Deterministic keyed byte streams.

All pseudorandom material in the codec (chips, interleaver permutation,
padding filler) comes from AES-256 in counter mode. The 32-byte secret is
combined with a short domain label so the three uses never share a
keystream.
"""

from __future__ import annotations

import hashlib

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

_CHUNK = 4096
_ZEROS = b"\x00" * _CHUNK


def aes_encrypt_block(key: bytes, block: bytes) -> bytes:
    """Encrypt a single 16-byte block with raw AES (any standard key size)."""
    if len(block) != 16:
        raise ValueError("AES block must be 16 bytes")
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def ctr_keystream(key: bytes, initial_counter: bytes, nbytes: int) -> bytes:
    """Return ``nbytes`` of AES-CTR keystream (the encryption of zeros)."""
    enc = Cipher(algorithms.AES(key), modes.CTR(initial_counter)).encryptor()
    return enc.update(b"\x00" * nbytes)


def ensure_stego_key(key: bytes) -> bytes:
    if not isinstance(key, (bytes, bytearray)) or len(key) != 32:
        raise ValueError("stego key must be exactly 32 bytes")
    return bytes(key)


class KeyedStream:
    """Endless deterministic byte stream for one (key, domain label) pair.

    The stream key is SHA-256(label || key), used as an AES-256 key in
    counter mode starting from a zero counter block. Identical inputs
    always reproduce the identical stream.
    """

    def __init__(self, key: bytes, label: str | bytes):
        key = ensure_stego_key(key)
        if isinstance(label, str):
            label = label.encode("ascii")
        stream_key = hashlib.sha256(label + key).digest()
        self._enc = Cipher(
            algorithms.AES(stream_key), modes.CTR(b"\x00" * 16)
        ).encryptor()
        self._buf = b""

    def read(self, nbytes: int) -> bytes:
        while len(self._buf) < nbytes:
            self._buf += self._enc.update(_ZEROS)
        out, self._buf = self._buf[:nbytes], self._buf[nbytes:]
        return out

    def bits(self, nbits: int) -> np.ndarray:
        """Next ``nbits`` keystream bits as a uint8 array of 0/1 (MSB first)."""
        raw = np.frombuffer(self.read((nbits + 7) // 8), dtype=np.uint8)
        return np.unpackbits(raw)[:nbits]

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        nbytes = (k + 7) // 8
        mask = (1 << k) - 1
        while True:
            v = int.from_bytes(self.read(nbytes), "big") & mask
            if v < n:
                return v
