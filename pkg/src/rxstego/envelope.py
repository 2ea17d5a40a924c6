"""Sealing prescriptions under the Prescription Identification Code.

The code is a short decimal secret printed for the patient. Both working
keys derive from it by domain-separated hashing: one keys AES-256-CTR for
confidentiality, the other keys the steganographic layer. A truncated
HMAC-SHA256 tag over nonce and ciphertext makes a wrong code detectable
without releasing any plaintext.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import secrets
import struct
from dataclasses import dataclass
from typing import Collection

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import AuthenticationFailed, MalformedCode

CODE_MIN_DIGITS = 13
CODE_MAX_DIGITS = 32
DEFAULT_CODE_DIGITS = 13

NONCE_BYTES = 16
TAG_BYTES = 16

_CIPHER_DOMAIN = b"rx-aes"
_STEGO_DOMAIN = b"rx-stego"


@dataclass(frozen=True)
class KeyMaterial:
    """Both derived keys for one prescription code."""

    cipher_key: bytes
    stego_key: bytes


@dataclass(frozen=True)
class SealedPayload:
    nonce: bytes
    ciphertext: bytes
    tag: bytes

    def to_bytes(self) -> bytes:
        """Wire layout: nonce (16) | 4-byte big-endian length | ciphertext | tag (16)."""
        return (
            self.nonce
            + struct.pack(">I", len(self.ciphertext))
            + self.ciphertext
            + self.tag
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "SealedPayload":
        if len(data) < NONCE_BYTES + 4 + TAG_BYTES:
            raise AuthenticationFailed("sealed payload truncated")
        nonce = data[:NONCE_BYTES]
        (length,) = struct.unpack(">I", data[NONCE_BYTES : NONCE_BYTES + 4])
        body = data[NONCE_BYTES + 4 :]
        if len(body) != length + TAG_BYTES:
            raise AuthenticationFailed("sealed payload length field inconsistent")
        return cls(nonce=nonce, ciphertext=body[:length], tag=body[length:])


def validate_code(code: str) -> str:
    if not isinstance(code, str) or not code.isascii() or not code.isdigit():
        raise MalformedCode("prescription code must be a decimal digit string")
    if not CODE_MIN_DIGITS <= len(code) <= CODE_MAX_DIGITS:
        raise MalformedCode(
            f"prescription code must have {CODE_MIN_DIGITS} to "
            f"{CODE_MAX_DIGITS} digits, got {len(code)}"
        )
    return code


def generate_code(length: int = DEFAULT_CODE_DIGITS, avoid: Collection[str] = ()) -> str:
    """Fresh random code of ``length`` decimal digits.

    Digits come from a CSPRNG. ``avoid`` lets a caller exclude codes that
    are already in circulation.
    """
    if not CODE_MIN_DIGITS <= length <= CODE_MAX_DIGITS:
        raise MalformedCode(
            f"code length must be between {CODE_MIN_DIGITS} and {CODE_MAX_DIGITS}"
        )
    while True:
        code = "".join(secrets.choice("0123456789") for _ in range(length))
        if code not in avoid:
            return code


def derive_keys(code: str) -> KeyMaterial:
    """Deterministic, domain-separated key derivation from the code."""
    code = validate_code(code)
    raw = code.encode("ascii")
    return KeyMaterial(
        cipher_key=hashlib.sha256(_CIPHER_DOMAIN + raw).digest(),
        stego_key=hashlib.sha256(_STEGO_DOMAIN + raw).digest(),
    )


def _tag(cipher_key: bytes, nonce: bytes, ciphertext: bytes) -> bytes:
    return hmac.new(cipher_key, nonce + ciphertext, hashlib.sha256).digest()[:TAG_BYTES]


def seal(plaintext: bytes, code: str) -> SealedPayload:
    """Encrypt-then-authenticate under the code's cipher key."""
    if not plaintext:
        raise ValueError("refusing to seal an empty plaintext")
    keys = derive_keys(code)
    nonce = os.urandom(NONCE_BYTES)
    enc = Cipher(algorithms.AES(keys.cipher_key), modes.CTR(nonce)).encryptor()
    ciphertext = enc.update(bytes(plaintext)) + enc.finalize()
    return SealedPayload(nonce, ciphertext, _tag(keys.cipher_key, nonce, ciphertext))


def unseal(sealed: SealedPayload, code: str) -> bytes:
    """Verify the tag, then decrypt. No plaintext is released on failure."""
    keys = derive_keys(code)
    expected = _tag(keys.cipher_key, sealed.nonce, sealed.ciphertext)
    if not hmac.compare_digest(expected, sealed.tag):
        raise AuthenticationFailed("sealed payload failed verification")
    dec = Cipher(algorithms.AES(keys.cipher_key), modes.CTR(sealed.nonce)).decryptor()
    return dec.update(sealed.ciphertext) + dec.finalize()
