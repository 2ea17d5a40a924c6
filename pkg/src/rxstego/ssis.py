"""Spread-spectrum image steganography: blind embed/extract over grayscale rasters.

Embedding pipeline: frame the payload, add repetition-code redundancy, pad
to image capacity with keyed filler, interleave with a keyed permutation,
spread each coded bit over ``chips_per_bit`` pseudorandom +-1 chips scaled
by ``amplitude``, and superimpose the resulting noise field on the cover.

Extraction is blind: the cover is re-estimated from the stego image with a
local mean filter, the residual is correlated against the regenerated chip
sequence, and the pipeline is run backwards. Only the 32-byte stego key is
needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bits as b
from .errors import ImageTooSmall, LengthMismatch
from .image import ensure_gray
from .keystream import KeyedStream, ensure_stego_key

CHIP_LABEL = "rx-chip"
FILL_LABEL = "rx-fill"

MIN_SIDE = 3  # the cover-estimation filter needs a full 3x3 neighborhood


@dataclass(frozen=True)
class StegoParams:
    """Embedding knobs.

    amplitude: per-pixel perturbation in pixel units (the +-alpha gain).
    chips_per_bit: processing gain; chips spent on each coded bit.
    ecc_rate: repetition-code rate, odd so majority vote has no ties.
    """

    amplitude: int = 4
    chips_per_bit: int = 64
    ecc_rate: int = 3

    def __post_init__(self):
        if self.amplitude < 1:
            raise ValueError("amplitude must be >= 1")
        if self.chips_per_bit < 1:
            raise ValueError("chips_per_bit must be >= 1")
        b.check_rate(self.ecc_rate)

    def capacity_bits(self, width: int, height: int) -> int:
        """Message bits (frame included) an image of this size can carry."""
        return b.capacity_bits(width * height, self.chips_per_bit, self.ecc_rate)

    def max_payload_bytes(self, width: int, height: int) -> int:
        """Largest raw payload that fits once the frame header is added."""
        cap = self.capacity_bits(width, height) // 8 - b.FRAME_HEADER_BYTES
        return max(cap, 0)


DEFAULT_PARAMS = StegoParams()


def generate_chips(key: bytes, count: int) -> np.ndarray:
    """Deterministic +-1 chip sequence from the "rx-chip" keystream."""
    if count < 1:
        raise ValueError("chip count must be >= 1")
    stream_bits = KeyedStream(key, CHIP_LABEL).bits(count)
    return (2 * stream_bits.astype(np.int16) - 1).astype(np.int8)


def modulate(bits, chips, params: StegoParams) -> np.ndarray:
    """Spread message bits over the chip sequence: s = alpha * n * (2m - 1)."""
    bits = b.as_bits(bits)
    chips = np.asarray(chips)
    if len(bits) * params.chips_per_bit != len(chips):
        raise LengthMismatch(
            f"{len(bits)} bits at {params.chips_per_bit} chips/bit "
            f"!= {len(chips)} chips"
        )
    return _spread(bits, chips, params.amplitude, params.chips_per_bit)


def _spread(bits: np.ndarray, chips: np.ndarray, amplitude: int, c: int) -> np.ndarray:
    # Tolerates a ragged final block so every pixel of the image is covered.
    signs = np.repeat(2 * bits.astype(np.int16) - 1, c)[: len(chips)]
    return amplitude * chips.astype(np.int16) * signs


def superimpose(cover, noise) -> np.ndarray:
    """Add the noise field to the cover, clamped to the 8-bit range."""
    cover = ensure_gray(cover)
    noise = np.asarray(noise)
    if noise.size != cover.size:
        raise LengthMismatch(
            f"noise field of {noise.size} values for {cover.size} pixels"
        )
    shifted = cover.astype(np.int16) + noise.reshape(cover.shape).astype(np.int16)
    return np.clip(shifted, 0, 255).astype(np.uint8)


def estimate_cover(stego) -> np.ndarray:
    """Approximate the original image as each pixel's 8-neighbor mean.

    The center pixel is excluded so its own chip does not pollute the
    estimate; borders use edge replication. Returns float64.
    """
    stego = ensure_gray(stego)
    h, w = stego.shape
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageTooSmall(f"need at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}")
    p = np.pad(stego.astype(np.float64), 1, mode="edge")
    acc = (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )
    return acc / 8.0


def estimate_noise(stego, estimate) -> np.ndarray:
    """Residual between the stego image and the cover estimate."""
    stego = ensure_gray(stego)
    estimate = np.asarray(estimate, dtype=np.float64)
    if estimate.size != stego.size:
        raise LengthMismatch(
            f"estimate of {estimate.size} values for {stego.size} pixels"
        )
    return stego.astype(np.float64) - estimate.reshape(stego.shape)


def demodulate(noise_est, chips, chips_per_bit: int) -> np.ndarray:
    """Correlate the noise estimate against the chips, one bit per block.

    The decision statistic is the block inner product; a statistic of
    exactly zero decodes as 0 so the result is deterministic.
    """
    noise_est = np.asarray(noise_est, dtype=np.float64).ravel()
    chips = np.asarray(chips, dtype=np.float64).ravel()
    if len(noise_est) != len(chips):
        raise LengthMismatch(
            f"noise estimate length {len(noise_est)} != chips length {len(chips)}"
        )
    if len(chips) % chips_per_bit != 0:
        raise LengthMismatch(
            f"length {len(chips)} not divisible by {chips_per_bit} chips/bit"
        )
    stats = (noise_est * chips).reshape(-1, chips_per_bit).sum(axis=1)
    return (stats > 0).astype(np.uint8)


def embed(cover, payload: bytes, key: bytes, params: StegoParams = DEFAULT_PARAMS) -> np.ndarray:
    """Hide ``payload`` in ``cover``; returns the stego image.

    Deterministic for fixed inputs. Every pixel carries exactly one chip:
    slots left over after the coded message are filled with keyed filler so
    the whole image is uniformly perturbed.
    """
    cover = ensure_gray(cover)
    key = ensure_stego_key(key)
    h, w = cover.shape
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageTooSmall(f"need at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}")
    c, r = params.chips_per_bit, params.ecc_rate
    total = h * w
    n_slots = total // c

    framed = b.frame_payload(payload)
    padded = b.pad_to_capacity(framed, key, total, c, r)
    coded = b.ecc_encode(padded, r)

    # Residual slots (< r of them) plus a possible partial trailing block.
    extra = n_slots - len(coded) + (1 if total % c else 0)
    slots = coded
    if extra:
        filler = KeyedStream(key, FILL_LABEL).bits(extra)
        slots = np.concatenate([coded, filler])
    interleaved = np.concatenate(
        [b.interleave(slots[:n_slots], key), slots[n_slots:]]
    )

    chips = generate_chips(key, total)
    noise = _spread(interleaved, chips, params.amplitude, c)
    return superimpose(cover, noise)


def extract(stego, key: bytes, params: StegoParams = DEFAULT_PARAMS) -> bytes:
    """Blind extraction: recover the payload from the stego image alone.

    Raises BadMagic when the frame header does not verify, which is the
    signal for a wrong key or an image with nothing embedded.
    """
    stego = ensure_gray(stego)
    key = ensure_stego_key(key)
    h, w = stego.shape
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageTooSmall(f"need at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}")
    c, r = params.chips_per_bit, params.ecc_rate
    total = h * w
    n_slots = total // c
    usable = n_slots * c

    approx = estimate_cover(stego)
    residual = estimate_noise(stego, approx).ravel()
    chips = generate_chips(key, total)
    hard = demodulate(residual[:usable], chips[:usable], c)
    slots = b.deinterleave(hard, key)

    cap = b.capacity_bits(total, c, r)
    message = b.ecc_decode(slots[: cap * r], r)
    return b.unframe_payload(message)
