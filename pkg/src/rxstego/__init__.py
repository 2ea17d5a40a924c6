"""Secure e-prescriptions: AES-sealed payloads hidden in images.

A prescription is serialized, sealed under a per-prescription decimal
code, spread-spectrum embedded into a cover image, and stored. Presenting
the code to a dispenser endpoint recovers the plaintext and marks the
record dispensed, exactly once.
"""

from .envelope import (
    KeyMaterial,
    SealedPayload,
    derive_keys,
    generate_code,
    seal,
    unseal,
    validate_code,
)
from .errors import RxError
from .image import image_metrics, load_gray, png_bytes, save_gray
from .model import (
    LineItem,
    Prescription,
    PrescriptionRecord,
    parse_prescription,
    serialize_prescription,
)
from .service import PrescriptionService, SessionTable
from .ssis import DEFAULT_PARAMS, StegoParams, embed, extract
from .storage import Store

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PARAMS",
    "KeyMaterial",
    "LineItem",
    "Prescription",
    "PrescriptionRecord",
    "PrescriptionService",
    "RxError",
    "SealedPayload",
    "SessionTable",
    "StegoParams",
    "Store",
    "derive_keys",
    "embed",
    "extract",
    "generate_code",
    "image_metrics",
    "load_gray",
    "parse_prescription",
    "png_bytes",
    "save_gray",
    "seal",
    "serialize_prescription",
    "unseal",
    "validate_code",
    "__version__",
]
