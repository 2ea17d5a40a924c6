"""Exception hierarchy shared across the library, service and CLI.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without string matching.
"""

from __future__ import annotations


class RxError(Exception):
    """Base class for all rxstego errors."""

    code = "ERROR"


# --- codec layer -----------------------------------------------------------


class LengthMismatch(RxError):
    code = "LENGTH_MISMATCH"


class DimensionMismatch(RxError):
    code = "DIMENSION_MISMATCH"


class ImageTooSmall(RxError):
    code = "IMAGE_TOO_SMALL"


class CapacityExceeded(RxError):
    code = "CAPACITY_EXCEEDED"


class PayloadTooLarge(RxError):
    code = "PAYLOAD_TOO_LARGE"


class BadMagic(RxError):
    """Frame header mismatch: wrong key, or no message embedded at all."""

    code = "BAD_MAGIC"


class LengthFieldInvalid(RxError):
    code = "LENGTH_FIELD_INVALID"


# --- crypto layer ----------------------------------------------------------


class MalformedCode(RxError):
    code = "MALFORMED_CODE"


class AuthenticationFailed(RxError):
    """Tag verification failed. Deliberately does not distinguish a wrong
    code from a tampered payload."""

    code = "AUTHENTICATION_FAILED"


# --- workflow layer --------------------------------------------------------


class NotAuthorized(RxError):
    code = "NOT_AUTHORIZED"


class InvalidCredentials(RxError):
    code = "INVALID_CREDENTIALS"


class InvalidSession(RxError):
    code = "INVALID_SESSION"


class DuplicateUsername(RxError):
    code = "DUPLICATE_USERNAME"


class UnknownPatient(RxError):
    code = "UNKNOWN_PATIENT"


class UnknownDrug(RxError):
    code = "UNKNOWN_DRUG"


class UnknownRecord(RxError):
    code = "UNKNOWN_RECORD"


class AllergyConflict(RxError):
    code = "ALLERGY_CONFLICT"

    def __init__(self, drug_id: int, drug_name: str):
        super().__init__(f"patient is allergic to drug {drug_name!r} (id {drug_id})")
        self.drug_id = drug_id
        self.drug_name = drug_name


class InteractionConflict(RxError):
    code = "INTERACTION_CONFLICT"

    def __init__(self, drug_a: tuple[int, str], drug_b: tuple[int, str]):
        super().__init__(
            f"drugs {drug_a[1]!r} (id {drug_a[0]}) and {drug_b[1]!r} "
            f"(id {drug_b[0]}) have a registered interaction"
        )
        self.drug_a = drug_a
        self.drug_b = drug_b


class AlreadyDispensed(RxError):
    code = "ALREADY_DISPENSED"


class BadCode(RxError):
    """Uniform dispensing failure: extraction or authentication failed."""

    code = "BAD_CODE"


class PrescriptionFormatError(RxError):
    code = "PRESCRIPTION_FORMAT"


# --- storage layer ---------------------------------------------------------


class NotFound(RxError):
    code = "NOT_FOUND"


class ConstraintViolation(RxError):
    code = "CONSTRAINT_VIOLATION"
