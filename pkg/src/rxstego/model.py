"""Domain entities and the canonical prescription serialization.

The serialized prescription is the plaintext that gets sealed and embedded;
it must round-trip byte-for-byte, so the format is a fixed line order:

    v1
    patient:<id>
    prescriber:<id>
    date:<YYYY-MM-DD>
    item:<drug-id>|<dosage>|<qty>     (one or more)
    advice:<text>

Dates are emitted zero-padded; unpadded dates are accepted on parse.
Drug contents never leave this form except inside a sealed stego image.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .errors import PrescriptionFormatError

ROLES = ("administrator", "prescriber", "dispenser")

STATUS_PENDING = "pending"
STATUS_DISPENSED = "dispensed"


@dataclass(frozen=True)
class UserAccount:
    id: int
    username: str
    password_hash: str
    role: str
    display_name: str


@dataclass(frozen=True)
class Patient:
    id: int
    name: str
    date_of_birth: str
    allergies: tuple[int, ...] = ()


@dataclass(frozen=True)
class Drug:
    id: int
    name: str
    interacts_with: tuple[int, ...] = ()


@dataclass(frozen=True)
class Pharmacy:
    id: int
    name: str
    address: str = ""


@dataclass(frozen=True)
class LineItem:
    drug_id: int
    dosage: str
    quantity: int


@dataclass(frozen=True)
class Prescription:
    """Plaintext form; exists transiently and inside the sealed payload."""

    patient_id: int
    prescriber_id: int
    issue_date: date
    items: tuple[LineItem, ...]
    advice: str = ""


@dataclass(frozen=True)
class PrescriptionRecord:
    """Stored form: workflow metadata only, no drug contents."""

    id: int
    patient_id: int
    prescriber_id: int
    issue_date: str
    status: str
    stego_ref: str
    dispensed_by: int | None = None
    dispensed_at: str | None = None


@dataclass(frozen=True)
class FeedbackEvent:
    id: int
    record_id: int
    prescriber_id: int
    dispenser_id: int
    created_at: str


def _check_text(kind: str, value: str, bar_ok: bool) -> str:
    if "\n" in value or "\r" in value:
        raise PrescriptionFormatError(f"{kind} must not contain line breaks")
    if not bar_ok and "|" in value:
        raise PrescriptionFormatError(f"{kind} must not contain '|'")
    return value


def serialize_prescription(p: Prescription) -> bytes:
    """Canonical byte form of a prescription (UTF-8, line-oriented)."""
    if not p.items:
        raise PrescriptionFormatError("a prescription needs at least one item")
    lines = [
        "v1",
        f"patient:{p.patient_id}",
        f"prescriber:{p.prescriber_id}",
        f"date:{p.issue_date.isoformat()}",
    ]
    for item in p.items:
        if item.quantity < 1:
            raise PrescriptionFormatError("item quantity must be a positive integer")
        dosage = _check_text("dosage", item.dosage, bar_ok=False)
        lines.append(f"item:{item.drug_id}|{dosage}|{item.quantity}")
    lines.append(f"advice:{_check_text('advice', p.advice, bar_ok=True)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_date(text: str) -> date:
    parts = text.split("-")
    if len(parts) != 3:
        raise PrescriptionFormatError(f"bad date {text!r}")
    try:
        return date(int(parts[0]), int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise PrescriptionFormatError(f"bad date {text!r}: {exc}") from None


def parse_prescription(data: bytes) -> Prescription:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise PrescriptionFormatError("prescription is not valid UTF-8") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 6 or lines[0] != "v1":
        raise PrescriptionFormatError("unrecognized prescription format")

    def expect(idx: int, prefix: str) -> str:
        if not lines[idx].startswith(prefix):
            raise PrescriptionFormatError(f"expected {prefix!r} on line {idx + 1}")
        return lines[idx][len(prefix) :]

    try:
        patient_id = int(expect(1, "patient:"))
        prescriber_id = int(expect(2, "prescriber:"))
    except ValueError:
        raise PrescriptionFormatError("patient and prescriber must be integer ids") from None
    issue_date = _parse_date(expect(3, "date:"))

    items: list[LineItem] = []
    idx = 4
    while idx < len(lines) and lines[idx].startswith("item:"):
        fields = lines[idx][len("item:") :].split("|")
        if len(fields) != 3:
            raise PrescriptionFormatError(f"bad item line {lines[idx]!r}")
        try:
            items.append(LineItem(int(fields[0]), fields[1], int(fields[2])))
        except ValueError:
            raise PrescriptionFormatError(f"bad item line {lines[idx]!r}") from None
        idx += 1
    if not items:
        raise PrescriptionFormatError("a prescription needs at least one item")
    if idx != len(lines) - 1:
        raise PrescriptionFormatError("unexpected trailing lines")
    advice = expect(idx, "advice:")
    return Prescription(patient_id, prescriber_id, issue_date, tuple(items), advice)
