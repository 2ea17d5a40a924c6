"""Workflow layer: registration, prescribing, dispensing.

Ties the codec and crypto envelope to the store. The prescription code is
generated here, handed back exactly once, and never persisted; dispensing
reverses the pipeline and flips the record status with an atomic
compare-and-set so double dispensing cannot happen.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
import time
from dataclasses import dataclass
from datetime import date, datetime, timezone

from .covers import CoverPool
from .envelope import SealedPayload, derive_keys, generate_code, seal, unseal
from .errors import (
    AllergyConflict,
    AlreadyDispensed,
    AuthenticationFailed,
    BadCode,
    BadMagic,
    DuplicateUsername,
    InteractionConflict,
    InvalidCredentials,
    InvalidSession,
    LengthFieldInvalid,
    MalformedCode,
    NotAuthorized,
    NotFound,
    UnknownDrug,
    UnknownPatient,
    UnknownRecord,
)
from .image import decode_gray, png_bytes
from .model import (
    LineItem,
    Prescription,
    PrescriptionRecord,
    ROLES,
    STATUS_DISPENSED,
    STATUS_PENDING,
    serialize_prescription,
    parse_prescription,
)
from .ssis import DEFAULT_PARAMS, StegoParams, embed, extract
from .storage import Store

PBKDF2_ITERATIONS = 60000
DEFAULT_SESSION_TTL = 8 * 3600


def hash_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode(), salt, PBKDF2_ITERATIONS)
    return f"pbkdf2${PBKDF2_ITERATIONS}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iters, salt_hex, digest_hex = stored.split("$")
        if scheme != "pbkdf2":
            return False
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode(), bytes.fromhex(salt_hex), int(iters)
        )
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


# used when the username does not exist, so authenticate costs the same
_DUMMY_HASH = hash_password("placeholder")


@dataclass(frozen=True)
class Session:
    token: str
    user_id: int
    role: str
    display_name: str
    expires_at: float


class SessionTable:
    """In-memory token table; tokens are opaque 32-byte random strings."""

    def __init__(self, ttl_seconds: float = DEFAULT_SESSION_TTL):
        self.ttl_seconds = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create(self, user_id: int, role: str, display_name: str) -> Session:
        session = Session(
            token=secrets.token_hex(32),
            user_id=user_id,
            role=role,
            display_name=display_name,
            expires_at=time.time() + self.ttl_seconds,
        )
        with self._lock:
            self._sessions[session.token] = session
        return session

    def resolve(self, token: str) -> Session:
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise InvalidSession("unknown session token")
            if session.expires_at < time.time():
                del self._sessions[token]
                raise InvalidSession("session expired")
        return session

    def drop(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)


class PrescriptionService:
    def __init__(
        self,
        store: Store,
        covers: CoverPool,
        params: StegoParams = DEFAULT_PARAMS,
        sessions: SessionTable | None = None,
        code_digits: int = 13,
    ):
        self.store = store
        self.covers = covers
        self.params = params
        self.sessions = sessions if sessions is not None else SessionTable()
        self.code_digits = code_digits

    # --- sessions and roles ---------------------------------------------

    def authenticate(self, username: str, password: str) -> Session:
        user = self.store.find_user(username)
        if user is None:
            # burn the same hashing work; uniform error either way
            verify_password(password, _DUMMY_HASH)
            raise InvalidCredentials("invalid username or password")
        if not verify_password(password, user.password_hash):
            raise InvalidCredentials("invalid username or password")
        return self.sessions.create(user.id, user.role, user.display_name)

    def _require(self, session: Session, *roles: str) -> Session:
        if session.role not in roles:
            raise NotAuthorized(f"requires role in {roles}")
        return session

    # --- registration -----------------------------------------------------

    def register_user(
        self, session: Session, username: str, password: str, role: str, display_name: str
    ):
        self._require(session, "administrator")
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if self.store.find_user(username) is not None:
            raise DuplicateUsername(f"username {username!r} is taken")
        return self.store.add_user(username, hash_password(password), role, display_name)

    def register_patient(self, session: Session, name: str, date_of_birth: str, allergies=()):
        self._require(session, "administrator", "prescriber")
        for drug_id in allergies:
            try:
                self.store.get_drug(drug_id)
            except NotFound:
                raise UnknownDrug(f"allergy references unknown drug {drug_id}") from None
        return self.store.add_patient(name, date_of_birth, list(allergies))

    def register_drug(self, session: Session, name: str, interacts_with=()):
        self._require(session, "administrator")
        for other in interacts_with:
            try:
                self.store.get_drug(other)
            except NotFound:
                raise UnknownDrug(f"interaction references unknown drug {other}") from None
        return self.store.add_drug(name, list(interacts_with))

    def register_pharmacy(self, session: Session, name: str, address: str = ""):
        self._require(session, "administrator")
        return self.store.add_pharmacy(name, address)

    # --- reads --------------------------------------------------------------

    def list_drugs(self, session: Session):
        self._require(session, *ROLES)
        return self.store.list_drugs()

    def list_pharmacies(self, session: Session):
        self._require(session, *ROLES)
        return self.store.list_pharmacies()

    def find_patients(self, session: Session, query: str = ""):
        self._require(session, *ROLES)
        return self.store.list_patients(query)

    def get_patient(self, session: Session, patient_id: int):
        self._require(session, *ROLES)
        try:
            return self.store.get_patient(patient_id)
        except NotFound:
            raise UnknownPatient(f"no patient with id {patient_id}") from None

    def patient_history(self, session: Session, patient_id: int) -> list[dict]:
        """Record summaries only: ids, dates, statuses. Drug contents stay sealed."""
        self._require(session, "prescriber", "dispenser")
        try:
            self.store.get_patient(patient_id)
        except NotFound:
            raise UnknownPatient(f"no patient with id {patient_id}") from None
        return [
            {
                "record_id": r.id,
                "issue_date": r.issue_date,
                "status": r.status,
                "dispensed_at": r.dispensed_at,
            }
            for r in self.store.records_for_patient(patient_id)
        ]

    def stego_png(self, session: Session, record_id: int) -> bytes:
        self._require(session, "prescriber", "dispenser")
        try:
            self.store.get_record(record_id)
            return self.store.get_blob(record_id)
        except NotFound:
            raise UnknownRecord(f"no prescription record {record_id}") from None

    def get_record(self, session: Session, record_id: int) -> PrescriptionRecord:
        self._require(session, "prescriber", "dispenser")
        try:
            return self.store.get_record(record_id)
        except NotFound:
            raise UnknownRecord(f"no prescription record {record_id}") from None

    # --- prescribing ----------------------------------------------------------

    def create_prescription(
        self,
        session: Session,
        patient_id: int,
        items: list[tuple[int, str, int]],
        advice: str = "",
        cover: str | None = None,
    ) -> tuple[PrescriptionRecord, str]:
        """Returns (record, code). The code is returned here and nowhere else."""
        self._require(session, "prescriber")
        try:
            patient = self.store.get_patient(patient_id)
        except NotFound:
            raise UnknownPatient(f"no patient with id {patient_id}") from None

        line_items = []
        drugs = []
        for drug_id, dosage, quantity in items:
            try:
                drug = self.store.get_drug(drug_id)
            except NotFound:
                raise UnknownDrug(f"no drug with id {drug_id}") from None
            if drug.id in patient.allergies:
                raise AllergyConflict(drug.id, drug.name)
            drugs.append(drug)
            line_items.append(LineItem(drug.id, dosage, quantity))
        for i in range(len(drugs)):
            for j in range(i + 1, len(drugs)):
                if self.store.interaction_exists(drugs[i].id, drugs[j].id):
                    raise InteractionConflict(
                        (drugs[i].id, drugs[i].name), (drugs[j].id, drugs[j].name)
                    )

        issue_date = date.today()
        prescription = Prescription(
            patient_id=patient_id,
            prescriber_id=session.user_id,
            issue_date=issue_date,
            items=tuple(line_items),
            advice=advice,
        )
        plaintext = serialize_prescription(prescription)

        code = generate_code(self.code_digits)
        keys = derive_keys(code)
        sealed = seal(plaintext, code).to_bytes()

        cover_name = cover if cover is not None else self.covers.assign(self.store.count_records())
        cover_image = self.covers.load(cover_name)
        stego = embed(cover_image, sealed, keys.stego_key, self.params)

        record = self.store.add_record(patient_id, session.user_id, issue_date.isoformat())
        self.store.put_blob(record.id, png_bytes(stego))
        return record, code

    # --- dispensing -------------------------------------------------------------

    def dispense(self, session: Session, record_id: int, code: str) -> tuple[Prescription, PrescriptionRecord]:
        self._require(session, "dispenser")
        try:
            record = self.store.get_record(record_id)
        except NotFound:
            raise UnknownRecord(f"no prescription record {record_id}") from None
        if record.status == STATUS_DISPENSED:
            raise AlreadyDispensed(f"record {record_id} was already dispensed")

        stego = decode_gray(self.store.get_blob(record_id))
        try:
            keys = derive_keys(code)
            sealed = SealedPayload.from_bytes(extract(stego, keys.stego_key, self.params))
            plaintext = unseal(sealed, code)
        except (MalformedCode, BadMagic, LengthFieldInvalid, AuthenticationFailed):
            # uniform: no hint about which stage rejected the code
            raise BadCode("code does not open this prescription") from None
        prescription = parse_prescription(plaintext)

        now = datetime.now(timezone.utc).isoformat()
        won = self.store.compare_and_set_status(
            record_id, STATUS_PENDING, STATUS_DISPENSED, session.user_id, now
        )
        if not won:
            raise AlreadyDispensed(f"record {record_id} was already dispensed")
        self.store.add_feedback(record_id, record.prescriber_id, session.user_id, now)
        return prescription, self.store.get_record(record_id)
