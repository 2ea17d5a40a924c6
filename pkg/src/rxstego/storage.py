"""Durable single-node store: SQLite tables plus a PNG blob directory.

Every operation opens its own connection, so the store is safe to call
from many threads. The dispense transition is an atomic compare-and-set
implemented as a conditional UPDATE.
"""

from __future__ import annotations

import os
import sqlite3
from pathlib import Path

from .errors import ConstraintViolation, NotFound
from .model import (
    Drug,
    FeedbackEvent,
    Patient,
    Pharmacy,
    PrescriptionRecord,
    ROLES,
    UserAccount,
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    username TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL,
    role TEXT NOT NULL CHECK (role IN ('administrator', 'prescriber', 'dispenser')),
    display_name TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS patients (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL,
    date_of_birth TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS drugs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS patient_allergies (
    patient_id INTEGER NOT NULL REFERENCES patients(id),
    drug_id INTEGER NOT NULL REFERENCES drugs(id),
    PRIMARY KEY (patient_id, drug_id)
);
CREATE TABLE IF NOT EXISTS drug_interactions (
    drug_a INTEGER NOT NULL REFERENCES drugs(id),
    drug_b INTEGER NOT NULL REFERENCES drugs(id),
    PRIMARY KEY (drug_a, drug_b),
    CHECK (drug_a < drug_b)
);
CREATE TABLE IF NOT EXISTS pharmacies (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    name TEXT NOT NULL UNIQUE,
    address TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS prescription_records (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    patient_id INTEGER NOT NULL REFERENCES patients(id),
    prescriber_id INTEGER NOT NULL REFERENCES users(id),
    issue_date TEXT NOT NULL,
    status TEXT NOT NULL CHECK (status IN ('pending', 'dispensed')),
    stego_ref TEXT NOT NULL,
    dispensed_by INTEGER REFERENCES users(id),
    dispensed_at TEXT,
    CHECK ((status = 'dispensed') = (dispensed_by IS NOT NULL AND dispensed_at IS NOT NULL))
);
CREATE TABLE IF NOT EXISTS feedback_events (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    record_id INTEGER NOT NULL REFERENCES prescription_records(id),
    prescriber_id INTEGER NOT NULL REFERENCES users(id),
    dispenser_id INTEGER NOT NULL REFERENCES users(id),
    created_at TEXT NOT NULL
);
"""


class Store:
    """SQLite-backed store; ``blob_dir`` holds the stego PNGs by record id."""

    def __init__(self, path: str | os.PathLike, blob_dir: str | os.PathLike | None = None):
        self.path = str(path)
        parent = Path(self.path).parent
        parent.mkdir(parents=True, exist_ok=True)
        self.blob_dir = Path(blob_dir) if blob_dir else parent / "blobs"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        with self._connect() as con:
            con.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        con = sqlite3.connect(self.path, timeout=30.0)
        con.execute("PRAGMA journal_mode=WAL")
        con.execute("PRAGMA foreign_keys=ON")
        con.row_factory = sqlite3.Row
        return con

    # --- users ---------------------------------------------------------

    def add_user(self, username: str, password_hash: str, role: str, display_name: str) -> UserAccount:
        if role not in ROLES:
            raise ConstraintViolation(f"unknown role {role!r}")
        try:
            with self._connect() as con:
                cur = con.execute(
                    "INSERT INTO users (username, password_hash, role, display_name) "
                    "VALUES (?, ?, ?, ?)",
                    (username, password_hash, role, display_name),
                )
                return UserAccount(cur.lastrowid, username, password_hash, role, display_name)
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None

    def get_user(self, user_id: int) -> UserAccount:
        with self._connect() as con:
            row = con.execute("SELECT * FROM users WHERE id = ?", (user_id,)).fetchone()
        if row is None:
            raise NotFound(f"no user with id {user_id}")
        return _user(row)

    def find_user(self, username: str) -> UserAccount | None:
        with self._connect() as con:
            row = con.execute(
                "SELECT * FROM users WHERE username = ?", (username,)
            ).fetchone()
        return _user(row) if row else None

    def list_users(self) -> list[UserAccount]:
        with self._connect() as con:
            rows = con.execute("SELECT * FROM users ORDER BY id").fetchall()
        return [_user(r) for r in rows]

    # --- patients ------------------------------------------------------

    def add_patient(self, name: str, date_of_birth: str, allergies: list[int] = ()) -> Patient:
        try:
            with self._connect() as con:
                cur = con.execute(
                    "INSERT INTO patients (name, date_of_birth) VALUES (?, ?)",
                    (name, date_of_birth),
                )
                pid = cur.lastrowid
                for drug_id in allergies:
                    con.execute(
                        "INSERT INTO patient_allergies (patient_id, drug_id) VALUES (?, ?)",
                        (pid, drug_id),
                    )
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None
        return Patient(pid, name, date_of_birth, tuple(allergies))

    def get_patient(self, patient_id: int) -> Patient:
        with self._connect() as con:
            row = con.execute(
                "SELECT * FROM patients WHERE id = ?", (patient_id,)
            ).fetchone()
            if row is None:
                raise NotFound(f"no patient with id {patient_id}")
            allergies = [
                r["drug_id"]
                for r in con.execute(
                    "SELECT drug_id FROM patient_allergies WHERE patient_id = ? ORDER BY drug_id",
                    (patient_id,),
                )
            ]
        return Patient(row["id"], row["name"], row["date_of_birth"], tuple(allergies))

    def list_patients(self, query: str = "") -> list[Patient]:
        with self._connect() as con:
            rows = con.execute(
                "SELECT id FROM patients WHERE name LIKE ? ORDER BY id",
                (f"%{query}%",),
            ).fetchall()
        return [self.get_patient(r["id"]) for r in rows]

    # --- drugs -----------------------------------------------------------

    def add_drug(self, name: str, interacts_with: list[int] = ()) -> Drug:
        try:
            with self._connect() as con:
                cur = con.execute("INSERT INTO drugs (name) VALUES (?)", (name,))
                did = cur.lastrowid
                for other in interacts_with:
                    a, b = sorted((did, other))
                    con.execute(
                        "INSERT OR IGNORE INTO drug_interactions (drug_a, drug_b) VALUES (?, ?)",
                        (a, b),
                    )
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None
        return self.get_drug(did)

    def get_drug(self, drug_id: int) -> Drug:
        with self._connect() as con:
            row = con.execute("SELECT * FROM drugs WHERE id = ?", (drug_id,)).fetchone()
            if row is None:
                raise NotFound(f"no drug with id {drug_id}")
            partners = [
                r[0]
                for r in con.execute(
                    "SELECT drug_b FROM drug_interactions WHERE drug_a = ? "
                    "UNION SELECT drug_a FROM drug_interactions WHERE drug_b = ? "
                    "ORDER BY 1",
                    (drug_id, drug_id),
                )
            ]
        return Drug(row["id"], row["name"], tuple(partners))

    def find_drug(self, name: str) -> Drug | None:
        with self._connect() as con:
            row = con.execute("SELECT id FROM drugs WHERE name = ?", (name,)).fetchone()
        return self.get_drug(row["id"]) if row else None

    def list_drugs(self) -> list[Drug]:
        with self._connect() as con:
            rows = con.execute("SELECT id FROM drugs ORDER BY id").fetchall()
        return [self.get_drug(r["id"]) for r in rows]

    def add_interaction(self, drug_a: int, drug_b: int) -> None:
        a, b = sorted((drug_a, drug_b))
        try:
            with self._connect() as con:
                con.execute(
                    "INSERT OR IGNORE INTO drug_interactions (drug_a, drug_b) VALUES (?, ?)",
                    (a, b),
                )
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None

    def interaction_exists(self, drug_a: int, drug_b: int) -> bool:
        a, b = sorted((drug_a, drug_b))
        with self._connect() as con:
            row = con.execute(
                "SELECT 1 FROM drug_interactions WHERE drug_a = ? AND drug_b = ?",
                (a, b),
            ).fetchone()
        return row is not None

    # --- pharmacies ------------------------------------------------------

    def add_pharmacy(self, name: str, address: str = "") -> Pharmacy:
        try:
            with self._connect() as con:
                cur = con.execute(
                    "INSERT INTO pharmacies (name, address) VALUES (?, ?)",
                    (name, address),
                )
                return Pharmacy(cur.lastrowid, name, address)
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None

    def list_pharmacies(self) -> list[Pharmacy]:
        with self._connect() as con:
            rows = con.execute("SELECT * FROM pharmacies ORDER BY id").fetchall()
        return [Pharmacy(r["id"], r["name"], r["address"]) for r in rows]

    # --- prescription records ---------------------------------------------

    def add_record(self, patient_id: int, prescriber_id: int, issue_date: str) -> PrescriptionRecord:
        # stego_ref follows the row id, so insert first and fill it in the
        # same transaction
        try:
            with self._connect() as con:
                cur = con.execute(
                    "INSERT INTO prescription_records "
                    "(patient_id, prescriber_id, issue_date, status, stego_ref) "
                    "VALUES (?, ?, ?, 'pending', '')",
                    (patient_id, prescriber_id, issue_date),
                )
                rid = cur.lastrowid
                stego_ref = f"{rid}.png"
                con.execute(
                    "UPDATE prescription_records SET stego_ref = ? WHERE id = ?",
                    (stego_ref, rid),
                )
        except sqlite3.IntegrityError as exc:
            raise ConstraintViolation(str(exc)) from None
        return PrescriptionRecord(rid, patient_id, prescriber_id, issue_date, "pending", stego_ref)

    def get_record(self, record_id: int) -> PrescriptionRecord:
        with self._connect() as con:
            row = con.execute(
                "SELECT * FROM prescription_records WHERE id = ?", (record_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"no prescription record with id {record_id}")
        return _record(row)

    def records_for_patient(self, patient_id: int) -> list[PrescriptionRecord]:
        with self._connect() as con:
            rows = con.execute(
                "SELECT * FROM prescription_records WHERE patient_id = ? ORDER BY id",
                (patient_id,),
            ).fetchall()
        return [_record(r) for r in rows]

    def count_records(self) -> int:
        with self._connect() as con:
            (n,) = con.execute("SELECT COUNT(*) FROM prescription_records").fetchone()
        return n

    def compare_and_set_status(
        self,
        record_id: int,
        expected: str,
        new: str,
        dispenser_id: int,
        timestamp: str,
    ) -> bool:
        """Atomically flip the record status; True only for the single winner."""
        with self._connect() as con:
            exists = con.execute(
                "SELECT 1 FROM prescription_records WHERE id = ?", (record_id,)
            ).fetchone()
            if exists is None:
                raise NotFound(f"no prescription record with id {record_id}")
            cur = con.execute(
                "UPDATE prescription_records "
                "SET status = ?, dispensed_by = ?, dispensed_at = ? "
                "WHERE id = ? AND status = ?",
                (new, dispenser_id, timestamp, record_id, expected),
            )
            return cur.rowcount == 1

    # --- feedback events ---------------------------------------------------

    def add_feedback(self, record_id: int, prescriber_id: int, dispenser_id: int, created_at: str) -> FeedbackEvent:
        with self._connect() as con:
            cur = con.execute(
                "INSERT INTO feedback_events (record_id, prescriber_id, dispenser_id, created_at) "
                "VALUES (?, ?, ?, ?)",
                (record_id, prescriber_id, dispenser_id, created_at),
            )
            return FeedbackEvent(cur.lastrowid, record_id, prescriber_id, dispenser_id, created_at)

    def feedback_for_prescriber(self, prescriber_id: int) -> list[FeedbackEvent]:
        with self._connect() as con:
            rows = con.execute(
                "SELECT * FROM feedback_events WHERE prescriber_id = ? ORDER BY id",
                (prescriber_id,),
            ).fetchall()
        return [
            FeedbackEvent(r["id"], r["record_id"], r["prescriber_id"], r["dispenser_id"], r["created_at"])
            for r in rows
        ]

    # --- blobs ---------------------------------------------------------------

    def blob_path(self, record_id: int) -> Path:
        return self.blob_dir / f"{record_id}.png"

    def put_blob(self, record_id: int, data: bytes) -> str:
        """Store stego PNG bytes exactly as given; returns the reference name."""
        path = self.blob_path(record_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)
        return path.name

    def get_blob(self, record_id: int) -> bytes:
        path = self.blob_path(record_id)
        if not path.exists():
            raise NotFound(f"no stego blob for record {record_id}")
        return path.read_bytes()


def _user(row: sqlite3.Row) -> UserAccount:
    return UserAccount(
        row["id"], row["username"], row["password_hash"], row["role"], row["display_name"]
    )


def _record(row: sqlite3.Row) -> PrescriptionRecord:
    return PrescriptionRecord(
        id=row["id"],
        patient_id=row["patient_id"],
        prescriber_id=row["prescriber_id"],
        issue_date=row["issue_date"],
        status=row["status"],
        stego_ref=row["stego_ref"],
        dispensed_by=row["dispensed_by"],
        dispensed_at=row["dispensed_at"],
    )
