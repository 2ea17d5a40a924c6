"""HTTP API: JSON routes over the workflow service.

Auth is a bearer token from POST /login. Missing or stale tokens get 401,
a valid token with the wrong role gets 403, and every error body has the
shape {"error": {"code": ..., "message": ...}}.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServiceConfig
from .covers import CoverPool
from .errors import (
    AllergyConflict,
    AlreadyDispensed,
    BadCode,
    CapacityExceeded,
    ConstraintViolation,
    DuplicateUsername,
    InteractionConflict,
    InvalidCredentials,
    InvalidSession,
    MalformedCode,
    NotAuthorized,
    NotFound,
    PayloadTooLarge,
    PrescriptionFormatError,
    RxError,
    UnknownDrug,
    UnknownPatient,
    UnknownRecord,
)
from .model import Prescription, PrescriptionRecord
from .service import PrescriptionService, Session, SessionTable
from .storage import Store

_STATUS_BY_ERROR = {
    InvalidCredentials: 401,
    InvalidSession: 401,
    NotAuthorized: 403,
    NotFound: 404,
    UnknownPatient: 404,
    UnknownDrug: 404,
    UnknownRecord: 404,
    DuplicateUsername: 409,
    AllergyConflict: 409,
    InteractionConflict: 409,
    AlreadyDispensed: 409,
    ConstraintViolation: 409,
    BadCode: 400,
    MalformedCode: 400,
    PrescriptionFormatError: 422,
    CapacityExceeded: 422,
    PayloadTooLarge: 422,
}


def _status_for(exc: RxError) -> int:
    for klass in type(exc).__mro__:
        if klass in _STATUS_BY_ERROR:
            return _STATUS_BY_ERROR[klass]
    return 500


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


class LoginIn(BaseModel):
    username: str
    password: str


class UserIn(BaseModel):
    username: str
    password: str
    role: str
    display_name: str = ""


class DrugIn(BaseModel):
    name: str
    interacts_with: list[int] = Field(default_factory=list)


class PatientIn(BaseModel):
    name: str
    date_of_birth: str
    allergies: list[int] = Field(default_factory=list)


class ItemIn(BaseModel):
    drug_id: int
    dosage: str
    quantity: int


class PrescriptionIn(BaseModel):
    patient_id: int
    items: list[ItemIn]
    advice: str = ""


class DispenseIn(BaseModel):
    code: str


def _record_json(r: PrescriptionRecord) -> dict:
    return {
        "record_id": r.id,
        "patient_id": r.patient_id,
        "prescriber_id": r.prescriber_id,
        "issue_date": r.issue_date,
        "status": r.status,
        "dispensed_by": r.dispensed_by,
        "dispensed_at": r.dispensed_at,
    }


def _prescription_json(p: Prescription) -> dict:
    return {
        "patient_id": p.patient_id,
        "prescriber_id": p.prescriber_id,
        "issue_date": p.issue_date.isoformat(),
        "items": [
            {"drug_id": i.drug_id, "dosage": i.dosage, "quantity": i.quantity}
            for i in p.items
        ],
        "advice": p.advice,
    }


def build_service(config: ServiceConfig) -> PrescriptionService:
    store = Store(config.storage_path)
    covers = CoverPool(config.covers_dir)
    return PrescriptionService(
        store,
        covers,
        params=config.stego_params(),
        sessions=SessionTable(config.session_ttl_seconds),
        code_digits=config.code_digits,
    )


def create_app(service: PrescriptionService) -> FastAPI:
    app = FastAPI(title="rxstego", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(RxError)
    async def rx_error_handler(request: Request, exc: RxError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content=_error_body("VALIDATION", str(exc.errors()))
        )

    def current_session(authorization: str | None = Header(default=None)) -> Session:
        if not authorization or not authorization.startswith("Bearer "):
            raise InvalidSession("missing bearer token")
        return service.sessions.resolve(authorization[len("Bearer ") :])

    @app.post("/login")
    def login(body: LoginIn):
        session = service.authenticate(body.username, body.password)
        return {"token": session.token, "role": session.role}

    @app.post("/users", status_code=201)
    def add_user(body: UserIn, session: Session = Depends(current_session)):
        user = service.register_user(
            session, body.username, body.password, body.role, body.display_name
        )
        return {"id": user.id, "username": user.username, "role": user.role}

    @app.post("/drugs", status_code=201)
    def add_drug(body: DrugIn, session: Session = Depends(current_session)):
        drug = service.register_drug(session, body.name, body.interacts_with)
        return {"id": drug.id, "name": drug.name, "interacts_with": list(drug.interacts_with)}

    @app.get("/drugs")
    def list_drugs(session: Session = Depends(current_session)):
        return [
            {"id": d.id, "name": d.name, "interacts_with": list(d.interacts_with)}
            for d in service.list_drugs(session)
        ]

    @app.get("/pharmacies")
    def list_pharmacies(session: Session = Depends(current_session)):
        return [
            {"id": p.id, "name": p.name, "address": p.address}
            for p in service.list_pharmacies(session)
        ]

    @app.post("/patients", status_code=201)
    def add_patient(body: PatientIn, session: Session = Depends(current_session)):
        patient = service.register_patient(
            session, body.name, body.date_of_birth, body.allergies
        )
        return {
            "id": patient.id,
            "name": patient.name,
            "date_of_birth": patient.date_of_birth,
            "allergies": list(patient.allergies),
        }

    @app.get("/patients")
    def list_patients(q: str = "", session: Session = Depends(current_session)):
        return [
            {
                "id": p.id,
                "name": p.name,
                "date_of_birth": p.date_of_birth,
                "allergies": list(p.allergies),
            }
            for p in service.find_patients(session, q)
        ]

    @app.post("/prescriptions", status_code=201)
    def create_prescription(body: PrescriptionIn, session: Session = Depends(current_session)):
        record, code = service.create_prescription(
            session,
            body.patient_id,
            [(i.drug_id, i.dosage, i.quantity) for i in body.items],
            body.advice,
        )
        # the one and only time the code leaves the server
        return {"record_id": record.id, "code": code}

    @app.get("/patients/{patient_id}/history")
    def patient_history(patient_id: int, session: Session = Depends(current_session)):
        return service.patient_history(session, patient_id)

    @app.get("/prescriptions/{record_id}")
    def get_record(record_id: int, session: Session = Depends(current_session)):
        return _record_json(service.get_record(session, record_id))

    @app.get("/prescriptions/{record_id}/stego")
    def get_stego(record_id: int, session: Session = Depends(current_session)):
        return Response(content=service.stego_png(session, record_id), media_type="image/png")

    @app.post("/prescriptions/{record_id}/dispense")
    def dispense(record_id: int, body: DispenseIn, session: Session = Depends(current_session)):
        prescription, record = service.dispense(session, record_id, body.code)
        return {
            "prescription": _prescription_json(prescription),
            "dispensed_at": record.dispensed_at,
        }

    return app
