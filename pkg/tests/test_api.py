"""HTTP layer tests over the in-process ASGI app."""

import hashlib

import pytest
from fastapi.testclient import TestClient

from rxstego.api import create_app
from rxstego.service import PrescriptionService, SessionTable
from rxstego.storage import Store
from rxstego.covers import CoverPool
from rxstego.service import hash_password

from conftest import WORKFLOW_PARAMS, WORKFLOW_COVER_SIZE


@pytest.fixture()
def client(tmp_path):
    store = Store(tmp_path / "api.db", tmp_path / "blobs")
    covers = CoverPool(tmp_path / "covers")
    covers.seed_defaults(count=2, size=WORKFLOW_COVER_SIZE)
    service = PrescriptionService(store, covers, params=WORKFLOW_PARAMS, sessions=SessionTable())
    store.add_user("root", hash_password("rootpw"), "administrator", "Root")
    store.add_user("ade", hash_password("adepw"), "prescriber", "ade")
    store.add_user("bisi", hash_password("bisipw"), "dispenser", "bisi")
    app = create_app(service)
    with TestClient(app, raise_server_exceptions=False) as c:
        c.service = service
        c.store = store
        yield c


def token(client, username):
    r = client.post("/login", json={"username": username, "password": f"{username}pw"})
    assert r.status_code == 200, r.text
    return r.json()["token"]


def auth(tok):
    return {"Authorization": f"Bearer {tok}"}


def seed_clinical(client):
    """Drugs and a patient registered over the API itself."""
    admin = token(client, "root")
    drugs = {}
    for name in ["Amoxicillin", "Paracetamol", "Warfarin"]:
        drugs[name] = client.post("/drugs", json={"name": name}, headers=auth(admin)).json()["id"]
    r = client.post(
        "/drugs",
        json={"name": "Aspirin", "interacts_with": [drugs["Warfarin"]]},
        headers=auth(admin),
    )
    drugs["Aspirin"] = r.json()["id"]
    patient = client.post(
        "/patients",
        json={"name": "OLUWOLE OLUWOLE", "date_of_birth": "1985-03-19",
              "allergies": [drugs["Amoxicillin"]]},
        headers=auth(admin),
    ).json()
    return admin, drugs, patient


class TestAuth:
    def test_login_ok(self, client):
        r = client.post("/login", json={"username": "ade", "password": "adepw"})
        assert r.status_code == 200
        body = r.json()
        assert body["role"] == "prescriber"
        assert len(body["token"]) == 64

    def test_login_rejected_uniformly(self, client):
        r1 = client.post("/login", json={"username": "ade", "password": "nope"})
        r2 = client.post("/login", json={"username": "ghost", "password": "nope"})
        assert r1.status_code == r2.status_code == 401
        assert r1.json()["error"]["message"] == r2.json()["error"]["message"]

    def test_error_body_shape(self, client):
        r = client.post("/login", json={"username": "ade", "password": "nope"})
        body = r.json()
        assert set(body) == {"error"}
        assert set(body["error"]) == {"code", "message"}
        assert body["error"]["code"] == "INVALID_CREDENTIALS"

    def test_all_protected_routes_401_without_token(self, client):
        import re

        walked = 0
        for route in client.app.routes:
            if not hasattr(route, "methods"):
                continue
            for method in route.methods - {"HEAD", "OPTIONS"}:
                if route.path == "/login":
                    continue
                path = re.sub(r"\{[^}]+\}", "1", route.path)
                r = client.request(method, path, json={})
                assert r.status_code == 401, f"{method} {path} -> {r.status_code}"
                assert r.json()["error"]["code"] == "INVALID_SESSION"
                walked += 1
        assert walked >= 11  # every documented route beyond /login

    def test_garbage_token_401(self, client):
        r = client.get("/drugs", headers=auth("deadbeef"))
        assert r.status_code == 401

    def test_wrong_scheme_401(self, client):
        r = client.get("/drugs", headers={"Authorization": "Basic abc"})
        assert r.status_code == 401


class TestRoleGates:
    def test_dispenser_cannot_prescribe(self, client):
        admin, drugs, patient = seed_clinical(client)
        t = token(client, "bisi")
        r = client.post(
            "/prescriptions",
            json={"patient_id": patient["id"],
                  "items": [{"drug_id": drugs["Paracetamol"], "dosage": "x", "quantity": 1}]},
            headers=auth(t),
        )
        assert r.status_code == 403
        assert r.json()["error"]["code"] == "NOT_AUTHORIZED"

    def test_prescriber_cannot_add_users(self, client):
        t = token(client, "ade")
        r = client.post(
            "/users",
            json={"username": "x", "password": "p", "role": "dispenser", "display_name": "X"},
            headers=auth(t),
        )
        assert r.status_code == 403

    def test_admin_cannot_view_history(self, client):
        admin, drugs, patient = seed_clinical(client)
        r = client.get(f"/patients/{patient['id']}/history", headers=auth(admin))
        assert r.status_code == 403

    def test_admin_adds_user(self, client):
        t = token(client, "root")
        r = client.post(
            "/users",
            json={"username": "doc2", "password": "pw2", "role": "prescriber", "display_name": "Doc"},
            headers=auth(t),
        )
        assert r.status_code == 201
        assert client.post("/login", json={"username": "doc2", "password": "pw2"}).status_code == 200


class TestFlow:
    def prescribe(self, client, drugs, patient, items=None):
        t = token(client, "ade")
        r = client.post(
            "/prescriptions",
            json={
                "patient_id": patient["id"],
                "items": items or [
                    {"drug_id": drugs["Paracetamol"], "dosage": "500 mg twice daily", "quantity": 20}
                ],
                "advice": "rest and fluids",
            },
            headers=auth(t),
        )
        return r

    def test_prescribe_returns_code_once(self, client):
        admin, drugs, patient = seed_clinical(client)
        r = self.prescribe(client, drugs, patient)
        assert r.status_code == 201
        body = r.json()
        assert set(body) == {"record_id", "code"}
        assert len(body["code"]) == 13 and body["code"].isdigit()
        # record endpoint never echoes the code
        t = token(client, "ade")
        rec = client.get(f"/prescriptions/{body['record_id']}", headers=auth(t)).json()
        assert body["code"] not in str(rec)

    def test_allergy_conflict_409(self, client):
        admin, drugs, patient = seed_clinical(client)
        r = self.prescribe(client, drugs, patient,
                           items=[{"drug_id": drugs["Amoxicillin"], "dosage": "x", "quantity": 1}])
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "ALLERGY_CONFLICT"
        assert "Amoxicillin" in r.json()["error"]["message"]

    def test_interaction_conflict_409(self, client):
        admin, drugs, patient = seed_clinical(client)
        r = self.prescribe(client, drugs, patient, items=[
            {"drug_id": drugs["Warfarin"], "dosage": "5 mg", "quantity": 30},
            {"drug_id": drugs["Aspirin"], "dosage": "81 mg", "quantity": 30},
        ])
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "INTERACTION_CONFLICT"

    def test_stego_bytes_identical_to_blob(self, client):
        admin, drugs, patient = seed_clinical(client)
        record_id = self.prescribe(client, drugs, patient).json()["record_id"]
        t = token(client, "bisi")
        r = client.get(f"/prescriptions/{record_id}/stego", headers=auth(t))
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        served = hashlib.sha256(r.content).hexdigest()
        stored = hashlib.sha256(client.store.get_blob(record_id)).hexdigest()
        assert served == stored

    def test_dispense_happy_path(self, client):
        admin, drugs, patient = seed_clinical(client)
        body = self.prescribe(client, drugs, patient).json()
        t = token(client, "bisi")
        r = client.post(
            f"/prescriptions/{body['record_id']}/dispense",
            json={"code": body["code"]},
            headers=auth(t),
        )
        assert r.status_code == 200, r.text
        out = r.json()
        assert out["prescription"]["items"][0]["dosage"] == "500 mg twice daily"
        assert out["prescription"]["advice"] == "rest and fluids"
        assert out["dispensed_at"]
        # history now shows the flip
        h = client.get(f"/patients/{patient['id']}/history", headers=auth(t)).json()
        assert h[0]["status"] == "dispensed"

    def test_dispense_bad_code(self, client):
        admin, drugs, patient = seed_clinical(client)
        body = self.prescribe(client, drugs, patient).json()
        wrong = str((int(body["code"]) + 1) % 10**13).zfill(13)
        t = token(client, "bisi")
        r = client.post(
            f"/prescriptions/{body['record_id']}/dispense",
            json={"code": wrong},
            headers=auth(t),
        )
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "BAD_CODE"
        assert "prescription" not in r.json()

    def test_dispense_twice_conflict(self, client):
        admin, drugs, patient = seed_clinical(client)
        body = self.prescribe(client, drugs, patient).json()
        t = token(client, "bisi")
        url = f"/prescriptions/{body['record_id']}/dispense"
        assert client.post(url, json={"code": body["code"]}, headers=auth(t)).status_code == 200
        r = client.post(url, json={"code": body["code"]}, headers=auth(t))
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "ALREADY_DISPENSED"

    def test_history_summaries_have_no_drug_fields(self, client):
        admin, drugs, patient = seed_clinical(client)
        self.prescribe(client, drugs, patient)
        t = token(client, "ade")
        h = client.get(f"/patients/{patient['id']}/history", headers=auth(t)).json()
        assert len(h) == 1
        assert set(h[0]) == {"record_id", "issue_date", "status", "dispensed_at"}
        assert "Paracetamol" not in r"".join(str(v) for v in h[0].values())

    def test_patient_search(self, client):
        admin, drugs, patient = seed_clinical(client)
        t = token(client, "ade")
        hits = client.get("/patients", params={"q": "OLUW"}, headers=auth(t)).json()
        assert [p["name"] for p in hits] == ["OLUWOLE OLUWOLE"]
        assert client.get("/patients", params={"q": "zzz"}, headers=auth(t)).json() == []

    def test_pharmacies_listed(self, client):
        client.store.add_pharmacy("Central Pharmacy", "1 Hospital Road")
        t = token(client, "bisi")
        r = client.get("/pharmacies", headers=auth(t))
        assert r.status_code == 200
        assert r.json()[0]["name"] == "Central Pharmacy"

    def test_unknown_record_404(self, client):
        t = token(client, "bisi")
        r = client.post("/prescriptions/404/dispense", json={"code": "1" * 13}, headers=auth(t))
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "UNKNOWN_RECORD"

    def test_validation_error_shape(self, client):
        t = token(client, "ade")
        r = client.post("/prescriptions", json={"oops": True}, headers=auth(t))
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "VALIDATION"
