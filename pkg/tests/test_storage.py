"""Store behavior: durability, constraints, atomic status transition, blobs."""

import threading

import pytest

from rxstego.errors import ConstraintViolation, NotFound
from rxstego.storage import Store


@pytest.fixture()
def store(tmp_path):
    return Store(tmp_path / "s.db", tmp_path / "blobs")


class TestUsers:
    def test_add_and_get(self, store):
        u = store.add_user("ade", "hash", "prescriber", "ade")
        assert store.get_user(u.id) == u
        assert store.find_user("ade") == u

    def test_duplicate_username(self, store):
        store.add_user("ade", "h", "prescriber", "x")
        with pytest.raises(ConstraintViolation):
            store.add_user("ade", "h2", "dispenser", "y")

    def test_unknown_role(self, store):
        with pytest.raises(ConstraintViolation):
            store.add_user("u", "h", "wizard", "w")

    def test_get_missing(self, store):
        with pytest.raises(NotFound):
            store.get_user(404)
        assert store.find_user("nobody") is None


class TestDurability:
    def test_survives_reopen(self, tmp_path):
        s1 = Store(tmp_path / "d.db", tmp_path / "blobs")
        u = s1.add_user("keeper", "h", "administrator", "K")
        p = s1.add_patient("Pat", "1990-01-01")
        s2 = Store(tmp_path / "d.db", tmp_path / "blobs")
        assert s2.get_user(u.id) == u
        assert s2.get_patient(p.id) == p


class TestPatientsAndDrugs:
    def test_patient_allergies_round_trip(self, store):
        d1 = store.add_drug("Amoxicillin")
        d2 = store.add_drug("Aspirin")
        p = store.add_patient("A", "2000-05-06", [d1.id, d2.id])
        assert store.get_patient(p.id).allergies == (d1.id, d2.id)

    def test_patient_search(self, store):
        store.add_patient("OLUWOLE OLUWOLE", "1985-03-19")
        store.add_patient("Jane Doe", "1970-01-01")
        assert [p.name for p in store.list_patients("OLU")] == ["OLUWOLE OLUWOLE"]
        assert len(store.list_patients("")) == 2

    def test_interactions_are_symmetric(self, store):
        a = store.add_drug("Warfarin")
        b = store.add_drug("Aspirin", [a.id])
        assert store.interaction_exists(a.id, b.id)
        assert store.interaction_exists(b.id, a.id)
        assert store.get_drug(a.id).interacts_with == (b.id,)
        assert store.get_drug(b.id).interacts_with == (a.id,)

    def test_duplicate_drug_name(self, store):
        store.add_drug("Ibuprofen")
        with pytest.raises(ConstraintViolation):
            store.add_drug("Ibuprofen")

    def test_allergy_on_unknown_drug(self, store):
        with pytest.raises(ConstraintViolation):
            store.add_patient("B", "2001-01-01", [999])


class TestRecords:
    def _seed(self, store):
        doc = store.add_user("doc", "h", "prescriber", "Doc")
        pat = store.add_patient("P", "1999-09-09")
        return doc, pat

    def test_add_and_get(self, store):
        doc, pat = self._seed(store)
        r = store.add_record(pat.id, doc.id, "2026-08-19")
        assert r.status == "pending"
        assert r.stego_ref == f"{r.id}.png"
        assert store.get_record(r.id) == r

    def test_unknown_patient_rejected(self, store):
        doc, _ = self._seed(store)
        with pytest.raises(ConstraintViolation):
            store.add_record(12345, doc.id, "2026-08-19")

    def test_records_for_patient(self, store):
        doc, pat = self._seed(store)
        r1 = store.add_record(pat.id, doc.id, "2026-08-18")
        r2 = store.add_record(pat.id, doc.id, "2026-08-19")
        assert [r.id for r in store.records_for_patient(pat.id)] == [r1.id, r2.id]

    def test_cas_transition(self, store):
        doc, pat = self._seed(store)
        disp = store.add_user("ph", "h", "dispenser", "Ph")
        r = store.add_record(pat.id, doc.id, "2026-08-19")
        assert store.compare_and_set_status(r.id, "pending", "dispensed", disp.id, "t0")
        after = store.get_record(r.id)
        assert after.status == "dispensed"
        assert after.dispensed_by == disp.id
        assert after.dispensed_at == "t0"
        # second attempt loses
        assert not store.compare_and_set_status(r.id, "pending", "dispensed", disp.id, "t1")
        assert store.get_record(r.id).dispensed_at == "t0"

    def test_cas_missing_record(self, store):
        with pytest.raises(NotFound):
            store.compare_and_set_status(7, "pending", "dispensed", 1, "t")

    def test_cas_is_atomic_under_threads(self, store):
        doc, pat = self._seed(store)
        disp = store.add_user("ph", "h", "dispenser", "Ph")
        r = store.add_record(pat.id, doc.id, "2026-08-19")
        barrier = threading.Barrier(16)
        wins = []

        def worker(n):
            barrier.wait()
            if store.compare_and_set_status(r.id, "pending", "dispensed", disp.id, f"t{n}"):
                wins.append(n)

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(wins) == 1


class TestBlobs:
    def test_round_trip_bit_exact(self, store):
        data = bytes(range(256)) * 11
        store.put_blob(42, data)
        assert store.get_blob(42) == data

    def test_missing_blob(self, store):
        with pytest.raises(NotFound):
            store.get_blob(404)

    def test_overwrite(self, store):
        store.put_blob(1, b"old")
        store.put_blob(1, b"new")
        assert store.get_blob(1) == b"new"


class TestFeedback:
    def test_recorded_per_prescriber(self, store):
        doc = store.add_user("doc", "h", "prescriber", "D")
        disp = store.add_user("ph", "h", "dispenser", "P")
        pat = store.add_patient("X", "1980-01-01")
        r = store.add_record(pat.id, doc.id, "2026-08-19")
        store.add_feedback(r.id, doc.id, disp.id, "2026-08-19T10:00:00")
        events = store.feedback_for_prescriber(doc.id)
        assert len(events) == 1
        assert events[0].record_id == r.id
        assert events[0].dispenser_id == disp.id
