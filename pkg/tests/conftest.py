"""Shared fixtures: the image corpus and a small workflow stack factory."""

import numpy as np
import pytest
from PIL import Image
from skimage import data

from rxstego.covers import CoverPool, synthesize_cover
from rxstego.service import PrescriptionService, SessionTable, hash_password
from rxstego.ssis import StegoParams
from rxstego.storage import Store

# Standard scikit-image test images prepared as 512x512 8-bit grayscale.
# Chosen by measuring raw chip-level error rates at default params: these
# come back error-free with wide margin. Heavily textured classics
# (camera's grass, coffee) exceed what rate-3 repetition can always fix
# at amplitude 4, so they are deliberately not in the corpus.
CORPUS_NAMES = [
    "moon",
    "chelsea",
    "clock",
    "text",
    "cell",
    "brick",
    "shepp_logan_phantom",
]


def _to_512_gray(arr: np.ndarray) -> np.ndarray:
    img = Image.fromarray(arr)
    if img.mode != "L":
        img = img.convert("L")
    if img.size != (512, 512):
        img = img.resize((512, 512), Image.LANCZOS)
    return np.asarray(img)


@pytest.fixture(scope="session")
def corpus() -> dict[str, np.ndarray]:
    return {name: _to_512_gray(getattr(data, name)()) for name in CORPUS_NAMES}


# Workflow tests run on smaller covers with a lower chip rate so each
# embed/extract costs milliseconds; capacity still fits a sealed
# prescription comfortably.
WORKFLOW_PARAMS = StegoParams(amplitude=4, chips_per_bit=8, ecc_rate=3)
WORKFLOW_COVER_SIZE = (192, 192)


@pytest.fixture()
def stack(tmp_path):
    """Fresh (store, covers, service) triple on a temp directory."""
    store = Store(tmp_path / "store.db", tmp_path / "blobs")
    covers = CoverPool(tmp_path / "covers")
    covers.seed_defaults(count=2, size=WORKFLOW_COVER_SIZE)
    service = PrescriptionService(
        store, covers, params=WORKFLOW_PARAMS, sessions=SessionTable()
    )
    return store, covers, service


@pytest.fixture()
def seeded(stack):
    """Stack plus one user per role and basic clinical fixtures."""
    store, covers, service = stack
    store.add_user("root", hash_password("rootpw"), "administrator", "Root")
    store.add_user("ade", hash_password("adepw"), "prescriber", "ade")
    store.add_user("bisi", hash_password("bisipw"), "dispenser", "bisi")
    amox = store.add_drug("Amoxicillin")
    para = store.add_drug("Paracetamol")
    warf = store.add_drug("Warfarin")
    aspi = store.add_drug("Aspirin", [warf.id])
    patient = store.add_patient("OLUWOLE OLUWOLE", "1985-03-19", [amox.id])
    store.add_pharmacy("Central Pharmacy", "1 Hospital Road")
    fixtures = {
        "amoxicillin": amox,
        "paracetamol": para,
        "warfarin": warf,
        "aspirin": aspi,
        "patient": patient,
    }
    return store, covers, service, fixtures
