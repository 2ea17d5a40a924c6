"""Operator command line.

Verbs: serve, admin add-user|add-drug|add-patient, embed, extract,
metrics, demo. The embed/extract verbs run the codec offline (no server),
deriving the stego key from the prescription code, so desk tests exercise
the same pipeline the service uses.

Exit codes: 0 success, 1 generic failure, 2 usage, 3 bad code, 4 capacity.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import ServiceConfig
from .covers import CoverPool
from .envelope import derive_keys
from .errors import (
    AuthenticationFailed,
    BadCode,
    BadMagic,
    CapacityExceeded,
    LengthFieldInvalid,
    MalformedCode,
    PayloadTooLarge,
    RxError,
)
from .image import image_metrics, load_gray, save_gray
from .service import hash_password
from .ssis import embed, extract
from .storage import Store

EXIT_BAD_CODE = 3
EXIT_CAPACITY = 4

DEMO_USERS = [
    ("admin", "admin123", "administrator", "Administrator"),
    ("ade", "ade123", "prescriber", "ade"),
    ("bisi", "bisi123", "dispenser", "bisi"),
]
DEMO_DRUGS = ["Paracetamol", "Amoxicillin", "Ibuprofen", "Warfarin", "Aspirin"]
DEMO_PHARMACIES = [
    ("Central Pharmacy", "1 Hospital Road"),
    ("Northside Pharmacy", "42 Market Street"),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rxstego")
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("serve", help="run the HTTP service")

    admin = sub.add_parser("admin", help="offline store administration")
    admin_sub = admin.add_subparsers(dest="admin_verb", required=True)
    add_user = admin_sub.add_parser("add-user")
    add_user.add_argument("--username", required=True)
    add_user.add_argument("--password", required=True)
    add_user.add_argument("--role", required=True, choices=["administrator", "prescriber", "dispenser"])
    add_user.add_argument("--display-name", default="")
    add_drug = admin_sub.add_parser("add-drug")
    add_drug.add_argument("--name", required=True)
    add_drug.add_argument("--interacts-with", default="", help="comma-separated drug ids")
    add_patient = admin_sub.add_parser("add-patient")
    add_patient.add_argument("--name", required=True)
    add_patient.add_argument("--date-of-birth", required=True)
    add_patient.add_argument("--allergies", default="", help="comma-separated drug ids")

    emb = sub.add_parser("embed", help="hide a payload file in a cover image")
    emb.add_argument("--cover", required=True)
    emb.add_argument("--payload", required=True)
    emb.add_argument("--code", required=True)
    emb.add_argument("--out", required=True)

    ext = sub.add_parser("extract", help="recover a payload from a stego image")
    ext.add_argument("--stego", required=True)
    ext.add_argument("--code", required=True)
    ext.add_argument("--out", required=True)

    met = sub.add_parser("metrics", help="print MSE and PSNR between two images")
    met.add_argument("--a", required=True)
    met.add_argument("--b", required=True)

    sub.add_parser("demo", help="seed demo fixtures into the store")
    return parser


def _load_config(args) -> ServiceConfig:
    return ServiceConfig.load(args.config)


def _ids(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import build_service, create_app

    config = _load_config(args)
    app = create_app(build_service(config))
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)
    return 0


def _cmd_admin(args) -> int:
    config = _load_config(args)
    store = Store(config.storage_path)
    if args.admin_verb == "add-user":
        user = store.add_user(
            args.username, hash_password(args.password), args.role,
            args.display_name or args.username,
        )
        print(f"user {user.id}: {user.username} ({user.role})")
    elif args.admin_verb == "add-drug":
        drug = store.add_drug(args.name, _ids(args.interacts_with))
        print(f"drug {drug.id}: {drug.name}")
    else:
        patient = store.add_patient(args.name, args.date_of_birth, _ids(args.allergies))
        print(f"patient {patient.id}: {patient.name}")
    return 0


def _cmd_embed(args) -> int:
    config = _load_config(args)
    cover = load_gray(args.cover)
    payload = Path(args.payload).read_bytes()
    keys = derive_keys(args.code)
    stego = embed(cover, payload, keys.stego_key, config.stego_params())
    save_gray(args.out, stego)
    print(f"embedded {len(payload)} bytes into {args.out}")
    return 0


def _cmd_extract(args) -> int:
    config = _load_config(args)
    stego = load_gray(args.stego)
    keys = derive_keys(args.code)
    payload = extract(stego, keys.stego_key, config.stego_params())
    Path(args.out).write_bytes(payload)
    print(f"extracted {len(payload)} bytes to {args.out}")
    return 0


def _cmd_metrics(args) -> int:
    metrics = image_metrics(load_gray(args.a), load_gray(args.b))
    psnr = "inf" if math.isinf(metrics["psnr"]) else f"{metrics['psnr']:.2f}"
    print(f"MSE {metrics['mse']:.2f}")
    print(f"PSNR {psnr}")
    return 0


def _cmd_demo(args) -> int:
    config = _load_config(args)
    store = Store(config.storage_path)
    if store.find_user("admin") is not None:
        print("demo fixtures already present")
        return 0
    for username, password, role, display in DEMO_USERS:
        store.add_user(username, hash_password(password), role, display)
        print(f"user: {username} / {password} ({role})")
    drug_ids = {}
    for name in DEMO_DRUGS:
        drug_ids[name] = store.add_drug(name).id
    # warfarin with aspirin is the classic interaction pair
    store.add_interaction(drug_ids["Warfarin"], drug_ids["Aspirin"])
    print(f"drugs: {', '.join(d.name for d in store.list_drugs())}")
    patient = store.add_patient("OLUWOLE OLUWOLE", "1985-03-19", [drug_ids["Amoxicillin"]])
    print(f"patient {patient.id}: {patient.name} (allergic to Amoxicillin)")
    for name, address in DEMO_PHARMACIES:
        store.add_pharmacy(name, address)
    print(f"pharmacies: {', '.join(p.name for p in store.list_pharmacies())}")
    covers = CoverPool(config.covers_dir)
    created = covers.seed_defaults()
    if created:
        print(f"covers: {len(created)} synthetic images in {config.covers_dir}")
    return 0


_HANDLERS = {
    "serve": _cmd_serve,
    "admin": _cmd_admin,
    "embed": _cmd_embed,
    "extract": _cmd_extract,
    "metrics": _cmd_metrics,
    "demo": _cmd_demo,
}

_EXIT_BY_ERROR = {
    BadCode: EXIT_BAD_CODE,
    BadMagic: EXIT_BAD_CODE,
    LengthFieldInvalid: EXIT_BAD_CODE,
    MalformedCode: EXIT_BAD_CODE,
    AuthenticationFailed: EXIT_BAD_CODE,
    CapacityExceeded: EXIT_CAPACITY,
    PayloadTooLarge: EXIT_CAPACITY,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.verb](args)
    except RxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass in type(exc).__mro__:
            if klass in _EXIT_BY_ERROR:
                return _EXIT_BY_ERROR[klass]
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
