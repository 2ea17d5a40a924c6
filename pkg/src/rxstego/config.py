"""Service configuration from a JSON file plus RX_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .ssis import StegoParams

_ENV_KEYS = {
    "RX_LISTEN_HOST": ("listen_host", str),
    "RX_LISTEN_PORT": ("listen_port", int),
    "RX_STORAGE_PATH": ("storage_path", str),
    "RX_COVERS_DIR": ("covers_dir", str),
    "RX_SESSION_TTL": ("session_ttl_seconds", float),
    "RX_AMPLITUDE": ("amplitude", int),
    "RX_CHIPS_PER_BIT": ("chips_per_bit", int),
    "RX_ECC_RATE": ("ecc_rate", int),
    "RX_CODE_DIGITS": ("code_digits", int),
}


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8470
    storage_path: str = "rxstego-data/store.db"
    covers_dir: str = "rxstego-data/covers"
    session_ttl_seconds: float = 8 * 3600
    amplitude: int = 4
    chips_per_bit: int = 64
    ecc_rate: int = 3
    code_digits: int = 13

    def stego_params(self) -> StegoParams:
        return StegoParams(
            amplitude=self.amplitude,
            chips_per_bit=self.chips_per_bit,
            ecc_rate=self.ecc_rate,
        )

    @classmethod
    def load(cls, path: str | os.PathLike | None = None, env: dict | None = None) -> "ServiceConfig":
        """File values first, then environment overrides on top."""
        values = {}
        if path is not None:
            raw = json.loads(Path(path).read_text())
            if not isinstance(raw, dict):
                raise ValueError("config file must hold a JSON object")
            fields = set(cls.__dataclass_fields__)
            unknown = set(raw) - fields
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)
        env = os.environ if env is None else env
        for env_key, (field_name, cast) in _ENV_KEYS.items():
            if env_key in env:
                values[field_name] = cast(env[env_key])
        return cls(**values)
