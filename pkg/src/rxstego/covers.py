"""Cover image pool: stock grayscale PNGs assigned round-robin.

A deployment points the service at a directory of cover PNGs. An empty
directory can seed itself with synthetic smooth covers whose pixels stay
well clear of 0 and 255, so superimposing the chip field never clamps.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import NotFound
from .image import load_gray, save_gray

# keep pixels at least this far from the range edges in synthetic covers
SYNTH_MARGIN = 12
SYNTH_SIZE = (800, 800)
SYNTH_COUNT = 8
SYNTH_CELL = 32  # pixels per coarse-grid cell, so smoothness is size-independent


def synthesize_cover(seed: int, size: tuple[int, int] = SYNTH_SIZE) -> np.ndarray:
    """Deterministic smooth cover: coarse random grid upsampled bicubic.

    Bicubic interpolation overshoots the coarse values slightly, so the
    grid is drawn inside a margin and the result is clipped once more.
    """
    height, width = size
    rng = np.random.default_rng(seed)
    grid = (max(2, -(-height // SYNTH_CELL)), max(2, -(-width // SYNTH_CELL)))
    coarse = rng.uniform(SYNTH_MARGIN + 8, 255 - SYNTH_MARGIN - 8, size=grid)
    img = Image.fromarray(coarse.astype(np.float32), mode="F")
    smooth = np.asarray(img.resize((width, height), Image.BICUBIC), dtype=np.float64)
    smooth += rng.normal(0.0, 1.1, size=smooth.shape)
    return np.clip(np.rint(smooth), SYNTH_MARGIN, 255 - SYNTH_MARGIN).astype(np.uint8)


class CoverPool:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def names(self) -> list[str]:
        return sorted(p.name for p in self.directory.glob("*.png"))

    def load(self, name: str) -> np.ndarray:
        if name not in self.names():
            raise NotFound(f"no cover named {name!r} in the pool")
        return load_gray(self.directory / name)

    def assign(self, sequence: int) -> str:
        """Round-robin pick for the given creation sequence number."""
        names = self.names()
        if not names:
            raise NotFound("the cover pool is empty")
        return names[sequence % len(names)]

    def seed_defaults(self, count: int = SYNTH_COUNT, size: tuple[int, int] = SYNTH_SIZE) -> list[str]:
        """Fill an empty pool with synthetic covers; no-op if any exist."""
        if self.names():
            return []
        created = []
        for i in range(count):
            name = f"synthetic-{i + 1:02d}.png"
            save_gray(self.directory / name, synthesize_cover(seed=1000 + i, size=size))
            created.append(name)
        return created
