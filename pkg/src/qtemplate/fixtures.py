"""Letter templates and test patterns shipped with the package.

The letters A and B are rasterized from a fixed set of stroke segments on the
unit square (round caps, constant stroke width), so the same glyph renders at
any power-of-two size.  Rendered copies are shipped as PBM files; the
recommended k-space cutoffs below were chosen so that the sharp filter keeps
the stroke structure while suppressing per-pixel noise (see README).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .image_io import BinaryImage, parse_pbm, write_pbm

Segment = tuple[tuple[float, float], tuple[float, float]]

STROKE_HALF_WIDTH = 0.055

GLYPH_SEGMENTS: dict[str, list[Segment]] = {
    "A": [
        ((0.50, 0.10), (0.16, 0.90)),
        ((0.50, 0.10), (0.84, 0.90)),
        ((0.30, 0.58), (0.70, 0.58)),
    ],
    "B": [
        ((0.20, 0.10), (0.20, 0.90)),
        ((0.20, 0.10), (0.62, 0.10)),
        ((0.20, 0.50), (0.62, 0.50)),
        ((0.20, 0.90), (0.62, 0.90)),
        ((0.66, 0.14), (0.66, 0.46)),
        ((0.70, 0.54), (0.70, 0.86)),
    ],
}

# Sharp-cutoff radius (cycles per image) recommended per fixture size.  The
# glyphs' frequency content is size-invariant (strokes span ~7 cycles), so 8
# cycles keeps the stroke structure at desk scale; at 512 the grid is fine
# enough that a generous 40-cycle cutoff still suppresses 98% of white noise.
RECOMMENDED_K_MAX: dict[int, float] = {16: 6.0, 32: 8.0, 64: 8.0, 512: 40.0}

FIXTURE_SIZES = (32, 64, 512)


def _segment_distance(px: np.ndarray, py: np.ndarray, seg: Segment) -> np.ndarray:
    (x0, y0), (x1, y1) = seg
    dx, dy = x1 - x0, y1 - y0
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return np.hypot(px - x0, py - y0)
    t = np.clip(((px - x0) * dx + (py - y0) * dy) / length_sq, 0.0, 1.0)
    return np.hypot(px - (x0 + t * dx), py - (y0 + t * dy))


def render_letter(letter: str, size: int) -> BinaryImage:
    """Rasterize a glyph onto a ``size x size`` image (white strokes on black)."""
    if letter not in GLYPH_SEGMENTS:
        raise ValueError(f"unknown letter {letter!r}; have {sorted(GLYPH_SEGMENTS)}")
    centers = (np.arange(size) + 0.5) / size
    px, py = np.meshgrid(centers, centers)  # py varies along rows (y down)
    pixels = np.zeros((size, size), dtype=bool)
    for seg in GLYPH_SEGMENTS[letter]:
        pixels |= _segment_distance(px, py, seg) <= STROKE_HALF_WIDTH
    return BinaryImage(pixels)


def quadrant(size: int) -> BinaryImage:
    """Image whose upper-left quadrant is white: exactly N/4 points."""
    pixels = np.zeros((size, size), dtype=bool)
    pixels[: size // 2, : size // 2] = True
    return BinaryImage(pixels)


def fixture_names() -> list[str]:
    names = [f"{letter}_{size}" for letter in sorted(GLYPH_SEGMENTS) for size in FIXTURE_SIZES]
    names.append("quadrant_16")
    return names


def make_fixture(name: str) -> BinaryImage:
    """Regenerate a shipped fixture from its geometric definition."""
    if name == "quadrant_16":
        return quadrant(16)
    letter, _, size = name.partition("_")
    return render_letter(letter, int(size))


def fixture_path(name: str) -> Path:
    """Filesystem path of a shipped PBM fixture (without the .pbm suffix)."""
    path = resources.files("qtemplate") / "fixtures" / f"{name}.pbm"
    return Path(str(path))


def load_fixture(name: str) -> BinaryImage:
    return parse_pbm(fixture_path(name).read_bytes())


def write_fixture_files(directory: Path) -> list[Path]:
    """Render every fixture into ``directory`` (P1 up to 64 px, P4 above)."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in fixture_names():
        image = make_fixture(name)
        fmt = "P1" if image.width <= 64 else "P4"
        path = directory / f"{name}.pbm"
        path.write_bytes(write_pbm(image, fmt))
        written.append(path)
    return written
