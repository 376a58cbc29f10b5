"""Seeded procedural textures standing in for real product packaging.

Each product gets one image per face role:

    front      dense glyph-like bars and blocks (edge-rich)
    back       barcode stripes over a pale patch, a few text rows above
    side       mostly plain with a single off-center accent band
    top        near-uniform lid color (slightly lighter than bottom)
    bottom     near-uniform base color

Different texture seeds give visually distinct products while keeping the
per-role look consistent, so a learner can generalize across products.
"""
from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

TEXTURE_SIZE = 128


@dataclass(frozen=True)
class TextureAtlas:
    """Per-role uint8 RGB images, all TEXTURE_SIZE x TEXTURE_SIZE."""

    images: dict

    def image(self, role: str) -> np.ndarray:
        return self.images[role]

    def tobytes(self) -> bytes:
        return b"".join(self.images[r].tobytes() for r in sorted(self.images))


def _rgb(h, s, v):
    return np.array([round(255 * c) for c in colorsys.hsv_to_rgb(h, s, v)], dtype=np.uint8)


def _fill(color) -> np.ndarray:
    img = np.empty((TEXTURE_SIZE, TEXTURE_SIZE, 3), dtype=np.uint8)
    img[:] = color
    return img


def _front_image(rng, bg, ink, accent) -> np.ndarray:
    img = _fill(bg)
    s = TEXTURE_SIZE
    # headline block near the top
    y0 = int(rng.integers(6, 14))
    img[y0 : y0 + 18, 8 : s - 8] = accent
    img[y0 + 4 : y0 + 14, 12 : s - 12] = ink
    # rows of glyph-like bar runs
    y = y0 + 26
    while y < s - 14:
        row_h = int(rng.integers(6, 11))
        x = int(rng.integers(6, 14))
        while x < s - 10:
            w = int(rng.integers(4, 14))
            if rng.random() < 0.75:
                img[y : y + row_h, x : min(x + w, s - 6)] = ink
            x += w + int(rng.integers(3, 8))
        y += row_h + int(rng.integers(5, 10))
    # one logo-ish block, position varies per product
    bx = int(rng.integers(10, s - 42))
    by = int(rng.integers(s - 34, s - 26))
    img[by : by + 16, bx : bx + 32] = accent
    img[by + 3 : by + 13, bx + 3 : bx + 29] = bg
    return img


def _back_image(rng, bg, ink) -> np.ndarray:
    img = _fill(bg)
    s = TEXTURE_SIZE
    # a few sparse text rows on the upper half
    y = 12
    for _ in range(3):
        x = int(rng.integers(8, 20))
        while x < s - 16:
            w = int(rng.integers(6, 16))
            img[y : y + 5, x : x + w] = ink
            x += w + int(rng.integers(4, 10))
        y += int(rng.integers(12, 18))
    # barcode on a pale patch, lower half
    img[s - 52 : s - 8, 16 : s - 16] = (250, 250, 248)
    x = 22
    while x < s - 24:
        w = int(rng.integers(2, 7))
        img[s - 46 : s - 14, x : x + w] = (10, 10, 12)
        x += w + int(rng.integers(2, 6))
    return img


def _side_image(rng, bg, accent) -> np.ndarray:
    img = _fill(bg)
    s = TEXTURE_SIZE
    band_y = int(rng.integers(s // 5, s // 3))  # off-center: breaks 180-deg symmetry
    band_h = int(rng.integers(10, 18))
    img[band_y : band_y + band_h, :] = accent
    return img


def procedural_texture(spec) -> TextureAtlas:
    """Deterministic texture atlas for a product; same seed, same bytes."""
    rng = np.random.Generator(np.random.PCG64(spec.texture_seed))
    hue = float(rng.random())
    bg = _rgb(hue, 0.18, 0.92)
    accent = _rgb((hue + 0.45) % 1.0, 0.75, 0.75)
    ink = np.array([25, 22, 28], dtype=np.uint8)
    images = {
        "front": _front_image(rng, bg, ink, accent),
        "back": _back_image(rng, bg, ink),
        "side": _side_image(rng, bg, accent),
        "top": _fill(np.minimum(bg.astype(int) + 12, 255).astype(np.uint8)),
        "bottom": _fill(np.maximum(bg.astype(int) - 18, 0).astype(np.uint8)),
    }
    return TextureAtlas(images=images)
