"""Glyph rendering for page composition.

A glyph source turns one character into an ink mask at a requested pixel
size ('L' image, 255 = ink). The procedural source needs no font files: it
derives a small deterministic arrangement of strokes from the codepoint, so
pages render identically on any machine. It also exposes those strokes as
vectors, which keeps the SVG export geometrically identical to the raster.
A TrueType-backed source can be swapped in when a real font is available;
characters the font lacks fall back to a hollow placeholder box.
"""

from __future__ import annotations

import logging
from typing import Protocol

from PIL import Image, ImageDraw, ImageFont

from .rng import SplitMix64, mix64

log = logging.getLogger(__name__)

# ((x1, y1), (x2, y2), width), all in [0, 1] glyph coordinates
VectorStroke = tuple[tuple[float, float], tuple[float, float], float]


class GlyphSource(Protocol):
    def covers(self, ch: str) -> bool:
        """Whether this source can draw the character."""
        ...

    def raster(self, ch: str, w_px: int, h_px: int) -> Image.Image:
        """Ink mask for the character: mode 'L', 255 where ink lands."""
        ...


def _is_cjk(cp: int) -> bool:
    return (
        0x2E80 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0xF900 <= cp <= 0xFAFF
        or 0x20000 <= cp <= 0x2A6DF
    )


def placeholder_strokes() -> list[VectorStroke]:
    """Hollow box drawn for characters nothing can render."""
    lo, hi, w = 0.12, 0.88, 0.06
    return [
        ((lo, lo), (hi, lo), w),
        ((hi, lo), (hi, hi), w),
        ((hi, hi), (lo, hi), w),
        ((lo, hi), (lo, lo), w),
    ]


def _raster_from_strokes(strokes: list[VectorStroke], w_px: int, h_px: int) -> Image.Image:
    img = Image.new("L", (max(1, w_px), max(1, h_px)), 0)
    draw = ImageDraw.Draw(img)
    scale = min(w_px, h_px)
    for (x1, y1), (x2, y2), width in strokes:
        draw.line(
            [(x1 * (w_px - 1), y1 * (h_px - 1)), (x2 * (w_px - 1), y2 * (h_px - 1))],
            fill=255,
            width=max(1, round(width * scale)),
        )
    return img


class ProceduralGlyphSource:
    """Deterministic stroke marks standing in for real characters.

    Each codepoint maps to a fixed set of line strokes inside the unit box.
    CJK codepoints get denser marks than Latin ones, so the two scripts
    keep distinct visual weight on a page.
    """

    def covers(self, ch: str) -> bool:
        return len(ch) == 1 and not ch.isspace()

    def vector_strokes(self, ch: str) -> list[VectorStroke]:
        if not self.covers(ch):
            return []
        cp = ord(ch)
        rng = SplitMix64(mix64(cp ^ 0x1B5D))
        count = 5 + rng.randint(0, 3) if _is_cjk(cp) else 2 + rng.randint(0, 2)
        strokes: list[VectorStroke] = []
        for _ in range(count):
            x1 = rng.uniform(0.1, 0.9)
            y1 = rng.uniform(0.1, 0.9)
            x2 = rng.uniform(0.1, 0.9)
            y2 = rng.uniform(0.1, 0.9)
            width = rng.uniform(0.06, 0.14)
            strokes.append(((x1, y1), (x2, y2), width))
        return strokes

    def raster(self, ch: str, w_px: int, h_px: int) -> Image.Image:
        strokes = self.vector_strokes(ch)
        if not strokes:
            return Image.new("L", (max(1, w_px), max(1, h_px)), 0)
        return _raster_from_strokes(strokes, w_px, h_px)


class FontGlyphSource:
    """Glyphs from a TrueType/OpenType font, resized to the requested box."""

    def __init__(self, path: str, base_size: int = 96) -> None:
        self._font = ImageFont.truetype(path, base_size)
        self._base = base_size
        self._missing: set[str] = set()

    def covers(self, ch: str) -> bool:
        if len(ch) != 1 or ch.isspace():
            return False
        mask = self._font.getmask(ch, mode="L")
        if mask.size[0] == 0 or mask.size[1] == 0:
            return False
        return mask.getbbox() is not None

    def raster(self, ch: str, w_px: int, h_px: int) -> Image.Image:
        if not self.covers(ch):
            if ch not in self._missing:
                self._missing.add(ch)
                log.warning("font lacks glyph for %r; drawing placeholder", ch)
            return _raster_from_strokes(placeholder_strokes(), w_px, h_px)
        pad = self._base // 4
        canvas = Image.new("L", (self._base + 2 * pad, self._base + 2 * pad), 0)
        ImageDraw.Draw(canvas).text((pad, pad), ch, font=self._font, fill=255)
        box = canvas.getbbox()
        if box is None:
            return _raster_from_strokes(placeholder_strokes(), w_px, h_px)
        glyph = canvas.crop(box)
        return glyph.resize((max(1, w_px), max(1, h_px)), Image.LANCZOS)
