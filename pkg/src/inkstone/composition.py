"""Calligraphic page composition.

Captions become columns of glyph boxes laid out in traditional vertical
flow: columns fill top to bottom and advance right to left. Chinese
characters come first, then the English text rotated a quarter turn, with
word spaces occupying blank slots so the flow never rearranges.

The page's capacity is fixed by the configuration alone: the column count
is chosen for the worst-case gap draw, so every seed yields the same grid
and the archive fills pages at one exact, predictable count. Randomness
(seeded) only moves the columns around inside the reserved width: columns
cluster into groups with a tight gap inside a group and a wider drawn gap
between groups, and whatever width the draw leaves unused pads the left
margin.

Rendering produces a raster page and an SVG string with identical
geometry. Each slot carries an invisible ``glyph-box`` rectangle in the
SVG so the layout stays machine-readable.
"""

from __future__ import annotations

import base64
import io
import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import quoteattr

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .caption import BilingualCaption
from .config import LayoutConfig, RenderConfig
from .glyphs import GlyphSource, VectorStroke, placeholder_strokes
from .rng import SplitMix64
from .trajectory import BoundingBox


class PageOverflowError(ValueError):
    """More boxes than the page has remaining slots."""


class RenderError(RuntimeError):
    """Page rendering failed (bad dimensions or an unusable glyph source)."""


def character_ratio(box: BoundingBox, lo: float = 0.6, hi: float = 1.6) -> float:
    """Movement bounding box turned into a glyph aspect ratio, clamped.

    Degenerate boxes (points and straight lines along an axis) read as 1.
    """
    if box.width <= 0.0 or box.height <= 0.0:
        return 1.0
    return min(hi, max(lo, box.width / box.height))


@dataclass(frozen=True)
class GlyphBox:
    """One character sized for a cell, before placement."""

    ch: str
    width: float
    height: float
    lang: str  # "zh", "en", or "space"
    placeholder: bool = False


def compose_characters(caption: BilingualCaption) -> list[tuple[str, str]]:
    """Flatten a caption into (character, lang) slots, Chinese first."""
    slots: list[tuple[str, str]] = [(ch, "zh") for ch in caption.zh]
    for ch in caption.en:
        slots.append((ch, "space") if ch.isspace() else (ch, "en"))
    return slots


def make_boxes(
    caption: BilingualCaption,
    aspect: float,
    cfg: LayoutConfig,
    source: GlyphSource | None = None,
) -> list[GlyphBox]:
    """Size one glyph box per caption character from the movement aspect.

    Wide movements make wide characters and tall movements make tall ones:
    the box keeps the clamped aspect while staying inside its square cell.
    """
    a = min(cfg.ratio_max, max(cfg.ratio_min, aspect))
    w = cfg.cell * min(1.0, a)
    h = cfg.cell * min(1.0 / a, 1.0)
    boxes: list[GlyphBox] = []
    for ch, lang in compose_characters(caption):
        missing = lang != "space" and source is not None and not source.covers(ch)
        boxes.append(GlyphBox(ch, w, h, lang, placeholder=missing))
    return boxes


@dataclass(frozen=True)
class PageGrid:
    """Seed-independent page capacity."""

    columns: int
    rows: int

    @property
    def capacity(self) -> int:
        return self.columns * self.rows


def _worst_gap_total(n: int, cfg: LayoutConfig) -> float:
    """Largest total gap width n columns can need over all group draws."""
    if n <= 1:
        return 0.0
    inter = math.ceil(n / cfg.group_min) - 1
    intra = (n - 1) - inter
    return inter * cfg.gap_max + intra * cfg.gap_intra


def build_grid(cfg: LayoutConfig) -> PageGrid:
    """Fix the column count at the worst-case fit so capacity never varies."""
    usable_w = cfg.page_width - 2 * cfg.margin
    usable_h = cfg.page_height - 2 * cfg.margin
    rows = int(math.floor((usable_h + cfg.gap_intra) / (cfg.cell + cfg.gap_intra)))
    columns = 0
    n = 1
    while n * cfg.cell + _worst_gap_total(n, cfg) <= usable_w:
        columns = n
        n += 1
    if columns < 1 or rows < 1:
        raise RenderError("page cannot fit a single cell inside its margins")
    return PageGrid(columns=columns, rows=rows)


@dataclass(frozen=True)
class PageLayout:
    """A grid plus one seeded draw of column positions.

    ``column_x`` holds the left edge of each column in flow order, which
    runs right to left; the first column hugs the right margin exactly.
    """

    cfg: LayoutConfig
    grid: PageGrid
    column_x: tuple[float, ...]
    seed: int

    def slot_origin(self, index: int) -> tuple[float, float]:
        """Top-left corner of a slot's cell. Slots fill a column top to
        bottom, then move one column leftward."""
        if not 0 <= index < self.grid.capacity:
            raise IndexError(f"slot {index} outside capacity {self.grid.capacity}")
        col, row = divmod(index, self.grid.rows)
        x = self.column_x[col]
        y = self.cfg.margin + row * (self.cfg.cell + self.cfg.gap_intra)
        return (x, y)


def layout_columns(cfg: LayoutConfig, seed: int) -> PageLayout:
    """Draw the column arrangement for one page from a seed.

    Draw order is pinned: all group sizes first, then one inter-group gap
    per boundary, so layouts replay exactly from the seed.
    """
    grid = build_grid(cfg)
    rng = SplitMix64(seed)
    n = grid.columns
    groups: list[int] = []
    total = 0
    while total < n:
        size = rng.randint(cfg.group_min, cfg.group_max)
        size = min(size, n - total)
        groups.append(size)
        total += size
    inter_gaps = [rng.uniform(cfg.gap_min, cfg.gap_max) for _ in range(len(groups) - 1)]

    gaps: list[float] = []
    boundary = 0
    group_ends = set()
    acc = 0
    for g in groups[:-1]:
        acc += g
        group_ends.add(acc - 1)
    for i in range(n - 1):
        if i in group_ends:
            gaps.append(inter_gaps[boundary])
            boundary += 1
        else:
            gaps.append(cfg.gap_intra)

    xs: list[float] = []
    x = cfg.page_width - cfg.margin - cfg.cell
    xs.append(x)
    for gap in gaps:
        x = x - gap - cfg.cell
        xs.append(x)
    return PageLayout(cfg=cfg, grid=grid, column_x=tuple(xs), seed=seed)


@dataclass(frozen=True)
class PlacedBox:
    """A glyph box centered in a specific slot."""

    box: GlyphBox
    slot: int
    x: float
    y: float


def place_boxes(layout: PageLayout, boxes: Sequence[GlyphBox], start: int = 0) -> list[PlacedBox]:
    """Assign consecutive slots from ``start``; the page must have room."""
    if start < 0:
        raise ValueError(f"negative start slot {start}")
    if start + len(boxes) > layout.grid.capacity:
        raise PageOverflowError(
            f"{len(boxes)} boxes from slot {start} exceed capacity {layout.grid.capacity}"
        )
    placed: list[PlacedBox] = []
    for offset, box in enumerate(boxes):
        slot = start + offset
        sx, sy = layout.slot_origin(slot)
        placed.append(PlacedBox(
            box=box,
            slot=slot,
            x=sx + (layout.cfg.cell - box.width) / 2.0,
            y=sy + (layout.cfg.cell - box.height) / 2.0,
        ))
    return placed


def _rotate_cw(strokes: list[VectorStroke]) -> list[VectorStroke]:
    """Quarter-turn clockwise inside the unit box: (u, v) -> (1 - v, u)."""
    return [((1.0 - y1, x1), (1.0 - y2, x2), w) for (x1, y1), (x2, y2), w in strokes]


def _glyph_strokes(source: GlyphSource, placed: PlacedBox) -> list[VectorStroke] | None:
    """Vector strokes for a placed box, rotated for English, or None when
    the source has no vector form."""
    if placed.box.placeholder:
        return placeholder_strokes()
    vector = getattr(source, "vector_strokes", None)
    if vector is None:
        return None
    strokes = vector(placed.box.ch)
    return _rotate_cw(strokes) if placed.box.lang == "en" else strokes


def _raster_glyph(source: GlyphSource, placed: PlacedBox, w_px: int, h_px: int) -> Image.Image:
    strokes = _glyph_strokes(source, placed)
    if strokes is not None:
        from .glyphs import _raster_from_strokes
        return _raster_from_strokes(strokes, w_px, h_px)
    if placed.box.lang == "en":
        return source.raster(placed.box.ch, h_px, w_px).transpose(Image.ROTATE_270)
    return source.raster(placed.box.ch, w_px, h_px)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_page(
    layout: PageLayout,
    placed: Sequence[PlacedBox],
    source: GlyphSource,
    render_cfg: RenderConfig | None = None,
    colophon: str = "",
) -> tuple[Image.Image, str]:
    """Draw one page as (raster, svg). Both share geometry exactly: the SVG
    reproduces procedural strokes as lines and embeds font glyphs as images."""
    render_cfg = render_cfg or RenderConfig()
    if render_cfg.page_px < 16:
        raise RenderError(f"page_px too small: {render_cfg.page_px}")
    cfg = layout.cfg
    scale = render_cfg.page_px / cfg.page_width
    w_px = render_cfg.page_px
    h_px = int(round(cfg.page_height * scale))

    page = np.full((h_px, w_px), 255, dtype=np.uint8)
    svg: list[str] = []
    svg.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w_px} {h_px}" '
        f'width="{w_px}" height="{h_px}">'
    )
    svg.append(f'<rect width="{w_px}" height="{h_px}" fill="#ffffff"/>')
    svg.append('<g class="page">')

    for pb in placed:
        bx = pb.x * scale
        by = pb.y * scale
        bw = pb.box.width * scale
        bh = pb.box.height * scale
        classes = "glyph-box placeholder" if pb.box.placeholder else "glyph-box"
        svg.append(
            f'<rect class="{classes}" x="{_fmt(bx)}" y="{_fmt(by)}" '
            f'width="{_fmt(bw)}" height="{_fmt(bh)}" fill="none" stroke="none" '
            f'data-slot="{pb.slot}" data-ch={quoteattr(pb.box.ch)} data-lang="{pb.box.lang}"/>'
        )
        if pb.box.lang == "space":
            continue
        gw = max(1, int(round(bw)))
        gh = max(1, int(round(bh)))
        strokes = _glyph_strokes(source, pb)
        mask = _raster_glyph(source, pb, gw, gh)
        ix = int(round(bx))
        iy = int(round(by))
        ix2 = min(w_px, ix + mask.width)
        iy2 = min(h_px, iy + mask.height)
        if ix < ix2 and iy < iy2:
            m = np.asarray(mask)[: iy2 - iy, : ix2 - ix]
            region = page[iy:iy2, ix:ix2]
            np.minimum(region, 255 - m, out=region)
        if strokes is not None:
            s = min(gw, gh)
            for (x1, y1), (x2, y2), width in strokes:
                svg.append(
                    f'<line x1="{_fmt(bx + x1 * (gw - 1))}" y1="{_fmt(by + y1 * (gh - 1))}" '
                    f'x2="{_fmt(bx + x2 * (gw - 1))}" y2="{_fmt(by + y2 * (gh - 1))}" '
                    f'stroke="#111111" stroke-width="{_fmt(max(1.0, width * s))}" '
                    f'stroke-linecap="round"/>'
                )
        else:
            rgba = Image.merge("LA", (Image.new("L", mask.size, 0), mask))
            buf = io.BytesIO()
            rgba.save(buf, format="PNG")
            uri = base64.b64encode(buf.getvalue()).decode("ascii")
            svg.append(
                f'<image x="{_fmt(bx)}" y="{_fmt(by)}" width="{mask.width}" '
                f'height="{mask.height}" href="data:image/png;base64,{uri}"/>'
            )
    svg.append("</g>")

    if colophon:
        margin_px = cfg.margin * scale
        tx = margin_px
        ty = h_px - margin_px / 2.0
        img = Image.fromarray(page, mode="L")
        draw = ImageDraw.Draw(img)
        draw.text((tx, ty - 6), colophon, fill=68, font=ImageFont.load_default())
        page = np.asarray(img)
        svg.append(
            f'<text class="colophon" x="{_fmt(tx)}" y="{_fmt(ty)}" '
            f'font-family="monospace" font-size="{_fmt(margin_px / 4.0)}" '
            f'fill="#444444">{_xml_text(colophon)}</text>'
        )

    svg.append("</svg>")
    return Image.fromarray(page, mode="L"), "\n".join(svg) + "\n"


def _xml_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
