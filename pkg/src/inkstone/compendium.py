"""Append-only book of archived pages.

Entries (one captioned gesture each) flow into the current page slot by
slot. The moment the last slot fills, the page is archived eagerly: raster
and vector artifacts are written, then the index, and only then does the
in-memory state advance. Entries larger than a whole page are rejected;
entries that straddle the boundary split, finishing on the next page.

Durability rules: every file lands via write-to-temp-then-rename, the JSONL
index is rewritten atomically after the artifacts it references exist, and
any failure leaves the in-memory state untouched so the archive can simply
be retried. Replaying the same entry stream against the same master seed
reproduces every artifact byte for byte, because page layout seeds derive
from the master seed and page number alone and timestamps come from the
entries, not the wall clock.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .caption import BilingualCaption
from .composition import (
    GlyphBox,
    PageLayout,
    PlacedBox,
    layout_columns,
    make_boxes,
    place_boxes,
    render_page,
)
from .config import LayoutConfig, RenderConfig
from .glyphs import GlyphSource, ProceduralGlyphSource
from .rng import SplitMix64


class ArchiveError(RuntimeError):
    """Archiving a page failed; the book's state did not advance."""


class EntryTooLargeError(ValueError):
    """An entry has more glyph boxes than a whole page has slots."""

    def __init__(self, boxes: int, capacity: int) -> None:
        super().__init__(f"entry needs {boxes} slots but a page has {capacity}")
        self.boxes = boxes
        self.capacity = capacity


def seed_for_page(master: int, page_id: int) -> int:
    """Per-page layout seed: the (page_id + 1)-th draw of the master stream."""
    rng = SplitMix64(master)
    for _ in range(page_id):
        rng.next_u64()
    return rng.next_u64()


def _write_bytes(path: Path, data: bytes) -> None:
    """Write via a sibling temp file and an atomic rename."""
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


@dataclass(frozen=True)
class PageRecord:
    """One archived page as stored in the index."""

    page_id: int
    seed: int
    created: float
    archived: float
    contributors: tuple[str, ...]
    image_file: str
    vector_file: str
    hash: str

    def to_json(self) -> dict:
        return {
            "page_id": self.page_id,
            "seed": self.seed,
            "created": self.created,
            "archived": self.archived,
            "contributors": list(self.contributors),
            "image_file": self.image_file,
            "vector_file": self.vector_file,
            "hash": self.hash,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PageRecord":
        return cls(
            page_id=int(obj["page_id"]),
            seed=int(obj["seed"]),
            created=float(obj["created"]),
            archived=float(obj["archived"]),
            contributors=tuple(obj["contributors"]),
            image_file=str(obj["image_file"]),
            vector_file=str(obj["vector_file"]),
            hash=str(obj["hash"]),
        )


@dataclass(frozen=True)
class BookEntry:
    """One captioned gesture submitted to the book."""

    contributor: str
    caption: BilingualCaption
    aspect: float
    t: float


@dataclass(frozen=True)
class EntryPlacement:
    """Where (part of) an entry landed: slots [slot_lo, slot_hi) on a page."""

    page_id: int
    slot_lo: int
    slot_hi: int


@dataclass
class SubmitResult:
    placements: list[EntryPlacement] = field(default_factory=list)
    archived: list[PageRecord] = field(default_factory=list)


class Book:
    """The archive: an index of page records plus the page being filled."""

    def __init__(
        self,
        root: str | Path,
        layout_cfg: LayoutConfig | None = None,
        render_cfg: RenderConfig | None = None,
        source: GlyphSource | None = None,
        master_seed: int = 1,
    ) -> None:
        self.root = Path(root)
        self.pages_dir = self.root / "pages"
        self.index_path = self.root / "index.jsonl"
        self.layout_cfg = layout_cfg or LayoutConfig()
        self.render_cfg = render_cfg or RenderConfig()
        self.source = source or ProceduralGlyphSource()
        self.master_seed = master_seed
        self.pages_dir.mkdir(parents=True, exist_ok=True)
        self._records: list[PageRecord] = self._load_index()
        self._begin_page(len(self._records))

    def _load_index(self) -> list[PageRecord]:
        if not self.index_path.is_file():
            return []
        records = []
        for line in self.index_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                records.append(PageRecord.from_json(json.loads(line)))
        return records

    def _begin_page(self, page_id: int) -> None:
        self._page_id = page_id
        self._layout: PageLayout = layout_columns(
            self.layout_cfg, seed_for_page(self.master_seed, page_id)
        )
        self._placed: list[PlacedBox] = []
        self._page_contributors: list[str] = []
        self._page_times: list[float] = []

    @property
    def capacity(self) -> int:
        return self._layout.grid.capacity

    @property
    def filled(self) -> int:
        return len(self._placed)

    @property
    def current_page_id(self) -> int:
        return self._page_id

    def submit_entry(self, entry: BookEntry) -> SubmitResult:
        """Place an entry, archiving each page the moment it fills.

        If the archive write fails mid-entry, every in-memory effect of this
        submission is undone before the error propagates, so a retry replays
        the whole entry without duplicating its first chunk. At most one
        page can fill per entry (entries never exceed one page), so a failed
        archive implies no page was archived for this entry at all.
        """
        boxes = make_boxes(entry.caption, entry.aspect, self.layout_cfg, self.source)
        if len(boxes) > self.capacity:
            raise EntryTooLargeError(len(boxes), self.capacity)
        if not boxes:
            return SubmitResult()
        snapshot = (
            list(self._placed),
            list(self._page_contributors),
            list(self._page_times),
        )
        result = SubmitResult()
        remaining: Sequence[GlyphBox] = boxes
        try:
            while remaining:
                free = self.capacity - self.filled
                chunk = remaining[:free]
                remaining = remaining[free:]
                start = self.filled
                self._placed.extend(place_boxes(self._layout, chunk, start=start))
                if entry.contributor not in self._page_contributors:
                    self._page_contributors.append(entry.contributor)
                self._page_times.append(entry.t)
                result.placements.append(
                    EntryPlacement(self._page_id, start, start + len(chunk))
                )
                if self.filled == self.capacity:
                    result.archived.append(self.archive_page())
        except ArchiveError:
            self._placed, self._page_contributors, self._page_times = snapshot
            raise
        return result

    def archive_page(self) -> PageRecord:
        """Render and persist the current page, then start the next one.

        Artifacts first, index second, state last; on any failure the book
        is left exactly as before the call.
        """
        if not self._placed:
            raise ArchiveError("refusing to archive an empty page")
        page_id = self._page_id
        colophon = f"leaf {page_id + 1} . {len(self._placed)} marks"
        image, svg = render_page(
            self._layout, self._placed, self.source, self.render_cfg, colophon
        )
        buf = io.BytesIO()
        image.save(buf, format="PNG")
        png_bytes = buf.getvalue()
        svg_bytes = svg.encode("utf-8")
        digest = hashlib.sha256(png_bytes + svg_bytes).hexdigest()
        image_file = f"pages/page-{page_id:05d}.png"
        vector_file = f"pages/page-{page_id:05d}.svg"
        record = PageRecord(
            page_id=page_id,
            seed=self._layout.seed,
            created=min(self._page_times),
            archived=max(self._page_times),
            contributors=tuple(self._page_contributors),
            image_file=image_file,
            vector_file=vector_file,
            hash=digest,
        )
        try:
            _write_bytes(self.root / image_file, png_bytes)
            _write_bytes(self.root / vector_file, svg_bytes)
            index_lines = "".join(
                json.dumps(r.to_json(), separators=(",", ":")) + "\n"
                for r in [*self._records, record]
            )
            _write_bytes(self.index_path, index_lines.encode("utf-8"))
        except OSError as exc:
            raise ArchiveError(f"failed to persist page {page_id}: {exc}") from exc
        self._records.append(record)
        self._begin_page(page_id + 1)
        return record

    def list_pages(self, lo: int = 0, hi: int | None = None) -> list[PageRecord]:
        """Records for archived pages lo..hi (half-open page_id range)."""
        if hi is None:
            hi = len(self._records)
        return [r for r in self._records if lo <= r.page_id < hi]

    def page_record(self, page_id: int) -> PageRecord | None:
        if 0 <= page_id < len(self._records):
            return self._records[page_id]
        return None

    def state_summary(self) -> dict:
        return {
            "page_id": self._page_id,
            "filled": self.filled,
            "capacity": self.capacity,
            "pages_archived": len(self._records),
            "contributors": list(self._page_contributors),
        }
