from pathlib import Path

import numpy as np
import pytest

from inkstone.glyphs import (
    FontGlyphSource,
    ProceduralGlyphSource,
    _raster_from_strokes,
    placeholder_strokes,
)

FONT_CANDIDATES = [
    "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
    "/usr/share/fonts/truetype/liberation/LiberationSans-Regular.ttf",
    "/usr/share/fonts/TTF/DejaVuSans.ttf",
]


def _find_font() -> str | None:
    for p in FONT_CANDIDATES:
        if Path(p).is_file():
            return p
    matches = list(Path("/usr/share/fonts").rglob("*.ttf")) if Path("/usr/share/fonts").is_dir() else []
    return str(matches[0]) if matches else None


class TestProceduralSource:
    def test_coverage(self):
        src = ProceduralGlyphSource()
        assert src.covers("永") and src.covers("A") and src.covers("ß")
        assert not src.covers(" ")
        assert not src.covers("\t")
        assert not src.covers("ab")

    def test_deterministic_per_character(self):
        a = ProceduralGlyphSource().vector_strokes("永")
        b = ProceduralGlyphSource().vector_strokes("永")
        assert a == b
        assert a != ProceduralGlyphSource().vector_strokes("水")

    def test_strokes_inside_unit_box(self):
        src = ProceduralGlyphSource()
        for ch in "漢字abcXYZ09":
            for (x1, y1), (x2, y2), w in src.vector_strokes(ch):
                assert 0.0 <= x1 <= 1.0 and 0.0 <= y1 <= 1.0
                assert 0.0 <= x2 <= 1.0 and 0.0 <= y2 <= 1.0
                assert 0.0 < w < 0.2

    def test_cjk_denser_than_latin(self):
        src = ProceduralGlyphSource()
        cjk = [len(src.vector_strokes(ch)) for ch in "永水火山月日中国字书"]
        latin = [len(src.vector_strokes(ch)) for ch in "abcdefghij"]
        assert min(cjk) >= 5
        assert max(latin) <= 4

    def test_raster_has_ink(self):
        src = ProceduralGlyphSource()
        img = src.raster("永", 32, 32)
        assert img.size == (32, 32) and img.mode == "L"
        arr = np.asarray(img)
        assert arr.max() == 255 and (arr > 0).sum() > 10

    def test_raster_matches_vectors(self):
        src = ProceduralGlyphSource()
        direct = _raster_from_strokes(src.vector_strokes("R"), 24, 24)
        assert np.array_equal(np.asarray(src.raster("R", 24, 24)), np.asarray(direct))

    def test_nonsquare_raster(self):
        img = ProceduralGlyphSource().raster("木", 12, 40)
        assert img.size == (12, 40)


def test_placeholder_is_closed_box():
    strokes = placeholder_strokes()
    assert len(strokes) == 4
    starts = [s[0] for s in strokes]
    ends = [s[1] for s in strokes]
    assert ends[-1] == starts[0]  # ring closes
    img = _raster_from_strokes(strokes, 20, 20)
    arr = np.asarray(img)
    column = arr[:, 10]
    marks = np.where(column > 0)[0]
    assert len(marks) >= 2 and marks[0] < 5 and marks[-1] > 14  # top and bottom edges
    assert arr[10, 10] == 0  # hollow middle


class TestFontSource:
    def test_renders_from_real_font(self):
        font_path = _find_font()
        if font_path is None:
            pytest.skip("no TrueType font installed")
        src = FontGlyphSource(font_path)
        assert src.covers("A")
        img = src.raster("A", 30, 44)
        assert img.size == (30, 44)
        assert np.asarray(img).max() > 0

    def test_missing_glyph_gets_placeholder(self):
        font_path = _find_font()
        if font_path is None:
            pytest.skip("no TrueType font installed")
        src = FontGlyphSource(font_path)
        missing = "\U0001F9FF"  # unlikely to exist in a text font
        if src.covers(missing):
            pytest.skip("font surprisingly covers the probe character")
        img = src.raster(missing, 20, 20)
        expected = _raster_from_strokes(placeholder_strokes(), 20, 20)
        assert np.array_equal(np.asarray(img), np.asarray(expected))

    def test_bad_path(self):
        with pytest.raises(OSError):
            FontGlyphSource("/nonexistent/font.ttf")
