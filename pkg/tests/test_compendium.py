import json

import pytest

import inkstone.compendium as compendium
from inkstone.caption import BilingualCaption, Provider
from inkstone.compendium import (
    ArchiveError,
    Book,
    BookEntry,
    EntryTooLargeError,
    PageRecord,
    seed_for_page,
)
from inkstone.config import LayoutConfig, RenderConfig
from inkstone.rng import SplitMix64

RENDER = RenderConfig(page_px=120)  # keep page rendering cheap in tests


def _entry(i: int, zh="墨弧", en="ink arc", who="alice") -> BookEntry:
    return BookEntry(
        contributor=who,
        caption=BilingualCaption(en, zh, Provider.OFFLINE),
        aspect=1.0,
        t=float(i),
    )


def _boxes_per_entry(entry: BookEntry) -> int:
    return len(entry.caption.zh) + len(entry.caption.en)


def test_seed_for_page_skips_master_stream():
    master = 2024
    rng = SplitMix64(master)
    draws = [rng.next_u64() for _ in range(10)]
    for page_id in range(10):
        assert seed_for_page(master, page_id) == draws[page_id]


def test_submission_and_eager_archive(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=9)
    cap = book.capacity
    per = _boxes_per_entry(_entry(0))  # 9 boxes
    assert cap == 78 and per == 9

    archived = []
    for i in range(8):  # 72 boxes: page not yet full
        res = book.submit_entry(_entry(i))
        archived += res.archived
    assert archived == [] and book.filled == 72

    res = book.submit_entry(_entry(8))  # 81st box crosses the boundary
    assert len(res.archived) == 1
    rec = res.archived[0]
    assert rec.page_id == 0
    # the straddling entry split: 6 boxes finish page 0, 3 open page 1
    assert [(p.page_id, p.slot_lo, p.slot_hi) for p in res.placements] == [
        (0, 72, 78), (1, 0, 3)
    ]
    assert book.filled == 3 and book.current_page_id == 1
    assert (tmp_path / rec.image_file).is_file()
    assert (tmp_path / rec.vector_file).is_file()


def test_record_times_and_contributors(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=9)
    names = ["wu", "ana", "wu", "kim", "ana", "wu", "kim", "ana", "wu"]
    rec = None
    for i, who in enumerate(names):
        res = book.submit_entry(_entry(i, who=who))
        if res.archived:
            rec = res.archived[0]
            break
    assert rec is not None
    assert rec.created == 0.0
    assert rec.archived == float(i)
    assert rec.contributors == ("wu", "ana", "kim")  # first-seen order, unique


def test_entry_too_large(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=9)
    huge = BookEntry(
        contributor="x",
        caption=BilingualCaption("y" * 79, "墨", Provider.OFFLINE),
        aspect=1.0,
        t=0.0,
    )
    with pytest.raises(EntryTooLargeError) as err:
        book.submit_entry(huge)
    assert err.value.boxes == 80 and err.value.capacity == 78
    assert book.filled == 0  # nothing placed


def test_replay_is_identical(tmp_path):
    def run(root):
        book = Book(root, render_cfg=RENDER, master_seed=31337)
        rng = SplitMix64(8)
        records = []
        for i in range(40):
            zh = "墨" * rng.randint(1, 6)
            en = "x" * rng.randint(0, 12)
            res = book.submit_entry(_entry(i, zh=zh, en=en, who=f"p{i % 4}"))
            records += res.archived
        return records

    a = run(tmp_path / "a")
    b = run(tmp_path / "b")
    assert len(a) >= 2
    assert [r.hash for r in a] == [r.hash for r in b]
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    for rec in a:
        png_a = (tmp_path / "a" / rec.image_file).read_bytes()
        png_b = (tmp_path / "b" / rec.image_file).read_bytes()
        assert png_a == png_b


def test_master_seed_changes_layout(tmp_path):
    filler = [_entry(i) for i in range(9)]

    def first_svg(root, master):
        book = Book(root, render_cfg=RENDER, master_seed=master)
        for e in filler:
            res = book.submit_entry(e)
            if res.archived:
                return (root / res.archived[0].vector_file).read_text()
        raise AssertionError("page never filled")

    assert first_svg(tmp_path / "m1", 1) != first_svg(tmp_path / "m2", 2)


def test_index_roundtrip_and_reopen(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=5)
    for i in range(10):
        book.submit_entry(_entry(i))
    archived_before = len(book.list_pages())
    assert archived_before == 1
    filled_before = book.filled

    reopened = Book(tmp_path, render_cfg=RENDER, master_seed=5)
    assert len(reopened.list_pages()) == 1
    assert reopened.current_page_id == 1
    assert reopened.list_pages()[0] == book.list_pages()[0]
    # unarchived slots do not survive a restart; the page restarts clean
    assert reopened.filled == 0 and filled_before > 0

    raw = (tmp_path / "index.jsonl").read_text().splitlines()
    assert len(raw) == 1
    assert PageRecord.from_json(json.loads(raw[0])) == book.list_pages()[0]


def test_list_pages_ranges(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=5)
    i = 0
    while len(book.list_pages()) < 3:
        book.submit_entry(_entry(i))
        i += 1
    assert [r.page_id for r in book.list_pages()] == [0, 1, 2]
    assert [r.page_id for r in book.list_pages(1)] == [1, 2]
    assert [r.page_id for r in book.list_pages(1, 2)] == [1]
    assert book.page_record(2) is not None
    assert book.page_record(99) is None


def test_empty_page_never_archives(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=5)
    with pytest.raises(ArchiveError):
        book.archive_page()


def test_state_summary(tmp_path):
    book = Book(tmp_path, render_cfg=RENDER, master_seed=5)
    book.submit_entry(_entry(0))
    s = book.state_summary()
    assert s == {
        "page_id": 0,
        "filled": 9,
        "capacity": 78,
        "pages_archived": 0,
        "contributors": ["alice"],
    }


class TestFaultInjection:
    def _fill_to_brink(self, book):
        for i in range(8):
            book.submit_entry(_entry(i))
        assert book.filled == 72

    def test_artifact_write_failure_rolls_back(self, tmp_path, monkeypatch):
        book = Book(tmp_path, render_cfg=RENDER, master_seed=77)
        self._fill_to_brink(book)

        real_write = compendium._write_bytes

        def failing_write(path, data):
            if path.suffix == ".png":
                raise OSError("disk full")
            real_write(path, data)

        monkeypatch.setattr(compendium, "_write_bytes", failing_write)
        with pytest.raises(ArchiveError):
            book.submit_entry(_entry(8))
        # state untouched: the failing submission placed nothing durable
        assert book.current_page_id == 0
        assert book.list_pages() == []
        assert not (tmp_path / "index.jsonl").exists()

        monkeypatch.setattr(compendium, "_write_bytes", real_write)
        res = book.submit_entry(_entry(8))
        assert len(res.archived) == 1
        assert len(book.list_pages()) == 1

    def test_index_write_failure_keeps_index_consistent(self, tmp_path, monkeypatch):
        book = Book(tmp_path, render_cfg=RENDER, master_seed=77)
        self._fill_to_brink(book)

        real_write = compendium._write_bytes

        def failing_write(path, data):
            if path.name == "index.jsonl":
                raise OSError("power cut")
            real_write(path, data)

        monkeypatch.setattr(compendium, "_write_bytes", failing_write)
        with pytest.raises(ArchiveError):
            book.submit_entry(_entry(8))
        # artifacts may exist as orphans, but the index never references a
        # page whose archive did not complete
        assert not (tmp_path / "index.jsonl").exists()
        assert book.list_pages() == []
        assert book.current_page_id == 0

        monkeypatch.setattr(compendium, "_write_bytes", real_write)
        res = book.submit_entry(_entry(8))
        assert [r.page_id for r in res.archived] == [0]
        lines = (tmp_path / "index.jsonl").read_text().splitlines()
        assert len(lines) == 1

    def test_no_temp_files_survive(self, tmp_path):
        book = Book(tmp_path, render_cfg=RENDER, master_seed=77)
        for i in range(20):
            book.submit_entry(_entry(i))
        assert len(book.list_pages()) >= 2
        leftovers = list(tmp_path.rglob("*.tmp"))
        assert leftovers == []
