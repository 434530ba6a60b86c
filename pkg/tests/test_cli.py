"""End-to-end checks for the command line: record, simulate, sweep, exit codes.

Everything runs in-process through main() for speed; the acceptance suite
exercises the same pipeline through a real subprocess.
"""

from __future__ import annotations

import json

import pytest

from inkstone.cli import build_parser, main
from inkstone.composition import character_ratio
from inkstone.trajectory import (
    GesturePhase,
    bounding_box,
    gestures_from_records,
    read_records,
)

EXPECTED_HEADER = "alpha,beta,stable,steps,t_min,t_max,mass_initial,mass_final,max_step_drift"


def _record(tmp_path, name, *extra):
    out = tmp_path / name
    rc = main(["record", "-o", str(out), *extra])
    assert rc == 0
    return out


class TestRecord:
    def test_same_seed_same_bytes(self, tmp_path):
        a = _record(tmp_path, "a.jsonl", "--seed", "9")
        b = _record(tmp_path, "b.jsonl", "--seed", "9")
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a = _record(tmp_path, "a.jsonl", "--seed", "1")
        b = _record(tmp_path, "b.jsonl", "--seed", "2")
        assert a.read_bytes() != b.read_bytes()

    def test_gesture_count_and_idle_separators(self, tmp_path):
        out = _record(tmp_path, "r.jsonl", "--gestures", "3", "--seconds", "1")
        records = read_records(out)
        idle = [r for r in records if r.gesture is GesturePhase.IDLE]
        # two separators between three gestures, three idle records each
        assert len(idle) == 6
        assert len(gestures_from_records(records)) == 3

    def test_square_pattern_has_unit_aspect_exactly(self, tmp_path):
        out = _record(tmp_path, "sq.jsonl", "--pattern", "square", "--gestures", "2")
        for traj in gestures_from_records(read_records(out)):
            box = bounding_box(traj.positions())
            assert box.width == box.height
            assert character_ratio(box) == 1.0

    def test_timestamps_strictly_increase(self, tmp_path):
        out = _record(tmp_path, "r.jsonl", "--rate", "20")
        ts = [r.t for r in read_records(out)]
        assert all(b > a for a, b in zip(ts, ts[1:]))


class TestSimulate:
    @pytest.fixture()
    def small_cfg(self, tmp_path):
        p = tmp_path / "small.cfg"
        p.write_text("render.page_px = 120\n", encoding="utf-8")
        return p

    def test_pipeline_archives_pages(self, tmp_path, small_cfg, capsys):
        rec = _record(tmp_path, "r.jsonl", "--gestures", "4", "--seconds", "1")
        capsys.readouterr()
        rc = main([
            "simulate", str(rec), "--book-dir", str(tmp_path / "book"),
            "--config", str(small_cfg), "--contributor", "mira",
        ])
        out = capsys.readouterr().out
        assert rc == 0
        assert "4 gestures" in out
        assert "archived page 0:" in out
        index = (tmp_path / "book" / "index.jsonl").read_text(encoding="utf-8")
        first = json.loads(index.splitlines()[0])
        assert first["page_id"] == 0
        assert first["contributors"] == ["mira"]
        assert (tmp_path / "book" / first["image_file"]).exists()
        assert (tmp_path / "book" / first["vector_file"]).exists()

    def test_rerun_is_byte_identical(self, tmp_path, small_cfg):
        rec = _record(tmp_path, "r.jsonl", "--gestures", "4", "--seconds", "1")
        dirs = []
        for name in ("book1", "book2"):
            assert main([
                "simulate", str(rec), "--book-dir", str(tmp_path / name),
                "--config", str(small_cfg),
            ]) == 0
            dirs.append(tmp_path / name)
        a, b = dirs
        assert (a / "index.jsonl").read_bytes() == (b / "index.jsonl").read_bytes()
        for png in sorted((a / "pages").glob("*.png")):
            assert png.read_bytes() == (b / "pages" / png.name).read_bytes()
        for svg in sorted((a / "pages").glob("*.svg")):
            assert svg.read_bytes() == (b / "pages" / svg.name).read_bytes()

    def test_ink_out_writes_image(self, tmp_path, small_cfg, capsys):
        rec = _record(tmp_path, "r.jsonl", "--gestures", "1", "--seconds", "0.5")
        ink = tmp_path / "ink.png"
        rc = main([
            "simulate", str(rec), "--book-dir", str(tmp_path / "book"),
            "--config", str(small_cfg), "--ink-out", str(ink), "--ink-grid", "32",
        ])
        assert rc == 0
        assert ink.exists()
        from PIL import Image

        with Image.open(ink) as im:
            assert im.size == (32, 32)

    def test_idle_only_recording_fails(self, tmp_path, capsys):
        rec = tmp_path / "idle.jsonl"
        rec.write_text(
            '{"t": 0.0, "joint": "right_wrist", "x": 0.5, "y": 0.5, "gesture": "idle"}\n',
            encoding="utf-8",
        )
        rc = main(["simulate", str(rec), "--book-dir", str(tmp_path / "book")])
        assert rc == 1
        assert "no active gestures" in capsys.readouterr().err


class TestSweep:
    def test_csv_header_and_rows(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main([
            "sweep", "-o", str(out), "--grid", "16", "--steps", "10",
            "--alphas", "1e-4,0.05", "--betas", "0,0.35",
        ])
        assert rc == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == EXPECTED_HEADER
        assert len(lines) == 5
        for line in lines[1:]:
            assert len(line.split(",")) == 9

    def test_unstable_rows_flagged(self, tmp_path):
        out = tmp_path / "sweep.csv"
        # alpha=0.05 at dt=1/30, dx=1/16 gives alpha*dt/dx^2 ~ 0.43 > 0.25
        main([
            "sweep", "-o", str(out), "--grid", "16", "--steps", "5",
            "--alphas", "1e-4,0.05", "--betas", "0",
        ])
        rows = {tuple(l.split(",")[:2]): l.split(",") for l in
                out.read_text(encoding="utf-8").splitlines()[1:]}
        assert rows[("0.0001", "0")][2] == "1"
        assert rows[("0.05", "0")][2] == "0"
        assert rows[("0.05", "0")][4:] == ["", "", "", "", ""]

    def test_zero_beta_conserves_mass(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main([
            "sweep", "-o", str(out), "--grid", "32", "--steps", "50",
            "--alphas", "1e-4", "--betas", "0",
        ])
        row = out.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert float(row[8]) < 1e-9
        assert float(row[6]) == pytest.approx(float(row[7]), abs=1e-8)

    def test_rerun_is_byte_identical(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            main(["sweep", "-o", str(path), "--grid", "16", "--steps", "10",
                  "--alphas", "1e-4,2e-4", "--betas", "0,0.35"])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_measure_never_reaches_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        main(["sweep", "-o", str(out), "--grid", "16", "--steps", "2",
              "--alphas", "1e-4", "--betas", "0", "--measure"])
        assert "steps/s" in capsys.readouterr().out
        assert "steps/s" not in out.read_text(encoding="utf-8")


class TestExitCodes:
    def test_missing_recording_returns_1(self, tmp_path, capsys):
        rc = main(["simulate", str(tmp_path / "missing.jsonl"),
                   "--book-dir", str(tmp_path / "book")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_recording_returns_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n", encoding="utf-8")
        rc = main(["simulate", str(bad), "--book-dir", str(tmp_path / "book")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "bad.jsonl:1:" in err

    def test_bad_config_returns_1(self, tmp_path, capsys):
        rec = _record(tmp_path, "r.jsonl", "--gestures", "1", "--seconds", "0.5")
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("ink.grid = nope\n", encoding="utf-8")
        rc = main(["simulate", str(rec), "--book-dir", str(tmp_path / "book"),
                   "--config", str(cfg)])
        assert rc == 1

    @pytest.mark.parametrize("argv", [
        [],
        ["record"],
        ["record", "-o", "x.jsonl", "--pattern", "triangle"],
        ["frobnicate"],
    ])
    def test_usage_errors_exit_2(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2

    def test_parser_lists_subcommands(self):
        parser = build_parser()
        help_text = parser.format_help()
        for name in ("record", "simulate", "sweep", "serve"):
            assert name in help_text
