"""Command-line entry points.

Four subcommands: ``record`` synthesizes a movement recording, ``simulate``
replays a recording into captioned pages, ``sweep`` scans diffusion
parameters into a CSV, and ``serve`` runs the realtime session server.
Everything that takes a ``--seed`` is bit-reproducible for that seed.

Exit codes: 0 on success, 1 on a runtime failure (bad file, overflow, IO),
2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from .caption import caption as caption_gesture
from .caption import summary_from_trajectory
from .compendium import ArchiveError, Book, BookEntry, EntryTooLargeError
from .composition import character_ratio
from .config import Config, ConfigError, load_config
from .ink import InkField, UnstableStepError
from .noise import NoiseField, NoiseOffset
from .rng import SplitMix64
from .trajectory import (
    GesturePhase,
    Joint,
    RecordingParseError,
    TrajRecord,
    bounding_box,
    gestures_from_records,
    read_records,
    write_records,
)

PATTERNS = ("circle", "square", "lissajous")


def _pattern_point(pattern: str, tau: float, scale: float, phase: float) -> tuple[float, float]:
    """Position on a closed figure at parameter tau in [0, 1)."""
    tau = (tau + phase) % 1.0
    if pattern == "circle":
        r = 0.3 * scale
        return (0.5 + r * math.cos(2 * math.pi * tau), 0.5 + r * math.sin(2 * math.pi * tau))
    if pattern == "square":
        # Four edges with one constant coordinate each, so every sample sits
        # exactly on the square and the figure's extent never depends on the
        # sampling rate.
        lo = 0.5 - 0.35 * scale
        hi = 0.5 + 0.35 * scale
        side = tau * 4.0
        k = side % 1.0
        edge = int(side)
        if edge == 0:
            return (lo + (hi - lo) * k, lo)
        if edge == 1:
            return (hi, lo + (hi - lo) * k)
        if edge == 2:
            return (hi - (hi - lo) * k, hi)
        return (lo, hi - (hi - lo) * k)
    if pattern == "lissajous":
        return (
            0.5 + 0.35 * scale * math.sin(2 * math.pi * 3 * tau + math.pi / 2),
            0.5 + 0.35 * scale * math.sin(2 * math.pi * 2 * tau),
        )
    raise ValueError(f"unknown pattern {pattern!r}")


def cmd_record(args: argparse.Namespace) -> int:
    rng = SplitMix64(args.seed)
    rate = args.rate
    records: list[TrajRecord] = []
    t = 0.0
    dt = 1.0 / rate
    for g in range(args.gestures):
        phase = rng.uniform(0.0, 1.0)
        scale = rng.uniform(0.75, 1.0)
        frames = max(2, int(round(args.seconds * rate)))
        for i in range(frames):
            tau = i / frames
            x, y = _pattern_point(args.pattern, tau, scale, phase)
            records.append(TrajRecord(t, Joint.RIGHT_WRIST, x, y, GesturePhase.ACTIVE))
            t += dt
        if g < args.gestures - 1:
            for _ in range(3):
                records.append(TrajRecord(t, Joint.RIGHT_WRIST, 0.5, 0.5, GesturePhase.IDLE))
                t += dt
    n = write_records(args.output, records)
    print(f"wrote {n} records ({args.gestures} gestures, pattern {args.pattern}) to {args.output}")
    return 0


def _run_ink(cfg: Config, records, grid: int, out: Path) -> None:
    """Replay a recording through the diffusion field and save the result."""
    field = InkField(
        width=grid, height=grid, alpha=cfg.ink.alpha, beta=cfg.ink.beta,
        dt=cfg.ink.dt, forcing_mode=cfg.ink.forcing_mode,
    )
    noise = NoiseField(seed=cfg.noise.seed, frequency=cfg.noise.frequency)
    offset = NoiseOffset(velocity=cfg.noise.offset_velocity)
    for rec in records:
        if rec.gesture is GesturePhase.ACTIVE:
            field.deposit(rec.x, rec.y, cfg.brush.strength, cfg.brush.radius)
        S = field.forcing_grid(noise, offset.offset_at(max(0.0, rec.t)))
        field = field.step(S)
    field.to_image().save(out)


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else load_config()
    records = read_records(args.recording)
    gestures = gestures_from_records(records)
    if not gestures:
        print("recording contains no active gestures", file=sys.stderr)
        return 1
    book = Book(
        args.book_dir,
        layout_cfg=cfg.layout,
        render_cfg=cfg.render,
        master_seed=args.seed,
    )
    print(f"{len(gestures)} gestures; page capacity {book.capacity}")
    archived = 0
    for i, traj in enumerate(gestures):
        summary = summary_from_trajectory(traj)
        cap = caption_gesture(summary, cfg.caption)
        aspect = character_ratio(
            bounding_box(traj.positions()), cfg.layout.ratio_min, cfg.layout.ratio_max
        )
        entry = BookEntry(
            contributor=args.contributor,
            caption=cap,
            aspect=aspect,
            t=traj.samples[-1].t,
        )
        result = book.submit_entry(entry)
        spans = ", ".join(
            f"page {p.page_id} slots {p.slot_lo}..{p.slot_hi - 1}" for p in result.placements
        )
        print(f"gesture {i}: aspect {aspect:.3f} [{cap.provider.value}] "
              f"\"{cap.en}\" / \"{cap.zh}\" -> {spans}")
        for rec in result.archived:
            archived += 1
            print(f"archived page {rec.page_id}: {rec.image_file} hash {rec.hash[:16]}")
    if args.ink_out:
        _run_ink(cfg, records, args.ink_grid or cfg.ink.grid, Path(args.ink_out))
        print(f"ink field written to {args.ink_out}")
    state = book.state_summary()
    print(f"done: {archived} pages archived, current page {state['page_id']} "
          f"holds {state['filled']}/{state['capacity']}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    alphas = [float(a) for a in args.alphas.split(",")]
    betas = [float(b) for b in args.betas.split(",")]
    noise = NoiseField(seed=args.seed, frequency=4.0)
    offset = NoiseOffset()
    rows = ["alpha,beta,stable,steps,t_min,t_max,mass_initial,mass_final,max_step_drift"]
    for alpha in alphas:
        for beta in betas:
            try:
                field = InkField(width=args.grid, height=args.grid, alpha=alpha,
                                 beta=beta, dt=args.dt)
            except UnstableStepError:
                rows.append(f"{alpha:.12g},{beta:.12g},0,0,,,,,")
                continue
            rng = SplitMix64(args.seed)
            for _ in range(5):
                field.deposit(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), 0.8, 0.05)
            mass0 = field.mass()
            prev = mass0
            drift = 0.0
            for k in range(args.steps):
                S = field.forcing_grid(noise, offset.offset_at(k * args.dt)) if beta != 0 else None
                field = field.step(S)
                m = field.mass()
                drift = max(drift, abs(m - prev))
                prev = m
            rows.append(
                f"{alpha:.12g},{beta:.12g},1,{args.steps},"
                f"{field.T.min():.12g},{field.T.max():.12g},"
                f"{mass0:.12g},{field.mass():.12g},{drift:.12g}"
            )
    out = Path(args.output)
    out.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {len(rows) - 1} rows to {out}")
    if args.measure:
        field = InkField(width=256, height=256)
        S = field.forcing_grid(noise, 0.0)
        t0 = time.perf_counter()
        n = 0
        while time.perf_counter() - t0 < 1.0:
            field = field.step(S)
            n += 1
        dt_total = time.perf_counter() - t0
        print(f"measured {n / dt_total:.1f} steps/s at 256x256 (forcing reused)")
        t0 = time.perf_counter()
        n = 0
        while time.perf_counter() - t0 < 1.0:
            S = field.forcing_grid(noise, offset.offset_at(n * field.dt))
            field = field.step(S)
            n += 1
        dt_total = time.perf_counter() - t0
        print(f"measured {n / dt_total:.1f} steps/s at 256x256 (forcing refreshed)")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    cfg = load_config(args.config) if args.config else load_config()
    if args.book_dir:
        import dataclasses
        cfg = dataclasses.replace(cfg, server=dataclasses.replace(cfg.server, book_dir=args.book_dir))
    app = create_app(cfg)
    host = args.host or cfg.server.host
    port = args.port or cfg.server.port
    print(f"serving on {host}:{port} (book at {cfg.server.book_dir})")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inkstone",
        description="Movement-driven generative calligraphy engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rec = sub.add_parser("record", help="synthesize a movement recording")
    p_rec.add_argument("--pattern", choices=PATTERNS, default="circle")
    p_rec.add_argument("--seconds", type=float, default=2.0, help="length of each gesture")
    p_rec.add_argument("--rate", type=int, default=30, help="samples per second")
    p_rec.add_argument("--gestures", type=int, default=3)
    p_rec.add_argument("--seed", type=int, default=1)
    p_rec.add_argument("-o", "--output", required=True)
    p_rec.set_defaults(func=cmd_record)

    p_sim = sub.add_parser("simulate", help="replay a recording into archived pages")
    p_sim.add_argument("recording")
    p_sim.add_argument("--book-dir", required=True)
    p_sim.add_argument("--seed", type=int, default=1)
    p_sim.add_argument("--contributor", default="anonymous")
    p_sim.add_argument("--config")
    p_sim.add_argument("--ink-out", help="also run the diffusion field and save its image")
    p_sim.add_argument("--ink-grid", type=int, default=0, help="grid size for --ink-out")
    p_sim.set_defaults(func=cmd_simulate)

    p_sw = sub.add_parser("sweep", help="scan diffusion parameters into a CSV")
    p_sw.add_argument("--grid", type=int, default=64)
    p_sw.add_argument("--steps", type=int, default=200)
    p_sw.add_argument("--dt", type=float, default=1.0 / 30.0)
    p_sw.add_argument("--alphas", default="1e-5,5e-5,1e-4,5e-4")
    p_sw.add_argument("--betas", default="0,0.35")
    p_sw.add_argument("--seed", type=int, default=1)
    p_sw.add_argument("--measure", action="store_true",
                      help="also print 256x256 steps/s (never written to the CSV)")
    p_sw.add_argument("-o", "--output", required=True)
    p_sw.set_defaults(func=cmd_sweep)

    p_srv = sub.add_parser("serve", help="run the realtime session server")
    p_srv.add_argument("--host", default="")
    p_srv.add_argument("--port", type=int, default=0)
    p_srv.add_argument("--book-dir", default="")
    p_srv.add_argument("--config")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, RecordingParseError, EntryTooLargeError,
            ArchiveError, UnstableStepError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
