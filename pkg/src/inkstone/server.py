"""Realtime session server.

One websocket endpoint carries the whole interaction: clients stream
movement in, the server streams frames and events out. A fixed-rate tick
task per room is the only writer of that room's ink field; message handlers
just queue deposits and gesture changes for it.

Two client roles exist. A ``pointer`` client declares its own gesture
boundaries (``gesture_start`` / ``gesture_end``) and sends ``sample``
positions while drawing. A ``wrist`` client streams two-wrist ``pose``
messages and never declares anything: the server runs the wrist-distance
hysteresis itself and tells the client when its gesture phase flips.

Outbound messages carry a per-connection ``seq`` that increases by one on
every send. Frames are disposable: a slow client only ever has the newest
frame queued, older ones are dropped. Event messages (captions, placements,
archives, errors) are never dropped and never reordered relative to each
other, so a caption always precedes its placement, which precedes the
archive of the page it filled.
"""

from __future__ import annotations

import asyncio
import base64
import contextlib
import io
import json
import logging
from collections import deque
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse, Response

from . import __version__
from .caption import caption as caption_gesture
from .caption import summary_from_trajectory
from .compendium import Book, EntryTooLargeError
from .composition import character_ratio
from .config import Config, load_config
from .ink import InkField
from .noise import NoiseField, NoiseOffset
from .strokes import Color, StrokeParams, stroke_pass
from .trajectory import (
    GesturePhase,
    GestureState,
    Joint,
    JointSample,
    Trajectory,
    bounding_box,
    convex_hull,
    endpoint_pairs,
    select_joint,
    update_gesture,
)

log = logging.getLogger(__name__)

_FRAME_MAX_SIDE = 128


class Session:
    """One websocket connection and its outbound queues."""

    _next_id = 0

    def __init__(self, ws: WebSocket, role: str, name: str) -> None:
        Session._next_id += 1
        self.id = Session._next_id
        self.ws = ws
        self.role = role
        self.name = name
        self.seq = 0
        self.events: deque[dict] = deque()
        self.latest_frame: dict | None = None
        self.frame_new = False
        self.wake = asyncio.Event()
        self.alive = True
        self.trajectory: Trajectory | None = None
        self.gesture = GestureState()

    def push_event(self, msg: dict) -> None:
        """Queue a message that must not be dropped."""
        self.events.append(msg)
        self.wake.set()

    def offer_frame(self, frame: dict) -> None:
        """Replace whatever frame is waiting; only the newest ever sends."""
        self.latest_frame = frame
        self.frame_new = True
        self.wake.set()

    async def run_sender(self) -> None:
        try:
            while self.alive:
                await self.wake.wait()
                self.wake.clear()
                while self.events:
                    await self._send(self.events.popleft())
                if self.frame_new and self.latest_frame is not None:
                    self.frame_new = False
                    await self._send(self.latest_frame)
        except Exception:
            self.alive = False

    async def _send(self, msg: dict) -> None:
        self.seq += 1
        await self.ws.send_text(json.dumps({"seq": self.seq, **msg}, separators=(",", ":")))


class Room:
    """Shared canvas state: ink field, noise, and the sessions watching it."""

    def __init__(self, name: str, cfg: Config, book: Book) -> None:
        self.name = name
        self.cfg = cfg
        self.book = book
        self.field = InkField(
            width=cfg.ink.grid, height=cfg.ink.grid, alpha=cfg.ink.alpha,
            beta=cfg.ink.beta, dt=cfg.ink.dt, forcing_mode=cfg.ink.forcing_mode,
        )
        self.noise = NoiseField(seed=cfg.noise.seed, frequency=cfg.noise.frequency)
        self.offset = NoiseOffset(velocity=cfg.noise.offset_velocity)
        self.t = 0.0
        self.sessions: dict[int, Session] = {}
        self.pending_deposits: list[tuple[float, float, float, float]] = []
        self.recent_strokes: list[list] = []
        self.task: asyncio.Task | None = None

    def add_session(self, session: Session) -> None:
        self.sessions[session.id] = session

    def remove_session(self, session: Session) -> None:
        session.alive = False
        self.sessions.pop(session.id, None)

    def broadcast(self, msg: dict) -> None:
        for s in self.sessions.values():
            s.push_event(msg)

    # -- inbound ----------------------------------------------------------

    def handle_text(self, session: Session, text: str) -> None:
        try:
            msg = json.loads(text)
            if not isinstance(msg, dict) or "type" not in msg:
                raise ValueError("not an object with a type")
        except ValueError:
            session.push_event({"type": "error", "code": "bad_message"})
            return
        kind = msg["type"]
        if kind == "ping":
            session.push_event({"type": "pong"})
        elif kind == "sample":
            self._on_sample(session, msg)
        elif kind == "gesture_start":
            self._on_gesture_start(session)
        elif kind == "gesture_end":
            self._on_gesture_end(session)
        elif kind == "pose":
            self._on_pose(session, msg)
        else:
            session.push_event({"type": "error", "code": "unknown_type"})

    def _on_sample(self, session: Session, msg: dict) -> None:
        if session.role != "pointer":
            session.push_event({"type": "error", "code": "wrong_role"})
            return
        ok, x, y = _coords(msg, "x", "y")
        if not ok:
            session.push_event({"type": "error", "code": "out_of_range"})
            return
        if session.trajectory is None:
            return  # samples between gestures are just cursor motion
        session.trajectory.append_sample(JointSample(self.t, Joint.GENERIC_POINTER, x, y))
        self.pending_deposits.append((x, y, self.cfg.brush.strength, self.cfg.brush.radius))

    def _on_gesture_start(self, session: Session) -> None:
        if session.role != "pointer":
            session.push_event({"type": "error", "code": "wrong_role"})
            return
        if session.trajectory is None:
            session.trajectory = Trajectory(Joint.GENERIC_POINTER)
            session.push_event({"type": "gesture", "phase": "active"})

    def _on_gesture_end(self, session: Session) -> None:
        if session.role != "pointer":
            session.push_event({"type": "error", "code": "wrong_role"})
            return
        traj = session.trajectory
        session.trajectory = None
        session.push_event({"type": "gesture", "phase": "idle"})
        if traj is not None and len(traj) > 0:
            asyncio.get_running_loop().create_task(self.finish_gesture(session, traj))

    def _on_pose(self, session: Session, msg: dict) -> None:
        if session.role != "wrist":
            session.push_event({"type": "error", "code": "wrong_role"})
            return
        ok_l, lx, ly = _coords(msg, "left", None)
        ok_r, rx, ry = _coords(msg, "right", None)
        if not (ok_l and ok_r):
            session.push_event({"type": "error", "code": "out_of_range"})
            return
        left, right = (lx, ly), (rx, ry)
        before = session.gesture
        after = update_gesture(
            before, left, right,
            close=self.cfg.gesture.close, open=self.cfg.gesture.open, t=self.t,
        )
        session.gesture = after
        if before.phase is not after.phase:
            session.push_event({"type": "gesture", "phase": after.phase.value})
            if after.phase is GesturePhase.ACTIVE:
                joint = select_joint({Joint.LEFT_WRIST: left, Joint.RIGHT_WRIST: right})
                session.trajectory = Trajectory(joint)
            else:
                traj = session.trajectory
                session.trajectory = None
                if traj is not None and len(traj) > 0:
                    asyncio.get_running_loop().create_task(self.finish_gesture(session, traj))
        if after.phase is GesturePhase.ACTIVE and session.trajectory is not None:
            pos = left if session.trajectory.joint is Joint.LEFT_WRIST else right
            session.trajectory.append_sample(JointSample(self.t, session.trajectory.joint, *pos))
            self.pending_deposits.append(
                (pos[0], pos[1], self.cfg.brush.strength, self.cfg.brush.radius)
            )

    # -- gesture completion ------------------------------------------------

    async def finish_gesture(self, session: Session, traj: Trajectory) -> None:
        """Caption, stroke, and archive one finished gesture."""
        try:
            summary = summary_from_trajectory(traj)
            cap = await asyncio.to_thread(caption_gesture, summary, self.cfg.caption)
            pts = traj.positions()
            aspect = character_ratio(
                bounding_box(pts), self.cfg.layout.ratio_min, self.cfg.layout.ratio_max
            )
            params = StrokeParams(
                threshold=self.cfg.stroke.threshold,
                samples_per_line=self.cfg.stroke.samples_per_line,
            )
            pairs = endpoint_pairs(convex_hull(pts))
            points = stroke_pass(pairs, self.noise, self.offset.offset_at(self.t), params)
            for p in points:
                if p.color is Color.BLACK:
                    self.pending_deposits.append(
                        (p.x, p.y, self.cfg.brush.strength * 0.5, self.cfg.brush.radius * 0.5)
                    )
            self.recent_strokes.extend(
                [round(p.x, 4), round(p.y, 4), p.color.value] for p in points
            )
            entry_t = traj.samples[-1].t
            from .compendium import BookEntry
            result = self.book.submit_entry(
                BookEntry(contributor=session.name, caption=cap, aspect=aspect, t=entry_t)
            )
            self.broadcast({
                "type": "caption_ready", "session": session.id,
                "en": cap.en, "zh": cap.zh, "provider": cap.provider.value,
            })
            for pl in result.placements:
                self.broadcast({
                    "type": "placed", "session": session.id, "page_id": pl.page_id,
                    "slot_lo": pl.slot_lo, "slot_hi": pl.slot_hi,
                })
            for rec in result.archived:
                self.broadcast({
                    "type": "page_archived", "page_id": rec.page_id,
                    "hash": rec.hash, "image": f"/pages/{rec.page_id}/image",
                    "vector": f"/pages/{rec.page_id}/vector",
                })
        except EntryTooLargeError as exc:
            session.push_event({"type": "error", "code": "entry_too_large", "detail": str(exc)})
        except Exception:
            log.exception("gesture processing failed")
            session.push_event({"type": "error", "code": "internal"})

    # -- tick ---------------------------------------------------------------

    def _frame_payload(self) -> dict:
        T = self.field.T
        side = max(T.shape)
        stride = max(1, side // _FRAME_MAX_SIDE)
        small = T[::stride, ::stride]
        img_arr = np.round((1.0 - small) * 255.0).astype(np.uint8)
        buf = io.BytesIO()
        from PIL import Image
        Image.fromarray(img_arr, mode="L").save(buf, format="PNG")
        strokes = self.recent_strokes
        self.recent_strokes = []
        state = self.book.state_summary()
        return {
            "type": "frame",
            "t": round(self.t, 6),
            "mass": round(self.field.mass(), 6),
            "page": {
                "page_id": state["page_id"],
                "filled": state["filled"],
                "capacity": state["capacity"],
            },
            "ink": base64.b64encode(buf.getvalue()).decode("ascii"),
            "strokes": strokes,
        }

    async def run(self) -> None:
        period = 1.0 / self.cfg.server.tick_hz
        loop = asyncio.get_running_loop()
        while True:
            started = loop.time()
            self.t += period
            deposits = self.pending_deposits
            self.pending_deposits = []
            for x, y, strength, radius in deposits:
                self.field.deposit(x, y, strength, radius)
            forcing = None
            if self.field.beta != 0.0:
                forcing = self.field.forcing_grid(self.noise, self.offset.offset_at(self.t))
            self.field = self.field.step(forcing)
            frame = self._frame_payload()
            for s in list(self.sessions.values()):
                s.offer_frame(frame)
            await asyncio.sleep(max(0.0, period - (loop.time() - started)))


def _coords(msg: dict, a: str, b: str | None) -> tuple[bool, float, float]:
    """Pull (x, y) out of a message, either two floats or one [x, y] pair."""
    try:
        if b is None:
            pair = msg[a]
            x, y = float(pair[0]), float(pair[1])
        else:
            x, y = float(msg[a]), float(msg[b])
    except (KeyError, TypeError, ValueError, IndexError):
        return (False, 0.0, 0.0)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        return (False, 0.0, 0.0)
    return (True, x, y)


def create_app(cfg: Config | None = None, book: Book | None = None) -> FastAPI:
    """Build the application; rooms and their tick tasks live in its state."""
    cfg = cfg or load_config()
    if book is None:
        book = Book(
            cfg.server.book_dir,
            layout_cfg=cfg.layout,
            render_cfg=cfg.render,
            master_seed=cfg.server.book_seed,
        )

    rooms: dict[str, Room] = {}
    for i in range(max(1, cfg.server.rooms)):
        name = f"r{i}"
        rooms[name] = Room(name, cfg, book)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        for room in rooms.values():
            room.task = asyncio.get_running_loop().create_task(room.run())
        yield
        for room in rooms.values():
            if room.task is not None:
                room.task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await room.task

    app = FastAPI(title="inkstone", version=__version__, lifespan=lifespan)
    app.state.rooms = rooms
    app.state.book = book

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "rooms": sorted(rooms)}

    @app.get("/state")
    def state() -> dict:
        return {"book": book.state_summary(),
                "rooms": {name: {"t": round(r.t, 6), "sessions": len(r.sessions)}
                          for name, r in rooms.items()}}

    @app.get("/pages")
    def pages(lo: int = 0, hi: int | None = None) -> list[dict]:
        return [r.to_json() for r in book.list_pages(lo, hi)]

    @app.get("/pages/{page_id}/image")
    def page_image(page_id: int) -> Response:
        rec = book.page_record(page_id)
        if rec is None:
            return JSONResponse({"error": "no such page"}, status_code=404)
        return FileResponse(book.root / rec.image_file, media_type="image/png")

    @app.get("/pages/{page_id}/vector")
    def page_vector(page_id: int) -> Response:
        rec = book.page_record(page_id)
        if rec is None:
            return JSONResponse({"error": "no such page"}, status_code=404)
        return FileResponse(book.root / rec.vector_file, media_type="image/svg+xml")

    @app.websocket("/session")
    async def session_ws(ws: WebSocket) -> None:
        room_name = ws.query_params.get("room", "r0")
        role = ws.query_params.get("role", "pointer")
        name = ws.query_params.get("name", "anonymous")
        room = rooms.get(room_name)
        if room is None or role not in ("pointer", "wrist"):
            await ws.close(code=4004)
            return
        await ws.accept()
        session = Session(ws, role, name)
        room.add_session(session)
        session.push_event({
            "type": "hello", "session": session.id, "room": room.name, "role": role,
            "capacity": book.capacity, "page_id": book.current_page_id,
            "tick_hz": cfg.server.tick_hz,
        })
        sender = asyncio.get_running_loop().create_task(session.run_sender())
        try:
            while True:
                text = await ws.receive_text()
                room.handle_text(session, text)
        except WebSocketDisconnect:
            pass
        finally:
            room.remove_session(session)
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender

    static_dir = cfg.server.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
