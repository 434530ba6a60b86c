"""Movement capture: joints, gesture phases, trajectories, and recordings.

Coordinates are normalized to the unit square with the origin at the top
left, x to the right and y downward. A trajectory is an append-only list of
timestamped samples for a single joint; gesture state is a small hysteresis
machine driven by the distance between the two wrists.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence


class Joint(str, Enum):
    LEFT_WRIST = "left_wrist"
    RIGHT_WRIST = "right_wrist"
    LEFT_ELBOW = "left_elbow"
    RIGHT_ELBOW = "right_elbow"
    HEAD = "head"
    GENERIC_POINTER = "generic_pointer"


HAND_JOINTS: tuple[Joint, Joint] = (Joint.LEFT_WRIST, Joint.RIGHT_WRIST)


class GesturePhase(str, Enum):
    IDLE = "idle"
    ACTIVE = "active"


@dataclass(frozen=True)
class JointSample:
    """One observation of one joint at time ``t`` (seconds)."""

    t: float
    joint: Joint
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"sample out of unit square: ({self.x}, {self.y})")
        if not math.isfinite(self.t):
            raise ValueError(f"non-finite timestamp: {self.t}")

    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class GestureState:
    phase: GesturePhase = GesturePhase.IDLE
    since: float = 0.0


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min


@dataclass
class Trajectory:
    """Append-only sequence of samples for one joint."""

    joint: Joint
    samples: list[JointSample] = field(default_factory=list)

    def append_sample(self, sample: JointSample) -> None:
        if sample.joint is not self.joint:
            raise ValueError(f"sample joint {sample.joint.value} != trajectory joint {self.joint.value}")
        if self.samples and sample.t < self.samples[-1].t:
            raise ValueError(f"timestamps must be non-decreasing: {sample.t} < {self.samples[-1].t}")
        self.samples.append(sample)

    def __len__(self) -> int:
        return len(self.samples)

    def positions(self) -> list[tuple[float, float]]:
        return [s.position() for s in self.samples]

    def path_length(self) -> float:
        pts = self.positions()
        return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))

    def duration(self) -> float:
        if len(self.samples) < 2:
            return 0.0
        return self.samples[-1].t - self.samples[0].t


def select_joint(positions: dict[Joint, tuple[float, float]]) -> Joint:
    """Pick the drawing joint: the hand joint whose position vector is longest.

    Ties break toward the left wrist (dict order of HAND_JOINTS). Raises if
    neither hand joint is present.
    """
    best: Joint | None = None
    best_norm = -1.0
    for joint in HAND_JOINTS:
        pos = positions.get(joint)
        if pos is None:
            continue
        norm = math.hypot(pos[0], pos[1])
        if norm > best_norm:
            best = joint
            best_norm = norm
    if best is None:
        raise ValueError("no hand joint present in the pose")
    return best


def update_gesture(
    state: GestureState,
    left_wrist: tuple[float, float],
    right_wrist: tuple[float, float],
    close: float = 0.05,
    open: float = 0.10,
    t: float | None = None,
) -> GestureState:
    """Advance the wrist-gesture hysteresis machine by one pose.

    Idle becomes active only when the wrists come strictly closer than
    ``close``; active becomes idle only when they separate strictly beyond
    ``open``. Distances in between keep the current phase, so jitter around
    a single threshold cannot toggle the state. ``t`` stamps transitions.
    """
    if not 0 < close < open:
        raise ValueError(f"thresholds must satisfy 0 < close < open, got {close}, {open}")
    dist = math.dist(left_wrist, right_wrist)
    when = state.since if t is None else t
    if state.phase is GesturePhase.IDLE and dist < close:
        return GestureState(GesturePhase.ACTIVE, when)
    if state.phase is GesturePhase.ACTIVE and dist > open:
        return GestureState(GesturePhase.IDLE, when)
    return state


def bounding_box(points: Sequence[tuple[float, float]]) -> BoundingBox:
    if not points:
        raise ValueError("bounding box of no points")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return BoundingBox(min(xs), min(ys), max(xs), max(ys))


def _cross(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Convex hull by monotone chain, counter-clockwise, no collinear points.

    Degenerate inputs collapse: all-coincident points give one vertex, all-
    collinear points give the two extremes.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # every point identical after dedup handled above; collinear fallback
        return [pts[0], pts[-1]]
    return hull


def endpoint_pairs(hull: Sequence[tuple[float, float]]) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Stroke endpoint pairs: consecutive hull vertices as a closed polygon.

    A two-vertex hull yields its single edge once; fewer than two vertices
    yield nothing to stroke.
    """
    n = len(hull)
    if n < 2:
        return []
    if n == 2:
        return [(hull[0], hull[1])]
    return [(hull[i], hull[(i + 1) % n]) for i in range(n)]


class RecordingParseError(ValueError):
    """A malformed line in a recording file, with its line number."""

    def __init__(self, path: str, lineno: int, reason: str) -> None:
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True)
class TrajRecord:
    """One line of a recording: a sample plus the gesture phase at that time."""

    t: float
    joint: Joint
    x: float
    y: float
    gesture: GesturePhase

    def to_sample(self) -> JointSample:
        return JointSample(self.t, self.joint, self.x, self.y)


def write_records(path: str | Path, records: Iterable[TrajRecord]) -> int:
    """Write records as JSON lines. Returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({
                "t": rec.t,
                "joint": rec.joint.value,
                "x": rec.x,
                "y": rec.y,
                "gesture": rec.gesture.value,
            }, separators=(",", ":")) + "\n")
            n += 1
    return n


def read_records(path: str | Path) -> list[TrajRecord]:
    """Parse a JSON-lines recording, failing with the offending line number."""
    records: list[TrajRecord] = []
    last_t = -math.inf
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordingParseError(str(path), lineno, f"bad JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise RecordingParseError(str(path), lineno, "expected an object")
            missing = {"t", "joint", "x", "y", "gesture"} - obj.keys()
            if missing:
                raise RecordingParseError(str(path), lineno, f"missing keys: {sorted(missing)}")
            try:
                joint = Joint(obj["joint"])
                gesture = GesturePhase(obj["gesture"])
                rec = TrajRecord(float(obj["t"]), joint, float(obj["x"]), float(obj["y"]), gesture)
                rec.to_sample()  # range check
            except (ValueError, TypeError) as exc:
                raise RecordingParseError(str(path), lineno, str(exc)) from exc
            if rec.t < last_t:
                raise RecordingParseError(str(path), lineno, f"timestamp went backwards: {rec.t} < {last_t}")
            last_t = rec.t
            records.append(rec)
    return records


def gestures_from_records(records: Sequence[TrajRecord]) -> list[Trajectory]:
    """Split a recording into one trajectory per contiguous active span."""
    gestures: list[Trajectory] = []
    current: Trajectory | None = None
    for rec in records:
        if rec.gesture is GesturePhase.ACTIVE:
            if current is None or current.joint is not rec.joint:
                if current is not None and len(current) > 0:
                    gestures.append(current)
                current = Trajectory(rec.joint)
            current.append_sample(rec.to_sample())
        else:
            if current is not None and len(current) > 0:
                gestures.append(current)
            current = None
    if current is not None and len(current) > 0:
        gestures.append(current)
    return gestures
