"""Bilingual captions for a finished gesture.

Every gesture is summarized (tiny path render plus shape features) and
captioned in English and Chinese. A remote captioner can be configured by
URL; it receives the summary and must answer quickly or the engine falls
back to the built-in offline lexicon, which picks a phrase by hashing the
quantized features. The same movement always gets the same offline caption.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
from dataclasses import dataclass
from enum import Enum

from PIL import Image, ImageDraw

from .config import CaptionConfig
from .trajectory import Trajectory, bounding_box, convex_hull

try:
    from importlib.resources import files as _resource_files
except ImportError:  # pragma: no cover
    _resource_files = None  # type: ignore[assignment]


class Provider(str, Enum):
    OFFLINE = "offline"
    REMOTE = "remote"


class CaptionUnavailableError(RuntimeError):
    """No caption source is usable (broken lexicon and no remote)."""


@dataclass(frozen=True)
class MovementSummary:
    """Compact description of one gesture, ready for captioning."""

    image: Image.Image
    aspect: float
    path_length: float
    mean_speed: float
    hull_vertices: int


@dataclass(frozen=True)
class BilingualCaption:
    en: str
    zh: str
    provider: Provider


def _load_lexicon() -> list[dict[str, str]]:
    data = _resource_files("inkstone").joinpath("data/lexicon.json").read_text("utf-8")
    lexicon = json.loads(data)
    if not isinstance(lexicon, list) or not lexicon:
        raise CaptionUnavailableError("caption lexicon is empty")
    for entry in lexicon:
        if not isinstance(entry, dict) or "en" not in entry or "zh" not in entry:
            raise CaptionUnavailableError(f"malformed lexicon entry: {entry!r}")
    return lexicon


_LEXICON: list[dict[str, str]] | None = None


def _lexicon() -> list[dict[str, str]]:
    global _LEXICON
    if _LEXICON is None:
        _LEXICON = _load_lexicon()
    return _LEXICON


def summary_from_trajectory(traj: Trajectory, size: int = 128) -> MovementSummary:
    """Render the gesture path small and measure its shape."""
    if len(traj) == 0:
        raise ValueError("cannot summarize an empty trajectory")
    pts = traj.positions()
    box = bounding_box(pts)
    if box.width <= 0 or box.height <= 0:
        aspect = 1.0
    else:
        aspect = box.width / box.height
    img = Image.new("L", (size, size), 255)
    draw = ImageDraw.Draw(img)
    pixel_pts = [(p[0] * (size - 1), p[1] * (size - 1)) for p in pts]
    if len(pixel_pts) == 1:
        draw.point(pixel_pts[0], fill=0)
    else:
        draw.line(pixel_pts, fill=0, width=2)
    length = traj.path_length()
    duration = traj.duration()
    mean_speed = length / duration if duration > 0 else 0.0
    hull = convex_hull(pts)
    return MovementSummary(
        image=img,
        aspect=aspect,
        path_length=length,
        mean_speed=mean_speed,
        hull_vertices=len(hull),
    )


def _quantized_features(summary: MovementSummary) -> dict[str, float | int]:
    """Features rounded onto coarse bins so near-identical gestures agree."""
    return {
        "aspect": round(summary.aspect / 0.1) * 0.1,
        "path_length": round(summary.path_length / 0.25) * 0.25,
        "mean_speed": round(summary.mean_speed / 0.05) * 0.05,
        "hull_vertices": summary.hull_vertices,
    }


def offline_caption(summary: MovementSummary, cfg: CaptionConfig | None = None) -> BilingualCaption:
    """Deterministic caption: hash the quantized features into the lexicon."""
    cfg = cfg or CaptionConfig()
    lexicon = _lexicon()
    feats = _quantized_features(summary)
    key = "|".join(f"{k}={feats[k]:.4f}" if isinstance(feats[k], float) else f"{k}={feats[k]}"
                   for k in sorted(feats))
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    index = int.from_bytes(digest[:8], "big") % len(lexicon)
    entry = lexicon[index]
    return BilingualCaption(
        en=entry["en"][: cfg.max_len_en],
        zh=entry["zh"][: cfg.max_len_zh],
        provider=Provider.OFFLINE,
    )


def _encode_summary(summary: MovementSummary) -> dict:
    buf = io.BytesIO()
    summary.image.save(buf, format="PNG")
    return {
        "image": base64.b64encode(buf.getvalue()).decode("ascii"),
        "features": {
            "aspect": summary.aspect,
            "path_length": summary.path_length,
            "mean_speed": summary.mean_speed,
            "hull_vertices": summary.hull_vertices,
        },
    }


def _remote_caption(summary: MovementSummary, cfg: CaptionConfig) -> BilingualCaption | None:
    """One POST plus one retry; None on any failure so the caller falls back."""
    import requests

    payload = _encode_summary(summary)
    timeout = cfg.timeout_ms / 1000.0
    for _ in range(2):
        try:
            resp = requests.post(cfg.url, json=payload, timeout=timeout)
            resp.raise_for_status()
            body = resp.json()
            en = body["en"]
            zh = body["zh"]
            if not isinstance(en, str) or not isinstance(zh, str) or not en or not zh:
                return None
            return BilingualCaption(
                en=en[: cfg.max_len_en], zh=zh[: cfg.max_len_zh], provider=Provider.REMOTE
            )
        except (requests.RequestException, ValueError, KeyError, TypeError):
            continue
    return None


def caption(summary: MovementSummary, cfg: CaptionConfig | None = None) -> BilingualCaption:
    """Caption a gesture: remote when configured and responsive, else offline."""
    cfg = cfg or CaptionConfig()
    if cfg.url:
        result = _remote_caption(summary, cfg)
        if result is not None:
            return result
    return offline_caption(summary, cfg)
