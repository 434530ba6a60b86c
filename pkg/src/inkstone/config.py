"""Engine configuration.

All tunables live in one frozen tree of dataclasses. Values come from, in
increasing precedence: built-in defaults, an optional flat config file of
``section.key = value`` lines, and ``INKSTONE_<SECTION>_<KEY>`` environment
variables. Every consumer takes a config object; nothing reads the
environment at call time.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Raised for unparseable files, unknown keys, or out-of-range values."""


@dataclass(frozen=True)
class NoiseConfig:
    seed: int = 7
    frequency: float = 4.0
    offset_velocity: float = 0.15


@dataclass(frozen=True)
class InkConfig:
    grid: int = 256
    alpha: float = 1e-4
    beta: float = 0.35
    dt: float = 1.0 / 30.0
    forcing_mode: str = "noise"  # "noise" or "laplacian"


@dataclass(frozen=True)
class BrushConfig:
    radius: float = 0.035
    strength: float = 0.6


@dataclass(frozen=True)
class StrokeConfig:
    threshold: float = 0.5
    samples_per_line: int = 32


@dataclass(frozen=True)
class GestureConfig:
    close: float = 0.05
    open: float = 0.10


@dataclass(frozen=True)
class CaptionConfig:
    url: str = ""  # empty means offline only
    timeout_ms: int = 2000
    max_len_en: int = 80
    max_len_zh: int = 24


@dataclass(frozen=True)
class LayoutConfig:
    page_width: float = 1.0
    page_height: float = 1.4
    margin: float = 0.08
    cell: float = 0.08
    group_min: int = 2
    group_max: int = 4
    gap_intra: float = 0.015
    gap_min: float = 0.04
    gap_max: float = 0.10
    ratio_min: float = 0.6
    ratio_max: float = 1.6


@dataclass(frozen=True)
class RenderConfig:
    page_px: int = 800


@dataclass(frozen=True)
class FontConfig:
    path: str = ""  # empty means procedural glyphs


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    rooms: int = 1
    tick_hz: int = 30
    book_dir: str = "book"
    book_seed: int = 1
    static_dir: str = ""  # optional directory of UI files to serve at /ui


@dataclass(frozen=True)
class Config:
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    ink: InkConfig = field(default_factory=InkConfig)
    brush: BrushConfig = field(default_factory=BrushConfig)
    stroke: StrokeConfig = field(default_factory=StrokeConfig)
    gesture: GestureConfig = field(default_factory=GestureConfig)
    caption: CaptionConfig = field(default_factory=CaptionConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    font: FontConfig = field(default_factory=FontConfig)
    server: ServerConfig = field(default_factory=ServerConfig)


_SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(Config)}  # type: ignore[union-attr]


def _coerce(raw: str, target: Any, where: str) -> Any:
    t = type(target)
    try:
        if t is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if t is int:
            return int(raw.strip(), 0)
        if t is float:
            return float(raw.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {t.__name__}") from exc


def _validate(cfg: Config) -> Config:
    if cfg.ink.grid < 8:
        raise ConfigError(f"ink.grid must be >= 8, got {cfg.ink.grid}")
    if cfg.ink.dt <= 0 or cfg.ink.alpha < 0:
        raise ConfigError("ink.dt must be positive and ink.alpha non-negative")
    if cfg.ink.forcing_mode not in ("noise", "laplacian"):
        raise ConfigError(f"unknown ink.forcing_mode {cfg.ink.forcing_mode!r}")
    if not 0 < cfg.gesture.close < cfg.gesture.open:
        raise ConfigError("gesture thresholds must satisfy 0 < close < open")
    lay = cfg.layout
    if lay.group_min < 1 or lay.group_max < lay.group_min:
        raise ConfigError("layout group bounds must satisfy 1 <= group_min <= group_max")
    if lay.gap_max < lay.gap_min or lay.gap_min < 0:
        raise ConfigError("layout gap bounds must satisfy 0 <= gap_min <= gap_max")
    if lay.ratio_max < lay.ratio_min or lay.ratio_min <= 0:
        raise ConfigError("layout ratio bounds must satisfy 0 < ratio_min <= ratio_max")
    usable_w = lay.page_width - 2 * lay.margin
    usable_h = lay.page_height - 2 * lay.margin
    if usable_w < lay.cell or usable_h < lay.cell:
        raise ConfigError("page too small for a single cell inside the margins")
    if cfg.server.tick_hz < 1:
        raise ConfigError("server.tick_hz must be >= 1")
    return cfg


def _apply(values: dict[str, dict[str, Any]]) -> Config:
    sections = {}
    for name, factory in _SECTIONS.items():
        base = factory()  # type: ignore[misc]
        overrides = values.get(name, {})
        sections[name] = dataclasses.replace(base, **overrides) if overrides else base
    return _validate(Config(**sections))


def _parse_file(path: Path) -> dict[str, dict[str, Any]]:
    values: dict[str, dict[str, Any]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if "." not in key:
            raise ConfigError(f"{path}:{lineno}: key {key!r} is missing its section")
        section, _, attr = key.partition(".")
        factory = _SECTIONS.get(section)
        if factory is None:
            raise ConfigError(f"{path}:{lineno}: unknown section {section!r}")
        defaults = factory()  # type: ignore[misc]
        if not hasattr(defaults, attr):
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        where = f"{path}:{lineno}"
        values.setdefault(section, {})[attr] = _coerce(raw, getattr(defaults, attr), where)
    return values


def _env_overrides() -> dict[str, dict[str, Any]]:
    values: dict[str, dict[str, Any]] = {}
    prefix = "INKSTONE_"
    for name, raw in os.environ.items():
        if not name.startswith(prefix):
            continue
        rest = name[len(prefix):].lower()
        section, _, attr = rest.partition("_")
        factory = _SECTIONS.get(section)
        if factory is None:
            continue
        defaults = factory()  # type: ignore[misc]
        if not hasattr(defaults, attr):
            continue
        values.setdefault(section, {})[attr] = _coerce(raw, getattr(defaults, attr), name)
    return values


def load_config(path: str | Path | None = None, env: bool = True) -> Config:
    """Build a config from defaults, an optional file, and the environment."""
    values: dict[str, dict[str, Any]] = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        for section, attrs in _parse_file(p).items():
            values.setdefault(section, {}).update(attrs)
    if env:
        for section, attrs in _env_overrides().items():
            values.setdefault(section, {}).update(attrs)
    return _apply(values)


def default_config() -> Config:
    """Built-in defaults only, ignoring files and the environment."""
    return _apply({})
