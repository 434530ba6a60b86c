"""Brush strokes: line sampling and noise-driven coloring.

A stroke crosses the region swept by a gesture: its endpoints come from the
gesture's convex hull, each segment is sampled into evenly spaced points,
and every point is painted black or white by thresholding the noise field
at that point. Equality lands on black, so a threshold of 1 blacks out the
stroke entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from PIL import Image

from .noise import NoiseField

Point = tuple[float, float]


class Color(str, Enum):
    BLACK = "black"
    WHITE = "white"


@dataclass(frozen=True)
class StrokePoint:
    x: float
    y: float
    color: Color


@dataclass(frozen=True)
class StrokeParams:
    threshold: float = 0.5
    samples_per_line: int = 32

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.samples_per_line < 2:
            raise ValueError(f"need at least 2 samples per line, got {self.samples_per_line}")


def rasterize_line(pa: Point, pb: Point, n: int) -> list[Point]:
    """``n`` points from pb to pa: the i-th is k*pa + (1-k)*pb, k = i/(n-1)."""
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    points: list[Point] = []
    for i in range(n):
        k = i / (n - 1)
        points.append((k * pa[0] + (1.0 - k) * pb[0], k * pa[1] + (1.0 - k) * pb[1]))
    return points


def colorize(point: Point, noise: NoiseField, z: float, threshold: float) -> Color:
    """Black where the noise is at or below the threshold, white above."""
    return Color.BLACK if noise.sample(point[0], point[1], z) <= threshold else Color.WHITE


def stroke_pass(
    pairs: Sequence[tuple[Point, Point]],
    noise: NoiseField,
    z: float,
    params: StrokeParams,
) -> list[StrokePoint]:
    """Sample and color every segment of one stroke pass."""
    if not pairs:
        return []
    pts: list[Point] = []
    for pa, pb in pairs:
        pts.extend(rasterize_line(pa, pb, params.samples_per_line))
    xs = np.array([p[0] for p in pts], dtype=np.float64)
    ys = np.array([p[1] for p in pts], dtype=np.float64)
    values = noise.sample_points(xs, ys, z)
    return [
        StrokePoint(p[0], p[1], Color.BLACK if v <= params.threshold else Color.WHITE)
        for p, v in zip(pts, values)
    ]


def overlay_mask(points: Sequence[StrokePoint], width: int, height: int) -> Image.Image:
    """1-bit mask of the black stroke points on a width x height canvas."""
    grid = np.zeros((height, width), dtype=bool)
    for p in points:
        if p.color is Color.BLACK:
            px = min(width - 1, max(0, int(p.x * width)))
            py = min(height - 1, max(0, int(p.y * height)))
            grid[py, px] = True
    return Image.fromarray(grid)


def render_overlay(points: Sequence[StrokePoint], width: int, height: int) -> Image.Image:
    """Grayscale render of black-point density, darkest where points pile up."""
    counts = np.zeros((height, width), dtype=np.int64)
    for p in points:
        if p.color is Color.BLACK:
            px = min(width - 1, max(0, int(p.x * width)))
            py = min(height - 1, max(0, int(p.y * height)))
            counts[py, px] += 1
    if counts.max() == 0:
        return Image.new("L", (width, height), 255)
    levels = 255 - np.round(255.0 * counts / counts.max()).astype(np.uint8)
    return Image.fromarray(levels.astype(np.uint8), mode="L")
