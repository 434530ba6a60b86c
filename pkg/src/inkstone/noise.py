"""Seeded 3D gradient noise over a simplex lattice, plus the time offset.

The field is continuous in all three arguments and deterministic for a given
seed on any platform: the permutation table comes from a splitmix64-driven
shuffle, never from the host RNG. Spatial frequency scales x and y only; the
third axis is consumed raw so callers can feed it a time offset directly.

The falloff kernel uses radius^2 = 0.5, which keeps each corner's
contribution exactly zero on the opposite cell face and makes the summed
field C1-continuous across simplex boundaries. OUTPUT_SCALE was measured by
dense sampling (max |raw sum| over 2e7 points) and rounded down so the
scaled value stays inside [-1, 1] with a small margin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .rng import SplitMix64

_GRAD3 = np.array([
    (1, 1, 0), (-1, 1, 0), (1, -1, 0), (-1, -1, 0),
    (1, 0, 1), (-1, 0, 1), (1, 0, -1), (-1, 0, -1),
    (0, 1, 1), (0, -1, 1), (0, 1, -1), (0, -1, -1),
], dtype=np.float64)

_F3 = 1.0 / 3.0
_G3 = 1.0 / 6.0

OUTPUT_SCALE = 76.0


class InvalidTimeError(ValueError):
    """Raised when a time offset is requested for a negative time."""


def _permutation(seed: int) -> np.ndarray:
    table = list(range(256))
    SplitMix64(seed).shuffle(table)
    return np.array(table + table, dtype=np.int64)


def _simplex_raw(perm: np.ndarray, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Unscaled simplex noise; inputs broadcast, output has their shape."""
    x, y, z = np.broadcast_arrays(x, y, z)
    s = (x + y + z) * _F3
    i = np.floor(x + s).astype(np.int64)
    j = np.floor(y + s).astype(np.int64)
    k = np.floor(z + s).astype(np.int64)
    t = (i + j + k) * _G3
    x0 = x - (i - t)
    y0 = y - (j - t)
    z0 = z - (k - t)

    # Offsets of the second and third simplex corners, from the component
    # ranking of (x0, y0, z0). Boolean identities replace the branch ladder.
    c1 = x0 >= y0
    c2 = y0 >= z0
    c3 = x0 >= z0
    i1 = c1 & (c2 | c3)
    j1 = ~c1 & c2
    k1 = ~c2 & (~c1 | ~c3)
    i2 = c1 | (c2 & c3)
    j2 = c2 | ~c1
    k2 = ~(c2 & (c1 | c3))

    i1i = i1.astype(np.int64)
    j1i = j1.astype(np.int64)
    k1i = k1.astype(np.int64)
    i2i = i2.astype(np.int64)
    j2i = j2.astype(np.int64)
    k2i = k2.astype(np.int64)

    x1 = x0 - i1i + _G3
    y1 = y0 - j1i + _G3
    z1 = z0 - k1i + _G3
    x2 = x0 - i2i + 2.0 * _G3
    y2 = y0 - j2i + 2.0 * _G3
    z2 = z0 - k2i + 2.0 * _G3
    x3 = x0 - 1.0 + 3.0 * _G3
    y3 = y0 - 1.0 + 3.0 * _G3
    z3 = z0 - 1.0 + 3.0 * _G3

    ii = i & 255
    jj = j & 255
    kk = k & 255
    gi0 = perm[ii + perm[jj + perm[kk]]] % 12
    gi1 = perm[ii + i1i + perm[jj + j1i + perm[kk + k1i]]] % 12
    gi2 = perm[ii + i2i + perm[jj + j2i + perm[kk + k2i]]] % 12
    gi3 = perm[ii + 1 + perm[jj + 1 + perm[kk + 1]]] % 12

    total = np.zeros_like(x0)
    for gi, dx, dy, dz in ((gi0, x0, y0, z0), (gi1, x1, y1, z1),
                           (gi2, x2, y2, z2), (gi3, x3, y3, z3)):
        t_c = 0.5 - dx * dx - dy * dy - dz * dz
        np.maximum(t_c, 0.0, out=t_c)
        t_c *= t_c
        t_c *= t_c
        g = _GRAD3[gi]
        total += t_c * (g[..., 0] * dx + g[..., 1] * dy + g[..., 2] * dz)
    return total


@dataclass(frozen=True)
class NoiseField:
    """Deterministic noise field; ``frequency`` scales the two spatial axes."""

    seed: int = 7
    frequency: float = 4.0

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        object.__setattr__(self, "_perm", _permutation(self.seed))

    def sample(self, x: float, y: float, z: float) -> float:
        """Noise value in [0, 1] at one point."""
        raw = _simplex_raw(
            self._perm,  # type: ignore[attr-defined]
            np.array([x * self.frequency], dtype=np.float64),
            np.array([y * self.frequency], dtype=np.float64),
            np.array([z], dtype=np.float64),
        )
        v = (OUTPUT_SCALE * float(raw[0]) + 1.0) * 0.5
        return min(1.0, max(0.0, v))

    def sample_points(self, xs: np.ndarray, ys: np.ndarray, z: float) -> np.ndarray:
        """Noise values in [0, 1] at paired coordinates, one per point."""
        xa = np.asarray(xs, dtype=np.float64) * self.frequency
        ya = np.asarray(ys, dtype=np.float64) * self.frequency
        raw = _simplex_raw(self._perm, xa, ya, np.float64(z))  # type: ignore[attr-defined]
        out = (OUTPUT_SCALE * raw + 1.0) * 0.5
        return np.clip(out, 0.0, 1.0)

    def sample_grid(self, xs: Iterable[float], ys: Iterable[float], z: float) -> np.ndarray:
        """Noise on the grid ys x xs at one z, shape (len(ys), len(xs))."""
        xa = np.asarray(list(xs), dtype=np.float64) * self.frequency
        ya = np.asarray(list(ys), dtype=np.float64) * self.frequency
        gx, gy = np.meshgrid(xa, ya)
        raw = _simplex_raw(self._perm, gx, gy, np.float64(z))  # type: ignore[attr-defined]
        out = (OUTPUT_SCALE * raw + 1.0) * 0.5
        np.clip(out, 0.0, 1.0, out=out)
        return out


@dataclass(frozen=True)
class NoiseOffset:
    """Linear time drift fed to the noise field's third axis."""

    velocity: float = 0.15

    def offset_at(self, t: float) -> float:
        if t < 0:
            raise InvalidTimeError(f"time must be non-negative, got {t}")
        return self.velocity * t
