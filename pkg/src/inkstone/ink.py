"""Ink concentration field and its explicit diffusion update.

The field T holds ink concentration in [0, 1] on a regular grid. Each step
applies one explicit Euler update of

    T' = T + dt * (alpha * lap(T) + beta * S * (1 - T))

with a 5-point Laplacian, zero-flux boundaries (edge cells mirror their
neighbor, so diffusion never leaks mass off the grid), and a forcing grid S
in [0, 1] that feeds ink where the noise field is dark. The (1 - T) factor
saturates deposition as cells fill.

Explicit Euler is only stable while alpha * dt / dx^2 <= 1/4; that bound is
checked when a field is built and again on every step, and violating it
raises UnstableStepError instead of producing the checkerboard blow-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from PIL import Image

from .noise import NoiseField

STABILITY_BOUND = 0.25


class UnstableStepError(ValueError):
    """Diffusion parameters exceed the explicit-step stability bound."""

    def __init__(self, number: float) -> None:
        super().__init__(
            f"stability number alpha*dt/dx^2 = {number:.6g} exceeds {STABILITY_BOUND}"
        )
        self.number = number


def laplacian(T: np.ndarray, dx: float) -> np.ndarray:
    """5-point Laplacian with zero-flux (edge-mirrored) boundaries."""
    P = np.pad(T, 1, mode="edge")
    lap = (
        P[:-2, 1:-1] + P[2:, 1:-1] + P[1:-1, :-2] + P[1:-1, 2:] - 4.0 * T
    )
    lap /= dx * dx
    return lap


@dataclass
class InkField:
    """Grid of ink concentration plus the diffusion parameters."""

    width: int = 256
    height: int = 256
    alpha: float = 1e-4
    beta: float = 0.35
    dt: float = 1.0 / 30.0
    dx: float = 0.0  # 0 means 1/width
    forcing_mode: str = "noise"
    T: np.ndarray = dc_field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.width}x{self.height}")
        if self.forcing_mode not in ("noise", "laplacian"):
            raise ValueError(f"unknown forcing_mode {self.forcing_mode!r}")
        if self.dx == 0.0:
            self.dx = 1.0 / self.width
        if self.T is None:
            self.T = np.zeros((self.height, self.width), dtype=np.float64)
        else:
            self.T = np.asarray(self.T, dtype=np.float64)
            if self.T.shape != (self.height, self.width):
                raise ValueError(
                    f"field shape {self.T.shape} != ({self.height}, {self.width})"
                )
        self._check_stability()

    def _check_stability(self) -> float:
        number = self.alpha * self.dt / (self.dx * self.dx)
        if number > STABILITY_BOUND:
            raise UnstableStepError(number)
        return number

    def xs(self) -> np.ndarray:
        """Normalized x coordinates of the pixel centers."""
        return (np.arange(self.width) + 0.5) / self.width

    def ys(self) -> np.ndarray:
        """Normalized y coordinates of the pixel centers."""
        return (np.arange(self.height) + 0.5) / self.height

    def forcing_grid(self, noise: NoiseField, z: float) -> np.ndarray:
        """Forcing S in [0, 1] sampled from the noise field at offset z.

        Mode "noise" feeds the field value itself; mode "laplacian" feeds
        the clamped Laplacian of the sampled field, which concentrates ink
        where the noise curves upward.
        """
        grid = noise.sample_grid(self.xs(), self.ys(), z)
        if self.forcing_mode == "noise":
            return grid
        lap = laplacian(grid, self.dx)
        np.clip(lap, 0.0, 1.0, out=lap)
        return lap

    def step(self, forcing: np.ndarray | None = None) -> "InkField":
        """One explicit Euler update; returns the advanced field."""
        self._check_stability()
        new_T = self.T + self.dt * self.alpha * laplacian(self.T, self.dx)
        if forcing is not None and self.beta != 0.0:
            S = np.asarray(forcing, dtype=np.float64)
            if S.shape != self.T.shape:
                raise ValueError(f"forcing shape {S.shape} != field shape {self.T.shape}")
            new_T += self.dt * self.beta * S * (1.0 - self.T)
        np.clip(new_T, 0.0, 1.0, out=new_T)
        return InkField(
            width=self.width, height=self.height, alpha=self.alpha, beta=self.beta,
            dt=self.dt, dx=self.dx, forcing_mode=self.forcing_mode, T=new_T,
        )

    def deposit(self, x: float, y: float, strength: float, radius: float) -> None:
        """Splat a Gaussian blob of ink at normalized position (x, y).

        ``radius`` is the blob's support in normalized units; the Gaussian
        sigma is half of it. Mutates the field in place and clamps to 1.
        """
        if radius <= 0 or strength <= 0:
            return
        px = x * self.width - 0.5
        py = y * self.height - 0.5
        r_px = radius * self.width
        x_lo = max(0, int(np.floor(px - r_px)))
        x_hi = min(self.width - 1, int(np.ceil(px + r_px)))
        y_lo = max(0, int(np.floor(py - r_px)))
        y_hi = min(self.height - 1, int(np.ceil(py + r_px)))
        if x_lo > x_hi or y_lo > y_hi:
            return
        gx = np.arange(x_lo, x_hi + 1)
        gy = np.arange(y_lo, y_hi + 1)
        dx2 = (gx - px) ** 2
        dy2 = (gy - py) ** 2
        d2 = dy2[:, None] + dx2[None, :]
        sigma = r_px / 2.0
        blob = strength * np.exp(-d2 / (2.0 * sigma * sigma))
        blob[d2 > r_px * r_px] = 0.0
        patch = self.T[y_lo:y_hi + 1, x_lo:x_hi + 1]
        np.clip(patch + blob, 0.0, 1.0, out=patch)

    def mass(self) -> float:
        """Total ink on the grid."""
        return float(self.T.sum())

    def to_image(self) -> Image.Image:
        """8-bit grayscale render, full ink black on a white page."""
        levels = np.round((1.0 - self.T) * 255.0).astype(np.uint8)
        return Image.fromarray(levels, mode="L")

    def grid_hash(self) -> str:
        """Hex digest of the raw field bytes, for determinism checks."""
        import hashlib
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.T).tobytes())
        return h.hexdigest()
