"""Sampling grids and indicator fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SamplingGrid:
    """Rectangular sampling lattice with fixed spacing (default 0.05)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    spacing: float = 0.05

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("spacing must be > 0")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("grid bounds must be increasing")

    @staticmethod
    def square(center, halfwidth: float, spacing: float = 0.05) -> "SamplingGrid":
        cx, cy = float(center[0]), float(center[1])
        return SamplingGrid(cx - halfwidth, cx + halfwidth,
                            cy - halfwidth, cy + halfwidth, spacing)

    @property
    def xs(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.spacing)) + 1
        return self.x_min + self.spacing * np.arange(n)

    @property
    def ys(self) -> np.ndarray:
        n = int(round((self.y_max - self.y_min) / self.spacing)) + 1
        return self.y_min + self.spacing * np.arange(n)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.ys), len(self.xs))

    def points(self) -> np.ndarray:
        """All grid points, shape (ny, nx, 2); value[i, j] sits at (xs[j], ys[i])."""
        xx, yy = np.meshgrid(self.xs, self.ys)
        return np.stack([xx, yy], axis=-1)


@dataclass(frozen=True)
class IndicatorField:
    """Real indicator values over a grid, with provenance."""

    grid: SamplingGrid
    values: np.ndarray
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("indicator values must be finite")

    def max_position(self) -> np.ndarray:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return np.array([self.grid.xs[j], self.grid.ys[i]])

    def top_fraction_points(self, fraction: float) -> np.ndarray:
        """Grid points carrying the top ``fraction`` of values, shape (k, 2)."""
        flat = self.values.ravel()
        k = max(1, int(round(fraction * flat.size)))
        idx = np.argpartition(flat, -k)[-k:]
        ii, jj = np.unravel_index(idx, self.values.shape)
        return np.stack([self.grid.xs[jj], self.grid.ys[ii]], axis=-1)

    def local_maxima(self, min_separation: float) -> list[np.ndarray]:
        """Strict local maxima sorted by value, greedily thinned so returned
        peaks are at least ``min_separation`` apart."""
        v = self.values
        interior = v[1:-1, 1:-1]
        mask = ((interior > v[:-2, 1:-1]) & (interior > v[2:, 1:-1])
                & (interior > v[1:-1, :-2]) & (interior > v[1:-1, 2:]))
        ii, jj = np.nonzero(mask)
        ii, jj = ii + 1, jj + 1
        order = np.argsort(v[ii, jj])[::-1]
        picked: list[np.ndarray] = []
        for k in order:
            p = np.array([self.grid.xs[jj[k]], self.grid.ys[ii[k]]])
            if all(np.linalg.norm(p - o) >= min_separation for o in picked):
                picked.append(p)
        return picked
