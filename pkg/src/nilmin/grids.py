"""Rectangular domain grids shared by sampling, integration and detection."""
from __future__ import annotations

import numpy as np

__all__ = ["GridSpec"]


class GridSpec:
    """A uniform nx-by-ny grid on [x_min, x_max] x [y_min, y_max].

    base is the (x, y) point all integration paths start from; it is
    snapped to the nearest grid node.
    """

    def __init__(self, x_min, x_max, y_min, y_max, nx, ny, base=None):
        if nx < 2 or ny < 2:
            raise ValueError("nx and ny must be at least 2")
        if not (x_max > x_min and y_max > y_min):
            raise ValueError("empty grid ranges")
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.y_min = float(y_min)
        self.y_max = float(y_max)
        self.nx = int(nx)
        self.ny = int(ny)
        self.xs = np.linspace(self.x_min, self.x_max, self.nx)
        self.ys = np.linspace(self.y_min, self.y_max, self.ny)
        self.dx = self.xs[1] - self.xs[0]
        self.dy = self.ys[1] - self.ys[0]
        if base is None:
            base = (0.5 * (x_min + x_max), 0.5 * (y_min + y_max))
        self.base_i = int(np.argmin(np.abs(self.xs - base[0])))
        self.base_j = int(np.argmin(np.abs(self.ys - base[1])))

    @property
    def base(self):
        return (self.xs[self.base_i], self.ys[self.base_j])

    def nodes(self):
        """Yield (i, j, x, y) in row-major (j outer) order."""
        for j, y in enumerate(self.ys):
            for i, x in enumerate(self.xs):
                yield i, j, x, y

    def __repr__(self):
        return (
            f"GridSpec(x=[{self.x_min}, {self.x_max}], y=[{self.y_min}, {self.y_max}], "
            f"nx={self.nx}, ny={self.ny}, base={self.base})"
        )
