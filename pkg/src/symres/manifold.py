"""Flat model manifolds: the circle S^1 and the square torus T^2.

The closed manifold is the circle of circumference 2*pi (n = 1) or the
torus [0, 2*pi)^2 (n = 2).  The embedded compact piece X with boundary is
the arc x in [0, pi] for n = 1 and the cylinder x2 in [0, pi] for n = 2
(x1 wraps all the way around).  Base grids are uniform periodic with N
points per axis; cosphere directions are the two points {+1, -1} for
n = 1 and K equispaced angles for n = 2.

Grid membership of X uses the one-sided convention: grid points that land
exactly on the boundary belong to X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, UnsupportedDimensionError

TWO_PI = 2.0 * np.pi


def _is_pow2(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class ModelManifold:
    """Discretized model manifold.

    Parameters
    ----------
    n : 1 or 2, dimension of the closed manifold.
    N : base grid resolution per axis (power of two, >= 8).
    K : direction grid resolution for n = 2 (power of two, >= 8).
        Ignored for n = 1, where the cosphere is the two-point set.
    """

    n: int
    N: int
    K: int = 8

    def __post_init__(self):
        if self.n not in (1, 2):
            raise UnsupportedDimensionError(f"dimension must be 1 or 2, got {self.n}")
        if not (_is_pow2(self.N) and self.N >= 8):
            raise DomainError(f"N must be a power of two >= 8, got {self.N}")
        if self.n == 2 and not (_is_pow2(self.K) and self.K >= 8):
            raise DomainError(f"K must be a power of two >= 8, got {self.K}")

    @property
    def ndir(self) -> int:
        """Number of cosphere direction nodes."""
        return 2 if self.n == 1 else self.K

    @property
    def base_shape(self) -> tuple[int, ...]:
        return (self.N,) if self.n == 1 else (self.N, self.N)

    @property
    def sample_shape(self) -> tuple[int, ...]:
        """Shape of a scalar sample field: base grid axes then direction axis."""
        return self.base_shape + (self.ndir,)

    @property
    def dx(self) -> float:
        return TWO_PI / self.N

    @cached_property
    def x(self) -> np.ndarray:
        """Grid coordinates along one base axis."""
        return np.arange(self.N) * self.dx

    @cached_property
    def theta(self) -> np.ndarray:
        """Direction angles (n = 2 only)."""
        if self.n != 2:
            raise UnsupportedDimensionError("theta grid exists only for n = 2")
        return np.arange(self.K) * (TWO_PI / self.K)

    @cached_property
    def directions(self) -> np.ndarray:
        """Unit covectors at the direction nodes, shape (ndir, n)."""
        if self.n == 1:
            return np.array([[1.0], [-1.0]])
        th = self.theta
        return np.stack([np.cos(th), np.sin(th)], axis=1)

    @cached_property
    def mask_X(self) -> np.ndarray:
        """Boolean base-grid mask of the compact piece X (boundary included)."""
        inside = self.x <= np.pi + 1e-12
        if self.n == 1:
            return inside
        return np.broadcast_to(inside[None, :], (self.N, self.N)).copy()

    @cached_property
    def interior_indices(self) -> np.ndarray:
        """Indices (along the normal axis) of grid points strictly inside X."""
        return np.nonzero((self.x > 1e-12) & (self.x < np.pi - 1e-12))[0]

    @property
    def boundary_indices(self) -> tuple[int, int]:
        """Grid indices of the two boundary points/circles: x = 0 and x = pi."""
        return 0, self.N // 2

    def margin_cells(self, support: np.ndarray) -> int:
        """Distance, in grid cells along the normal axis, from a support mask
        to the boundary of X.  `support` is a boolean base-grid mask.

        Returns a large sentinel if the support is empty.  A support touching
        the complement of X (or the boundary itself) has margin <= 0.
        """
        if support.shape != self.base_shape:
            raise DomainError("support mask has wrong shape")
        if not support.any():
            return self.N
        # normal axis is the only axis for n=1, axis 1 (x2) for n=2
        axis_hits = np.nonzero(support.any(axis=0) if self.n == 2 else support)[0]
        b0, b1 = self.boundary_indices
        lo = int(axis_hits.min())
        hi = int(axis_hits.max())
        if hi >= b1:  # leaked to x >= pi
            return b1 - hi
        return min(lo - b0, b1 - hi)

    def __str__(self) -> str:  # used in reports
        if self.n == 1:
            return f"S1(N={self.N})"
        return f"T2(N={self.N},K={self.K})"
