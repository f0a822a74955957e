"""Positively homogeneous matrix-valued terms on the cosphere bundle.

A term of degree d is stored by its samples on (base grid) x (direction
nodes); the value at a general nonzero covector xi is

    f(x, xi) = |xi|^d * f(x, xi / |xi|),

so homogeneity holds by construction.  Covariable derivatives are computed
in the direction/radius splitting:

  n = 1:  d/dxi (|xi|^d c_s) = d |xi|^(d-1) sgn(xi) c_s, i.e. samples
          become d * f(s) * s at s = +-1;
  n = 2:  with f = |xi|^d g(theta),
          d/dxi1 f = |xi|^(d-1) (d cos(theta) g - sin(theta) g'),
          d/dxi2 f = |xi|^(d-1) (d sin(theta) g + cos(theta) g'),
          where g' is the spectral theta-derivative.

Base-variable derivatives are spectral along the periodic axes.  All
operations return new terms; sample arrays are frozen after construction.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, GridMismatchError
from .manifold import ModelManifold
from .spectral import fourier_diff, trig_interp


class HomogeneousTerm:
    """Matrix-valued function on (base point, covector), homogeneous of an
    integer degree in the covector."""

    __slots__ = ("manifold", "degree", "samples")

    def __init__(self, manifold: ModelManifold, degree: int, samples: np.ndarray):
        samples = np.asarray(samples, dtype=complex)
        m = samples.shape[-1]
        expected = manifold.sample_shape + (m, m)
        if samples.shape != expected:
            raise GridMismatchError(
                f"sample shape {samples.shape} != expected {expected}"
            )
        if not np.all(np.isfinite(samples)):
            raise DomainError("samples contain non-finite entries")
        samples = samples.copy()
        samples.setflags(write=False)
        self.manifold = manifold
        self.degree = int(degree)
        self.samples = samples

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, manifold: ModelManifold, degree: int, m: int) -> "HomogeneousTerm":
        return cls(manifold, degree, np.zeros(manifold.sample_shape + (m, m), complex))

    @classmethod
    def constant(cls, manifold: ModelManifold, degree: int, matrix) -> "HomogeneousTerm":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        s = np.broadcast_to(matrix, manifold.sample_shape + matrix.shape)
        return cls(manifold, degree, np.array(s))

    @classmethod
    def from_scalar(cls, manifold: ModelManifold, degree: int, field: np.ndarray) -> "HomogeneousTerm":
        """Wrap a scalar sample field (base grid x directions) as a 1x1 term."""
        field = np.asarray(field, dtype=complex)
        if field.shape != manifold.sample_shape:
            raise GridMismatchError(
                f"scalar field shape {field.shape} != {manifold.sample_shape}"
            )
        return cls(manifold, degree, field[..., None, None])

    # -- basic properties --------------------------------------------------

    @property
    def m(self) -> int:
        return self.samples.shape[-1]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def _check_compatible(self, other: "HomogeneousTerm"):
        if self.manifold != other.manifold or self.m != other.m:
            raise GridMismatchError("terms live on different grids or fibers")

    # -- evaluation --------------------------------------------------------

    def evaluate(self, x, xi) -> np.ndarray:
        """Value at base point `x` and nonzero covector `xi`.

        Off-grid base points are evaluated by trigonometric interpolation;
        for n = 2 the direction is interpolated trigonometricaly in the
        angle.  xi = 0 raises DomainError.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.shape != (self.manifold.n,):
            raise DomainError(f"covector must have {self.manifold.n} components")
        r = float(np.hypot(*xi)) if self.manifold.n == 2 else float(abs(xi[0]))
        if r == 0.0:
            raise DomainError("homogeneous terms are undefined at xi = 0")

        a = self.samples
        x = np.atleast_1d(np.asarray(x, dtype=float))
        for axis in range(self.manifold.n):
            t = float(np.mod(x[axis], 2.0 * np.pi))
            j = t / self.manifold.dx
            if abs(j - round(j)) < 1e-12:  # on-grid: take the sample row
                a = np.take(a, int(round(j)) % self.manifold.N, axis=0)
            else:
                a = trig_interp(np.moveaxis(a, 0, -1), -1, t)

        if self.manifold.n == 1:
            a = a[0] if xi[0] > 0 else a[1]
        else:
            th = float(np.arctan2(xi[1], xi[0]) % (2.0 * np.pi))
            j = th / (2.0 * np.pi / self.manifold.K)
            if abs(j - round(j)) < 1e-12:
                a = np.take(a, int(round(j)) % self.manifold.K, axis=0)
            else:
                a = trig_interp(np.moveaxis(a, 0, -1), -1, th)
        return r**self.degree * a

    # -- derivatives -------------------------------------------------------

    def diff_x(self, axis: int) -> "HomogeneousTerm":
        """Spectral derivative along a periodic base axis; degree unchanged."""
        if not 0 <= axis < self.manifold.n:
            raise DomainError(f"axis {axis} out of range for n={self.manifold.n}")
        return HomogeneousTerm(
            self.manifold, self.degree, fourier_diff(self.samples, axis)
        )

    def diff_xi(self, axis: int) -> "HomogeneousTerm":
        """Covariable derivative; degree drops by one."""
        if not 0 <= axis < self.manifold.n:
            raise DomainError(f"axis {axis} out of range for n={self.manifold.n}")
        d = self.degree
        if self.manifold.n == 1:
            sgn = np.array([1.0, -1.0]).reshape((1, 2, 1, 1))
            return HomogeneousTerm(self.manifold, d - 1, d * self.samples * sgn)
        th = self.manifold.theta.reshape((1, 1, self.manifold.K, 1, 1))
        g = self.samples
        gp = fourier_diff(g, axis=2)
        if axis == 0:
            out = d * np.cos(th) * g - np.sin(th) * gp
        else:
            out = d * np.sin(th) * g + np.cos(th) * gp
        return HomogeneousTerm(self.manifold, d - 1, out)

    # -- pointwise algebra -------------------------------------------------

    def __add__(self, other: "HomogeneousTerm") -> "HomogeneousTerm":
        self._check_compatible(other)
        if self.degree != other.degree:
            raise DomainError("cannot add terms of different degrees")
        return HomogeneousTerm(self.manifold, self.degree, self.samples + other.samples)

    def __sub__(self, other: "HomogeneousTerm") -> "HomogeneousTerm":
        return self + (other * (-1.0))

    def __mul__(self, scalar) -> "HomogeneousTerm":
        return HomogeneousTerm(self.manifold, self.degree, self.samples * scalar)

    __rmul__ = __mul__

    def matmul(self, other: "HomogeneousTerm") -> "HomogeneousTerm":
        """Pointwise matrix product; degrees add."""
        self._check_compatible(other)
        return HomogeneousTerm(
            self.manifold,
            self.degree + other.degree,
            np.matmul(self.samples, other.samples),
        )

    def trace_field(self) -> np.ndarray:
        """Pointwise matrix trace, shape = manifold.sample_shape."""
        return np.trace(self.samples, axis1=-2, axis2=-1)
