"""The noncommutative residue for Green-operator symbol data.

For a classical symbol p on the closed model manifold the interior part is

    res(p) = int_X int_{S*_x X} tr p_{-n}(x, xi) dS(xi) / (2 pi)^n dx,

with the n = 1 cosphere integral the plain two-point sum and the n = 2 one
the K-node trapezoid (both exact for the data classes used here).  Boundary
contributions: the boundary pseudodifferential term integrates tr s_{1-n}
over the boundary cospheres against the surface measure / (2 pi)^{n-1},
and a supplied singular Green symbol-kernel enters through its normal
trace

    tr_n g (x', xi') = (1/2pi) int_R ktilde(x', xi', xi_n, xi_n) dxi_n,

the diagonal-integral convention of the boundary calculus; this is the one
spot where an external convention enters and it is fixed here once.

Integration over X versus all of the closed manifold is a masked summation
over the same array in the same reduction order, so the two results are
bit-identical whenever the degree-(-n) term vanishes off X.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DecayError, DomainError, GridMismatchError,
                     QuadratureError, TruncationOrderError,
                     UnsupportedDimensionError)
from .manifold import ModelManifold
from .symbols import ClassicalSymbol, compose, subtract


@dataclass(frozen=True)
class SingularGreenSymbolSample:
    """One boundary sample of a singular Green symbol-kernel.

    `kernel` is the scalar or matrix diagonal symbol-kernel xi_n |->
    ktilde(x', xi', xi_n, xi_n) at the boundary point; `decay` is the
    declared rate rho > 1 with |k| <= C (1 + |xi_n|)^(-rho); `degree` tags
    the homogeneity of the normal-traced part (only degree 1 - n enters
    the residue).
    """

    boundary: int              # 0: x = 0 circle/point, 1: x = pi
    x_index: int               # grid index along the boundary circle (n = 2)
    xi_prime: int              # +1 or -1
    kernel: Callable[[float], complex | np.ndarray]
    decay: float
    degree: int

    def check_decay(self):
        if self.decay <= 1.0:
            raise DecayError(f"declared decay {self.decay} must exceed 1")
        lo = max(_kernel_mag(self.kernel, 1e2), _kernel_mag(self.kernel, -1e2))
        hi = max(_kernel_mag(self.kernel, 1e3), _kernel_mag(self.kernel, -1e3))
        bound = lo * 10.0 ** (-(self.decay - 0.5))
        if hi > bound:
            raise DecayError(
                f"kernel decays too slowly for rho={self.decay}: "
                f"|k(1e3)|={hi:.3g} > {bound:.3g}"
            )


def _kernel_mag(kernel, x: float) -> float:
    return float(np.max(np.abs(np.asarray(kernel(x)))))


@dataclass(frozen=True)
class ResidueReport:
    """Assembled residue with its exact bookkeeping."""

    interior: complex
    boundary_green: complex
    boundary_psdo: complex
    total: complex
    err_estimate: float
    norm_interior: float       # (2 pi)^n
    norm_boundary: float       # (2 pi)^(n-1)

    def to_record(self) -> str:
        lines = [
            f"interior = {_fmt(self.interior)}",
            f"boundary_green = {_fmt(self.boundary_green)}",
            f"boundary_psdo = {_fmt(self.boundary_psdo)}",
            f"total = {_fmt(self.total)}",
            f"err_estimate = {self.err_estimate:.17g}",
        ]
        return "\n".join(lines)


def _fmt(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


# -- interior term ------------------------------------------------------------


def residue_interior(p: ClassicalSymbol, manifold: ModelManifold | None = None,
                     over_X: bool = True) -> complex:
    """Integral of tr p_{-n} over (X or the closed manifold) x cosphere.

    Exact trapezoid on the periodic grids; `over_X` masks the base-grid
    summation to X without changing the reduction order.
    """
    man = manifold or p.manifold
    if manifold is not None and manifold != p.manifold:
        raise GridMismatchError("symbol lives on a different manifold")
    t = p.term(-man.n)
    if t is None:
        return 0.0 + 0.0j
    tr = t.trace_field()
    if over_X:
        mask = man.mask_X.astype(float)
        tr = tr * mask[..., None]
    if man.n == 1:
        return complex(np.sum(tr) / man.N)
    return complex(np.sum(tr) * (2.0 * np.pi / man.K) / man.N**2)


# -- boundary terms ------------------------------------------------------------


def residue_boundary_psdo(s_parts: Sequence[ClassicalSymbol],
                          manifold: ModelManifold) -> complex:
    """Boundary pseudodifferential term: sum over the boundary circles of
    int sum_{xi'} tr s_{-1}(x', xi') / (2 pi) dx'.

    Only defined for n = 2; the n = 1 boundary cosphere is degenerate and
    is refused rather than given an ad-hoc meaning.
    """
    if manifold.n != 2:
        raise UnsupportedDimensionError(
            "the boundary residue term needs a 1-dimensional boundary (n = 2)"
        )
    total = 0.0 + 0.0j
    for s in s_parts:
        if s.manifold.n != 1:
            raise GridMismatchError("boundary symbols live on circles (n = 1)")
        t = s.term(-1)
        if t is None:
            continue
        total += complex(np.sum(t.trace_field()) / s.manifold.N)
    return total


def normal_trace(gs: SingularGreenSymbolSample, tol: float = 1e-10,
                 max_doublings: int = 18, return_error: bool = False):
    """(1/2pi) int_R k(xi_n) dxi_n by the substitution xi_n = tan(u).

    The transformed integrand k(tan u) sec^2 u is pi-periodic in u for
    kernels with matching decay at +-infinity, so the equispaced (midpoint
    offset, avoiding the poles of tan) trapezoid converges spectrally;
    nodes are doubled until the relative change drops below `tol`.
    """
    gs.check_decay()
    n = 32
    prev = None
    err = np.inf
    while n <= 32 * 2**max_doublings:
        u = -np.pi / 2 + (np.arange(n) + 0.5) * (np.pi / n)
        xs = np.tan(u)
        vals = [np.asarray(gs.kernel(x), dtype=complex) * (1.0 + x * x) for x in xs]
        est = sum(vals) * (np.pi / n) / (2.0 * np.pi)
        if prev is not None:
            scale = max(float(np.max(np.abs(est))), 1e-30)
            err = float(np.max(np.abs(est - prev))) / scale
            if err < tol:
                val = est if est.ndim else complex(est)
                return (val, err) if return_error else val
        prev = est
        n *= 2
    raise QuadratureError(
        f"normal trace did not converge to {tol} (last change {err:.3g})"
    )


# -- assembly ------------------------------------------------------------------


def residue_green(p: ClassicalSymbol | None,
                  green: Sequence[SingularGreenSymbolSample] = (),
                  s_parts: Sequence[ClassicalSymbol] = (),
                  manifold: ModelManifold | None = None,
                  over_X: bool = True) -> ResidueReport:
    """Full residue of (truncated psdo, singular Green, boundary psdo) data.

    Missing slots contribute zero.  Green samples with degree != 1 - n drop
    out (only the degree-(1-n) part of the normal trace enters).
    """
    if manifold is None:
        if p is None:
            raise DomainError("need a manifold when no interior symbol is given")
        manifold = p.manifold
    n = manifold.n
    if n == 1 and (len(green) or len(s_parts)):
        raise UnsupportedDimensionError(
            "boundary contributions are refused for n = 1 (no boundary cosphere)"
        )

    interior = residue_interior(p, manifold, over_X=over_X) if p is not None else 0.0 + 0.0j

    bgreen = 0.0 + 0.0j
    err = 0.0
    for gs in green:
        if gs.degree != 1 - n:
            continue
        val, e = normal_trace(gs, return_error=True)
        err = max(err, e)
        tr = complex(np.trace(np.atleast_2d(np.asarray(val))))
        # surface measure / (2 pi)^(n-1) over the boundary circle grid
        bgreen += tr / manifold.N

    bpsdo = residue_boundary_psdo(s_parts, manifold) if len(s_parts) else 0.0 + 0.0j

    total = interior + bgreen + bpsdo
    return ResidueReport(
        interior=complex(interior),
        boundary_green=complex(bgreen),
        boundary_psdo=complex(bpsdo),
        total=complex(total),
        err_estimate=err,
        norm_interior=(2.0 * np.pi) ** n,
        norm_boundary=(2.0 * np.pi) ** (n - 1),
    )


def residue_commutator(p: ClassicalSymbol, q: ClassicalSymbol,
                       order: int | None = None) -> complex:
    """Residue of p # q - q # p over the closed manifold; the trace property
    says this vanishes.

    The composition order must reach degree -n: order >= m_p + m_q + n.
    """
    n = p.manifold.n
    needed = p.leading_degree + q.leading_degree + n
    if order is None:
        order = needed
    if order < needed:
        raise TruncationOrderError(
            f"composition order {order} too small to assemble the degree "
            f"-{n} component; need order >= {needed}"
        )
    comm = subtract(compose(p, q, order), compose(q, p, order))
    return residue_interior(comm, p.manifold, over_X=False)
