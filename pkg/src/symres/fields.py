"""Idempotent symbol fields: degree-zero idempotent data that is a constant
idempotent matrix outside a compact subset of the interior of X.

A field is produced from a constant idempotent beta, a band-limited
perturbation V(x, omega) and a cutoff profile: the pointwise matrices
beta + bump(x) V(x, omega) are refined to exact idempotents by the Riesz
holomorphic-calculus integral around the eigenvalue cluster at 1,

    ptilde = (1 / 2 pi i) oint_{|z - 1| = 1/2} (z - A)^{-1} dz,

evaluated by the trapezoid rule on the circle.  Where bump vanishes the
field is set to beta exactly (there the integral equals beta identically,
so only quadrature noise is removed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridMismatchError, MarginError, SpectralGapError
from .manifold import ModelManifold
from .symbols import ClassicalSymbol
from .terms import HomogeneousTerm

#: relative level below which a cutoff profile is snapped to exact zero
SNAP_LEVEL = 1e-13

#: refusal threshold: distance of the spectrum to the line Re z = 1/2
GAP_THRESHOLD = 0.1


def gaussian_bump(manifold: ModelManifold, margin_cells: int = 3,
                  amplitude: float = 1.0, snap: float = SNAP_LEVEL) -> np.ndarray:
    """Smooth cutoff on the base grid, supported inside X with the given
    margin (in grid cells) to the boundary of X.

    The profile is a Gaussian in the normal coordinate, centered at pi/2,
    with width chosen so it falls below `snap` exactly at the allowed
    support edge; samples below snap * amplitude are set to exact zero.
    For n = 2 the profile depends on x2 only (x1 wraps around X).
    """
    if margin_cells < 2:
        raise DomainError("margin must be at least 2 grid cells")
    half = np.pi / 2 - margin_cells * manifold.dx
    if half <= 0:
        raise DomainError("margin leaves no room for a bump inside X")
    sigma = half / np.sqrt(2.0 * np.log(1.0 / snap))
    t = manifold.x - np.pi / 2
    prof = amplitude * np.exp(-0.5 * (t / sigma) ** 2)
    prof[np.abs(t) >= half] = 0.0
    prof[prof < snap * amplitude] = 0.0
    if manifold.n == 1:
        return prof
    return np.broadcast_to(prof[None, :], manifold.base_shape).copy()


def random_bandlimited_field(manifold: ModelManifold, m: int, bandwidth: int,
                             seed: int, theta_bandwidth: int = 1) -> np.ndarray:
    """Random band-limited matrix field on (base grid) x (directions).

    Complex Fourier coefficients for base frequencies |k| <= bandwidth (and
    direction frequencies |j| <= theta_bandwidth for n = 2) are drawn from
    the seeded generator; the field is normalized to unit maximal entry.
    """
    rng = np.random.default_rng(seed)
    shape = manifold.sample_shape + (m, m)
    coef = np.zeros(shape, complex)

    def band(npts: int, width: int) -> np.ndarray:
        k = np.abs(np.fft.fftfreq(npts, d=1.0 / npts))
        return k <= width

    sel = band(manifold.N, bandwidth)
    if manifold.n == 1:
        mask = sel[:, None, None, None] & np.ones((1, 2, 1, 1), bool)
    else:
        sel_t = band(manifold.K, theta_bandwidth)
        mask = (sel[:, None, None, None, None]
                & sel[None, :, None, None, None]
                & sel_t[None, None, :, None, None])
        mask = mask & np.ones((1, 1, 1, 1, 1), bool)
    idx = np.broadcast_to(mask, shape)
    vals = rng.standard_normal(int(idx.sum())) + 1j * rng.standard_normal(int(idx.sum()))
    coef[idx] = vals
    axes = tuple(range(manifold.n)) + ((manifold.n,) if manifold.n == 2 else ())
    field = coef
    for ax in axes:
        field = np.fft.ifft(field, axis=ax) * field.shape[ax]
    peak = np.max(np.abs(field))
    return field / peak if peak > 0 else field


def block_nilpotent_field(manifold: ModelManifold, m: int = 2, rank: int = 1,
                          eps: float = 0.2, bandwidth: int = 2,
                          theta_bandwidth: int = 1, margin_cells: int = 3,
                          seed: int = 7) -> "IdempotentSymbolField":
    """Seeded rank-`rank` field recipe used by the bundled scenarios.

    beta is the diagonal idempotent of the given rank and the perturbation
    sits in the upper-right block, so beta V = V, V beta = 0 and V^2 = 0;
    the perturbed matrices are idempotent pointwise without refinement.
    Every product in the projection pipeline then carries at most one
    base-varying factor, which keeps the spectral calculus alias-free at
    desk-scale grids (this is the family behind the paper-level checks).
    """
    if not 1 <= rank < m:
        raise DomainError(f"need 1 <= rank < m, got rank={rank}, m={m}")
    beta = np.zeros((m, m), complex)
    beta[np.arange(rank), np.arange(rank)] = 1.0
    raw = random_bandlimited_field(manifold, m, bandwidth, seed,
                                   theta_bandwidth=theta_bandwidth)
    V = np.zeros_like(raw)
    V[..., :rank, rank:] = raw[..., :rank, rank:]
    bump = gaussian_bump(manifold, margin_cells=margin_cells, amplitude=eps)
    return make_idempotent_field(beta, V, bump, manifold)


def generic_field(manifold: ModelManifold, m: int = 2, eps: float = 0.2,
                  bandwidth: int = 2, theta_bandwidth: int = 1,
                  margin_cells: int = 3, seed: int = 7) -> "IdempotentSymbolField":
    """Seeded full-matrix perturbation; exercises the Riesz refinement path."""
    beta = np.zeros((m, m), complex)
    beta[0, 0] = 1.0
    V = random_bandlimited_field(manifold, m, bandwidth, seed,
                                 theta_bandwidth=theta_bandwidth)
    bump = gaussian_bump(manifold, margin_cells=margin_cells, amplitude=eps)
    return make_idempotent_field(beta, V, bump, manifold)


def riesz_refine(A: np.ndarray, center: float = 1.0, radius: float = 0.5,
                 nodes: int = 64) -> np.ndarray:
    """Riesz projection of a stack of matrices onto the eigenvalue cluster
    inside the circle |z - center| = radius (trapezoid quadrature)."""
    m = A.shape[-1]
    eye = np.eye(m)
    phi = 2.0 * np.pi * np.arange(nodes) / nodes
    out = np.zeros_like(A)
    for f in np.exp(1j * phi):
        lam = center + radius * f
        out += (radius / nodes) * f * np.linalg.inv(lam * eye - A)
    return out


@dataclass(frozen=True)
class IdempotentSymbolField:
    """Exactly idempotent degree-zero field, constant beta off its support."""

    manifold: ModelManifold
    beta: np.ndarray
    ptilde: HomogeneousTerm
    support: np.ndarray        # boolean base-grid mask of supp(ptilde - beta)
    margin: int                # grid cells between support and boundary of X

    @property
    def m(self) -> int:
        return self.beta.shape[0]

    def as_symbol(self) -> ClassicalSymbol:
        return ClassicalSymbol(self.manifold, 0, [self.ptilde])


def make_idempotent_field(beta: np.ndarray, V: np.ndarray, bump: np.ndarray,
                          manifold: ModelManifold, nodes: int = 64,
                          idem_tol: float = 1e-12) -> IdempotentSymbolField:
    """Build an idempotent field from beta + bump * V by Riesz refinement.

    Preconditions: beta idempotent; bump supported inside X with margin
    >= 2 cells; the pointwise spectrum of beta + bump V stays clear of the
    line Re z = 1/2 (distance >= 0.1) and of the refinement circle.
    """
    beta = np.asarray(beta, dtype=complex)
    m = beta.shape[0]
    if np.max(np.abs(beta @ beta - beta)) > 1e-12:
        raise DomainError("beta is not idempotent")
    if bump.shape != manifold.base_shape:
        raise GridMismatchError("bump must be sampled on the base grid")
    if V.shape != manifold.sample_shape + (m, m):
        raise GridMismatchError("V must be sampled on (base grid) x directions")

    support = bump != 0.0
    margin = manifold.margin_cells(support)
    if margin < 2:
        raise MarginError(
            f"support margin {margin} cells < 2 (boundary of X too close)"
        )

    bump_s = bump[..., None, None, None]  # broadcast over direction + matrix axes
    A = beta + bump_s * V

    if np.max(np.abs(np.matmul(A, A) - A)) <= 1e-13:
        # already idempotent (e.g. a block-nilpotent perturbation): the Riesz
        # integral would return A itself, so skip it and keep the samples exact
        ptil = A.copy()
        ptil[~support] = beta
        term = HomogeneousTerm(manifold, 0, ptil)
        return IdempotentSymbolField(manifold, beta, term, support, margin)

    ev = np.linalg.eigvals(A)
    gap = np.min(np.abs(ev.real - 0.5))
    if gap < GAP_THRESHOLD:
        where = np.unravel_index(
            int(np.argmin(np.min(np.abs(ev.real - 0.5), axis=-1))), A.shape[:-2]
        )
        raise SpectralGapError(
            f"spectrum within {gap:.3g} of Re z = 1/2 at grid point {where}",
            where=where, gap=float(gap),
        )
    ring = np.min(np.abs(np.abs(ev - 1.0) - 0.5))
    if ring < 0.1:
        where = np.unravel_index(
            int(np.argmin(np.min(np.abs(np.abs(ev - 1.0) - 0.5), axis=-1))),
            A.shape[:-2],
        )
        raise SpectralGapError(
            f"eigenvalue within {ring:.3g} of the refinement circle at {where}",
            where=where, gap=float(ring),
        )

    ptil = riesz_refine(A, nodes=nodes)
    ptil[~support] = beta  # exact off the support (removes quadrature noise)

    defect = np.max(np.abs(np.matmul(ptil, ptil) - ptil))
    if defect > idem_tol:
        raise DomainError(f"refined field not idempotent: defect {defect:.3g}")

    term = HomogeneousTerm(manifold, 0, ptil)
    return IdempotentSymbolField(manifold, beta, term, support, margin)
