"""Independent dense-matrix realization of operators on truncated Fourier
bases of the closed model manifold.

Left quantization: (Op(p) u)(x) = sum_{|xi| <= N_f} e^{i x.xi} p(x, xi) uhat(xi),
with the basis ordered lexicographically in (frequency, fiber).  At xi = 0,
where homogeneous terms are undefined, the symbol value is taken to be the
average of the cosphere direction samples; the discrepancy against any other
choice is a smoothing operator and affects no residue or principal-symbol
statement.

Truncation to X uses the critically sampled spatial grid of 2 N_f + 1 points
per axis, on which the frequency <-> space change of basis is unitary; the
truncation projector Q = U* diag(mask) U is then exactly idempotent and
truncating twice equals truncating once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import CutoffError, DomainError, GridMismatchError, SpectralGapError
from .manifold import ModelManifold
from .spectral import fourier_coefficients
from .symbols import ClassicalSymbol, base_bandwidth
from .terms import HomogeneousTerm


@dataclass(frozen=True)
class GridOperator:
    """Dense complex matrix on the truncated Fourier basis."""

    matrix: np.ndarray
    manifold: ModelManifold
    n_f: int
    m: int

    def __post_init__(self):
        n_modes = (2 * self.n_f + 1) ** self.manifold.n
        size = n_modes * self.m
        if self.matrix.shape != (size, size):
            raise GridMismatchError(
                f"matrix shape {self.matrix.shape} inconsistent with metadata "
                f"(expected {(size, size)})"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise DomainError("operator matrix has non-finite entries")

    def _check_compatible(self, other: "GridOperator"):
        if (self.manifold, self.n_f, self.m) != (other.manifold, other.n_f, other.m):
            raise GridMismatchError("operators live on different bases")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply_mode(self, k, fiber: int = 0) -> np.ndarray:
        """Image of the basis vector e^{i k x} e_fiber (column lookup)."""
        col = mode_index(self.manifold, self.n_f, k) * self.m + fiber
        return self.matrix[:, col]


def mode_frequencies(manifold: ModelManifold, n_f: int) -> np.ndarray:
    """Integer frequencies in basis order, shape (n_modes, n)."""
    ks = np.arange(-n_f, n_f + 1)
    if manifold.n == 1:
        return ks[:, None]
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    return np.stack([k1.ravel(), k2.ravel()], axis=1)


def mode_index(manifold: ModelManifold, n_f: int, k) -> int:
    k = np.atleast_1d(np.asarray(k, dtype=int))
    w = 2 * n_f + 1
    if manifold.n == 1:
        return int(k[0] + n_f)
    return int((k[0] + n_f) * w + (k[1] + n_f))


def _symbol_at_covector(p: ClassicalSymbol, k: np.ndarray) -> np.ndarray:
    """Symbol values on the base grid at an integer covector (vectorized)."""
    man = p.manifold
    if man.n == 1:
        r = abs(float(k[0]))
        if r == 0.0:
            return np.mean(sum(t.samples for t in p.terms), axis=-3)
        col = 0 if k[0] > 0 else 1
        out = sum(r**t.degree * t.samples[:, col] for t in p.terms)
        return out
    r = float(np.hypot(k[0], k[1]))
    if r == 0.0:
        return np.mean(sum(t.samples for t in p.terms), axis=-3)
    th = float(np.arctan2(k[1], k[0]) % (2.0 * np.pi))
    K = man.K
    j = th / (2.0 * np.pi / K)
    phase = None
    if abs(j - round(j)) < 1e-12:
        idx = int(round(j)) % K
        return sum(r**t.degree * t.samples[:, :, idx] for t in p.terms)
    kfreq = np.fft.fftfreq(K, d=1.0 / K)
    phase = np.exp(1j * kfreq * th)
    if K % 2 == 0:
        phase[K // 2] = np.cos(K // 2 * th)
    out = 0.0
    for t in p.terms:
        c = np.fft.fft(t.samples, axis=2) / K
        out = out + r**t.degree * np.einsum("xykab,k->xyab", c, phase)
    return out


def quantize(p: ClassicalSymbol, n_f: int) -> GridOperator:
    """Dense matrix of the left quantization of p with frequency cutoff n_f."""
    man = p.manifold
    bw = base_bandwidth(p)
    if bw > n_f:
        raise CutoffError(
            f"cutoff {n_f} too small for the symbol's base bandwidth {bw}"
        )
    freqs = mode_frequencies(man, n_f)
    n_modes, m, N = freqs.shape[0], p.m, man.N

    # Fourier coefficients of x -> p(x, k) for every retained covector k
    phat = np.empty((n_modes,) + man.base_shape + (m, m), complex)
    for i in range(n_modes):
        vals = _symbol_at_covector(p, freqs[i])
        for ax in range(man.n):
            vals = np.fft.fft(vals, axis=ax) / N
        phat[i] = vals

    if man.n == 1:
        s = freqs[:, 0][:, None] - freqs[:, 0][None, :]      # output l, input k
        valid = np.abs(s) <= N // 2 - 1
        kidx = np.broadcast_to(np.arange(n_modes)[None, :], s.shape)
        blocks = phat[kidx, np.mod(s, N)]    # blocks[l, k] = phat[k][(l-k) mod N]
        blocks[~valid] = 0.0
    else:
        s1 = freqs[:, 0][:, None] - freqs[:, 0][None, :]
        s2 = freqs[:, 1][:, None] - freqs[:, 1][None, :]
        valid = (np.abs(s1) <= N // 2 - 1) & (np.abs(s2) <= N // 2 - 1)
        kidx = np.broadcast_to(np.arange(n_modes)[None, :], s1.shape)
        blocks = phat[kidx, np.mod(s1, N), np.mod(s2, N)]
        blocks[~valid] = 0.0

    matrix = blocks.transpose(0, 2, 1, 3).reshape(n_modes * m, n_modes * m)
    return GridOperator(matrix, man, n_f, m)


# -- truncation ---------------------------------------------------------------


@dataclass(frozen=True)
class TruncationMask:
    """e+ r+ on the critically sampled spatial grid, as a dense projector."""

    manifold: ModelManifold
    n_f: int
    diag: np.ndarray           # 0/1 per scalar spatial point
    projector: np.ndarray      # U* diag(mask) U, fiber-expanded

    @classmethod
    def build(cls, manifold: ModelManifold, n_f: int, m: int) -> "TruncationMask":
        Ns = 2 * n_f + 1
        x = np.arange(Ns) * (2.0 * np.pi / Ns)
        ks = np.arange(-n_f, n_f + 1)
        U1 = np.exp(1j * np.outer(x, ks)) / np.sqrt(Ns)
        inside = (x <= np.pi + 1e-12).astype(float)
        if manifold.n == 1:
            U, mask = U1, inside
        else:
            U = np.kron(U1, U1)
            mask = np.kron(np.ones(Ns), inside)   # x2 is the inner (last) axis
        Q = (U.conj().T * mask) @ U
        Q = np.kron(Q, np.eye(m))
        return cls(manifold, n_f, mask, Q)


def truncate(A: GridOperator, mask: TruncationMask) -> GridOperator:
    """A+ = (e+ r+) A (e+ r+): zero out grid points outside X on both sides."""
    if (mask.manifold, mask.n_f) != (A.manifold, A.n_f):
        raise GridMismatchError("mask and operator live on different bases")
    Q = mask.projector
    return GridOperator(Q @ A.matrix @ Q, A.manifold, A.n_f, A.m)


def leftover(P: GridOperator, Q: GridOperator, mask: TruncationMask) -> GridOperator:
    """L(P, Q) = (PQ)+ - P+ Q+, the singular Green defect of truncation."""
    P._check_compatible(Q)
    PQ = GridOperator(P.matrix @ Q.matrix, P.manifold, P.n_f, P.m)
    lhs = truncate(PQ, mask).matrix
    rhs = truncate(P, mask).matrix @ truncate(Q, mask).matrix
    return GridOperator(lhs - rhs, P.manifold, P.n_f, P.m)


# -- matrix sectorial / Riesz projection --------------------------------------


def sectorial_projection_matrix(C: GridOperator, method: str = "eigen-split",
                                axis_tol: float = 1e-8,
                                contour_nodes: int = 64) -> GridOperator:
    """Spectral projection of C onto the right-half-plane invariant subspace.

    eigen-split: ordered complex Schur form plus a Sylvester solve for the
    oblique (non-orthogonal) spectral projector.  contour: Gauss-Legendre
    quadrature of (i/2pi) oint lambda^{-1} C (C - lambda)^{-1} dlambda over a
    closed rectangle enclosing exactly the Re > 0 spectrum.  Both refuse when
    an eigenvalue sits within axis_tol * max|spec| of the imaginary axis.
    """
    A = C.matrix
    ev = np.linalg.eigvals(A)
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    gap = float(np.min(np.abs(ev.real))) if ev.size else np.inf
    if scale == 0.0 or gap < axis_tol * scale:
        raise SpectralGapError(
            f"eigenvalue within {gap:.3g} of the imaginary axis "
            f"(tolerance {axis_tol * scale:.3g})", gap=gap,
        )

    if method == "eigen-split":
        T, Z, sdim = scipy.linalg.schur(A, output="complex",
                                        sort=lambda z: z.real > 0)
        if sdim == 0:
            P = np.zeros_like(A)
        elif sdim == A.shape[0]:
            P = np.eye(A.shape[0], dtype=complex)
        else:
            T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
            # block-diagonalize: T = S diag(T11, T22) S^{-1}, S = [[I, Y], [0, I]]
            # with T11 Y - Y T22 = -T12; the oblique projector is [[I, -Y], [0, 0]]
            Y = scipy.linalg.solve_sylvester(T11, -T22, -T12)
            PT = np.zeros_like(A)
            PT[:sdim, :sdim] = np.eye(sdim)
            PT[:sdim, sdim:] = -Y
            P = Z @ PT @ Z.conj().T
    elif method == "contour":
        pos = ev[ev.real > 0]
        if pos.size == 0:
            P = np.zeros_like(A)
        else:
            x_lo = 0.5 * float(np.min(pos.real))
            x_hi = float(np.max(pos.real)) + 1.0 + 0.1 * scale
            y_hi = float(np.max(np.abs(pos.imag))) + 1.0 + 0.1 * scale
            corners = [x_lo - 1j * y_hi, x_hi - 1j * y_hi,
                       x_hi + 1j * y_hi, x_lo + 1j * y_hi]
            # poles of the integrand: the spectrum and the origin
            sing = np.concatenate([ev, [0.0 + 0.0j]])
            nodes, wts = np.polynomial.legendre.leggauss(24)
            P = np.zeros_like(A)
            eye = np.eye(A.shape[0])
            for a, b in zip(corners, corners[1:] + corners[:1]):
                for u, v in _panels(a, b, sing):
                    mid, half = (u + v) / 2.0, (v - u) / 2.0
                    for t, w in zip(nodes, wts):
                        lam = mid + half * t
                        X = np.linalg.solve(A - lam * eye, A)
                        P += (1j / (2.0 * np.pi)) * w * half * (X / lam)
    else:
        raise DomainError(f"unknown method {method!r}")
    return GridOperator(P, C.manifold, C.n_f, C.m)


def _panels(a: complex, b: complex, sing: np.ndarray, max_depth: int = 40):
    """Split the segment [a, b] until each panel is shorter than its distance
    to the nearest singularity (keeps Gauss-Legendre spectrally convergent
    even when the spectrum spans several orders of magnitude)."""
    stack = [(a, b, 0)]
    out = []
    while stack:
        u, v, depth = stack.pop()
        mid = (u + v) / 2.0
        if depth >= max_depth or abs(v - u) <= np.min(np.abs(sing - mid)):
            out.append((u, v))
        else:
            stack.append((u, mid, depth + 1))
            stack.append((mid, v, depth + 1))
    return out


# -- norms ---------------------------------------------------------------------


def compare_operator_norm(A: GridOperator, B: GridOperator | None = None,
                          iters: int = 200, stag_tol: float = 1e-12) -> float:
    """Spectral-norm estimate of A - B by power iteration on (A-B)*(A-B)."""
    if B is not None:
        A._check_compatible(B)
        M = A.matrix - B.matrix
    else:
        M = A.matrix
    n = M.shape[0]
    v = np.ones(n, complex) + 1e-3 * np.arange(n) / n   # deterministic start
    v /= np.linalg.norm(v)
    MH = M.conj().T
    prev = 0.0
    for _ in range(iters):
        w = MH @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        sigma = np.sqrt(nw)
        if abs(sigma - prev) <= stag_tol * max(sigma, 1.0):
            return float(sigma)
        prev = sigma
    return float(prev)
