"""Classical (polyhomogeneous) symbols and their calculus.

A classical symbol is a finite descending ladder of homogeneous terms
with leading degree m0 and truncation order J:

    p ~ p_{m0} + p_{m0-1} + ... + p_{m0-J}.

Composition is the left (Kohn-Nirenberg) product with D_x = -i d/dx,

    (p # q)  ~  sum_alpha (1/alpha!) (d/dxi)^alpha p * (-i d/dx)^alpha q,

collected by homogeneity degree and truncated at leading-degree-minus-J.
The convention is fixed here once and used everywhere (quantization in
the dense-matrix oracle uses the matching left quantization).
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .errors import DomainError, GridMismatchError
from .manifold import ModelManifold
from .spectral import fourier_diff
from .terms import HomogeneousTerm


class ClassicalSymbol:
    """Finite descending sequence of homogeneous terms (step one in degree)."""

    __slots__ = ("manifold", "leading_degree", "terms")

    def __init__(self, manifold: ModelManifold, leading_degree: int,
                 terms: list[HomogeneousTerm]):
        if not terms:
            raise DomainError("a symbol needs at least one term")
        m = terms[0].m
        for j, t in enumerate(terms):
            if t.manifold != manifold or t.m != m:
                raise GridMismatchError("terms live on different grids or fibers")
            if t.degree != leading_degree - j:
                raise DomainError(
                    f"term {j} has degree {t.degree}, expected {leading_degree - j}"
                )
        self.manifold = manifold
        self.leading_degree = int(leading_degree)
        self.terms = list(terms)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_terms(cls, terms: list[HomogeneousTerm]) -> "ClassicalSymbol":
        """Build from terms with arbitrary (distinct) degrees, padding gaps
        with zero terms."""
        if not terms:
            raise DomainError("no terms given")
        man, m = terms[0].manifold, terms[0].m
        degs = [t.degree for t in terms]
        if len(set(degs)) != len(degs):
            raise DomainError("duplicate degrees")
        lead, low = max(degs), min(degs)
        ladder = [HomogeneousTerm.zeros(man, d, m) for d in range(lead, low - 1, -1)]
        for t in terms:
            ladder[lead - t.degree] = t
        return cls(man, lead, ladder)

    @classmethod
    def identity(cls, manifold: ModelManifold, m: int) -> "ClassicalSymbol":
        return cls(manifold, 0, [HomogeneousTerm.constant(manifold, 0, np.eye(m))])

    @classmethod
    def zero(cls, manifold: ModelManifold, m: int, degree: int = 0) -> "ClassicalSymbol":
        return cls(manifold, degree, [HomogeneousTerm.zeros(manifold, degree, m)])

    # -- accessors ----------------------------------------------------------

    @property
    def m(self) -> int:
        return self.terms[0].m

    @property
    def order(self) -> int:
        """Truncation order J (number of retained terms minus one)."""
        return len(self.terms) - 1

    @property
    def degrees(self) -> list[int]:
        return [t.degree for t in self.terms]

    def term(self, degree: int) -> HomogeneousTerm | None:
        j = self.leading_degree - degree
        if 0 <= j <= self.order:
            return self.terms[j]
        return None

    def max_abs(self) -> float:
        return max(t.max_abs() for t in self.terms)

    def _check_compatible(self, other: "ClassicalSymbol"):
        if self.manifold != other.manifold or self.m != other.m:
            raise GridMismatchError("symbols live on different grids or fibers")

    def evaluate(self, x, xi) -> np.ndarray:
        """Sum of the homogeneous terms at (x, xi != 0)."""
        return sum(t.evaluate(x, xi) for t in self.terms)


# -- degree-wise pointwise algebra ------------------------------------------


def add(p: ClassicalSymbol, q: ClassicalSymbol) -> ClassicalSymbol:
    p._check_compatible(q)
    lead = max(p.leading_degree, q.leading_degree)
    low = min(p.leading_degree - p.order, q.leading_degree - q.order)
    out = []
    for d in range(lead, low - 1, -1):
        a, b = p.term(d), q.term(d)
        if a is not None and b is not None:
            out.append(a + b)
        else:
            t = a if a is not None else b
            t = t if t is not None else HomogeneousTerm.zeros(p.manifold, d, p.m)
            out.append(t)
    return ClassicalSymbol(p.manifold, lead, out)


def scale(p: ClassicalSymbol, c) -> ClassicalSymbol:
    return ClassicalSymbol(p.manifold, p.leading_degree, [t * c for t in p.terms])


def subtract(p: ClassicalSymbol, q: ClassicalSymbol) -> ClassicalSymbol:
    return add(p, scale(q, -1.0))


def multiply(p: ClassicalSymbol, q: ClassicalSymbol, order: int | None = None) -> ClassicalSymbol:
    """Pointwise (frozen-coefficient) product: pairs of terms whose degrees
    sum to the target degree; no derivatives."""
    p._check_compatible(q)
    lead = p.leading_degree + q.leading_degree
    if order is None:
        order = p.order + q.order
    out = []
    for j in range(order + 1):
        acc = HomogeneousTerm.zeros(p.manifold, lead - j, p.m)
        for j1 in range(min(j, p.order) + 1):
            j2 = j - j1
            if j2 > q.order:
                continue
            acc = acc + p.terms[j1].matmul(q.terms[j2])
        out.append(acc)
    return ClassicalSymbol(p.manifold, lead, out)


def trace(p: ClassicalSymbol) -> ClassicalSymbol:
    """Pointwise matrix trace; returns a scalar (1x1) symbol."""
    out = [HomogeneousTerm.from_scalar(p.manifold, t.degree, t.trace_field())
           for t in p.terms]
    return ClassicalSymbol(p.manifold, p.leading_degree, out)


# -- composition -------------------------------------------------------------


def _multi_indices(n: int, total: int):
    if n == 1:
        yield (total,)
    else:
        for a1 in range(total + 1):
            yield (a1, total - a1)


def _alpha_factorial(alpha: tuple[int, ...]) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


class _DxiCache:
    """Iterated covariable derivatives of a symbol's terms, memoized.

    Axis-0 derivatives are applied before axis-1 derivatives (the two
    commute exactly in this calculus, so the order is just a convention).
    """

    def __init__(self, p: ClassicalSymbol):
        self.p = p
        self.cache: dict[tuple[int, tuple[int, ...]], HomogeneousTerm] = {}

    def get(self, j: int, alpha: tuple[int, ...]) -> HomogeneousTerm:
        key = (j, alpha)
        if key in self.cache:
            return self.cache[key]
        if sum(alpha) == 0:
            t = self.p.terms[j]
        elif alpha[0] > 0:
            prev = list(alpha)
            prev[0] -= 1
            t = self.get(j, tuple(prev)).diff_xi(0)
        else:
            prev = list(alpha)
            prev[1] -= 1
            t = self.get(j, tuple(prev)).diff_xi(1)
        self.cache[key] = t
        return t


class _DxCache:
    """Iterated spectral base derivatives of a symbol's terms, memoized."""

    def __init__(self, q: ClassicalSymbol):
        self.q = q
        self.cache: dict[tuple[int, tuple[int, ...]], HomogeneousTerm] = {}

    def get(self, j: int, alpha: tuple[int, ...]) -> HomogeneousTerm:
        key = (j, alpha)
        if key in self.cache:
            return self.cache[key]
        if sum(alpha) == 0:
            t = self.q.terms[j]
        elif alpha[0] > 0:
            prev = list(alpha)
            prev[0] -= 1
            t = self.get(j, tuple(prev)).diff_x(0)
        else:
            prev = list(alpha)
            prev[1] -= 1
            t = self.get(j, tuple(prev)).diff_x(1)
        self.cache[key] = t
        return t


def compose(p: ClassicalSymbol, q: ClassicalSymbol, order: int) -> ClassicalSymbol:
    """Left-symbol product p # q truncated at degree (m_p + m_q - order).

    The degree-(m_p + m_q - j) component is

        sum_{|alpha| + j1 + j2 = j} ((-i)^|alpha| / alpha!)
            * (d/dxi)^alpha p_{m_p - j1} * D_x^alpha q_{m_q - j2}.
    """
    p._check_compatible(q)
    if order < 0:
        raise DomainError("composition order must be >= 0")
    n = p.manifold.n
    lead = p.leading_degree + q.leading_degree
    dxi = _DxiCache(p)
    dx = _DxCache(q)
    zero_p = [t.is_zero() for t in p.terms]
    zero_q = [t.is_zero() for t in q.terms]
    out = []
    for j in range(order + 1):
        acc = np.zeros(p.manifold.sample_shape + (p.m, p.m), complex)
        for j1 in range(min(j, p.order) + 1):
            if zero_p[j1]:
                continue
            for j2 in range(min(j - j1, q.order) + 1):
                if zero_q[j2]:
                    continue
                a_tot = j - j1 - j2
                for alpha in _multi_indices(n, a_tot):
                    left = dxi.get(j1, alpha)
                    if left.is_zero():
                        continue
                    right = dx.get(j2, alpha)
                    coeff = (-1j) ** a_tot / _alpha_factorial(alpha)
                    acc += coeff * np.matmul(left.samples, right.samples)
        out.append(HomogeneousTerm(p.manifold, lead - j, acc))
    return ClassicalSymbol(p.manifold, lead, out)


# -- bandwidth ----------------------------------------------------------------


def base_bandwidth(p: ClassicalSymbol, rel_tol: float = 1e-12) -> int:
    """Largest base-grid frequency carrying weight above rel_tol * max,
    over all terms and axes."""
    best = 0
    for t in p.terms:
        a = t.samples
        scale_ = np.max(np.abs(a))
        if scale_ == 0.0:
            continue
        for axis in range(p.manifold.n):
            c = np.fft.fft(a, axis=axis) / a.shape[axis]
            k = np.abs(np.fft.fftfreq(a.shape[axis], d=1.0 / a.shape[axis]))
            mags = np.max(np.abs(c), axis=tuple(i for i in range(a.ndim) if i != axis))
            hit = np.nonzero(mags > rel_tol * scale_)[0]
            if hit.size:
                best = max(best, int(np.max(k[hit])))
    return best
