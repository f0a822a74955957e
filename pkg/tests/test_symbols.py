import numpy as np
import pytest

from symres import ClassicalSymbol, HomogeneousTerm, ModelManifold, compose
from symres.errors import GridMismatchError
from symres.oracle import mode_index, quantize
from symres.symbols import add, base_bandwidth, multiply, scale, subtract, trace

MAN1 = ModelManifold(1, 64)
MAN2 = ModelManifold(2, 16, 16)


def wave_term(man, degree, freq, m=1):
    f = np.exp(1j * freq * man.x)
    if man.n == 1:
        samp = f[:, None, None, None] * np.ones((1, 2, m, m))
    else:
        samp = (f[:, None, None, None, None]
                * np.ones((1, man.N, man.K, m, m)))
    return HomogeneousTerm(man, degree, samp)


def random_symbol(man, lead, order, bandwidth, seed, m=1):
    rng = np.random.default_rng(seed)
    terms = []
    for j in range(order + 1):
        coef = np.zeros(man.sample_shape + (m, m), complex)
        ks = np.fft.fftfreq(man.N, 1.0 / man.N)
        sel = np.abs(ks) <= bandwidth
        if man.n == 1:
            coef[sel] = rng.standard_normal((int(sel.sum()), 2, m, m)) \
                + 1j * rng.standard_normal((int(sel.sum()), 2, m, m))
            samp = np.fft.ifft(coef, axis=0) * man.N
        else:
            kt = np.abs(np.fft.fftfreq(man.K, 1.0 / man.K)) <= 2
            grid = sel[:, None, None] & sel[None, :, None] & kt[None, None, :]
            idx = np.broadcast_to(grid[..., None, None], coef.shape)
            vals = rng.standard_normal(int(idx.sum())) + 1j * rng.standard_normal(int(idx.sum()))
            coef[idx] = vals
            samp = coef
            for ax in (0, 1, 2):
                samp = np.fft.ifft(samp, axis=ax) * samp.shape[ax]
        terms.append(HomogeneousTerm(man, lead - j, samp))
    return ClassicalSymbol(man, lead, terms)


class TestCompose:
    def test_unit_law_exact(self):
        I = ClassicalSymbol.identity(MAN1, 2)
        q = random_symbol(MAN1, 0, 2, 3, seed=1, m=2)
        r = compose(I, q, 2)
        for a, b in zip(r.terms, q.terms):
            assert np.array_equal(a.samples, b.samples)
        r2 = compose(q, I, 2)
        for a, b in zip(r2.terms, q.terms):
            assert np.array_equal(a.samples, b.samples)

    def test_absxi_with_wave(self):
        # p = |xi|, q = e^{ix}: degree 1 is e^{ix} |xi|, degree 0 is sgn(xi) e^{ix}
        p = ClassicalSymbol(MAN1, 1, [HomogeneousTerm.constant(MAN1, 1, [[1.0]])])
        q = ClassicalSymbol(MAN1, 0, [wave_term(MAN1, 0, 1)])
        r = compose(p, q, 1)
        f = np.exp(1j * MAN1.x)
        np.testing.assert_allclose(r.term(1).samples[:, 0, 0, 0], f, atol=1e-13)
        np.testing.assert_allclose(r.term(1).samples[:, 1, 0, 0], f, atol=1e-13)
        np.testing.assert_allclose(r.term(0).samples[:, 0, 0, 0], f, atol=1e-13)
        np.testing.assert_allclose(r.term(0).samples[:, 1, 0, 0], -f, atol=1e-13)

    def test_sgn_squared_is_one_exactly(self):
        samp = np.zeros((64, 2, 1, 1), complex)
        samp[:, 0] = 1.0
        samp[:, 1] = -1.0
        sgn = ClassicalSymbol(MAN1, 0, [HomogeneousTerm(MAN1, 0, samp)])
        r = compose(sgn, sgn, 3)
        assert np.array_equal(r.term(0).samples,
                              np.ones((64, 2, 1, 1), complex))
        for d in (-1, -2, -3):
            assert r.term(d).max_abs() == 0.0

    @pytest.mark.parametrize("man,seed", [(MAN1, 2), (MAN2, 3)])
    def test_associativity(self, man, seed):
        J = 4 if man.n == 1 else 3
        p = random_symbol(man, 1, 2, 2, seed)
        q = random_symbol(man, 0, 2, 2, seed + 1)
        r = random_symbol(man, -1, 2, 2, seed + 2)
        lhs = compose(compose(p, q, J), r, J)
        rhs = compose(p, compose(q, r, J), J)
        for d_l, d_r in zip(lhs.terms, rhs.terms):
            scale_ = max(d_l.max_abs(), d_r.max_abs(), 1.0)
            assert np.max(np.abs(d_l.samples - d_r.samples)) <= 1e-10 * scale_

    def test_grid_mismatch(self):
        p = random_symbol(MAN1, 0, 0, 1, 0)
        q = random_symbol(ModelManifold(1, 32), 0, 0, 1, 0)
        with pytest.raises(GridMismatchError):
            compose(p, q, 0)

    def test_oracle_consistency_mode_decay(self):
        # ||(Op(p)Op(q) - Op(p#q)) e_k|| decays in k at the dropped-degree rate
        p = random_symbol(MAN1, 1, 3, 3, seed=10)
        q = random_symbol(MAN1, 0, 3, 3, seed=11)
        pq = compose(p, q, 3)
        n_f = 32
        A = quantize(p, n_f).matrix @ quantize(q, n_f).matrix - quantize(pq, n_f).matrix
        norms = []
        for k in (8, 16, 32):
            col = A[:, mode_index(MAN1, n_f, [k])]
            norms.append(np.linalg.norm(col))
        assert norms[1] <= 1.5 * norms[0]
        assert norms[2] <= 1.5 * norms[1]
        assert norms[2] < norms[0]


class TestPointwise:
    def test_add_subtract_roundtrip(self):
        p = random_symbol(MAN1, 0, 2, 2, 5, m=2)
        z = subtract(add(p, p), scale(p, 2.0))
        assert all(t.max_abs() == 0.0 for t in z.terms)

    def test_scale_then_subtract_identity(self):
        # realizes 2 ptilde - I from a degree-0 idempotent field
        p = random_symbol(MAN1, 0, 0, 2, 6, m=2)
        w = subtract(scale(p, 2.0), ClassicalSymbol.identity(MAN1, 2))
        expect = 2.0 * p.terms[0].samples - np.eye(2)
        np.testing.assert_allclose(w.terms[0].samples, expect, atol=1e-15)

    def test_trace_of_rank_one_idempotent(self):
        samp = np.zeros((64, 2, 2, 2), complex)
        samp[..., 0, 0] = 1.0
        samp[..., 0, 1] = np.exp(1j * MAN1.x)[:, None]
        p = ClassicalSymbol(MAN1, 0, [HomogeneousTerm(MAN1, 0, samp)])
        tr = trace(p)
        assert np.array_equal(tr.terms[0].samples,
                              np.ones((64, 2, 1, 1), complex))

    def test_multiply_pairs_degrees(self):
        p = random_symbol(MAN1, 1, 1, 2, 7)
        q = random_symbol(MAN1, 0, 1, 2, 8)
        r = multiply(p, q)
        assert r.leading_degree == 1
        expect = np.matmul(p.term(1).samples, q.term(-1).samples) \
            + np.matmul(p.term(0).samples, q.term(0).samples)
        np.testing.assert_allclose(r.term(0).samples, expect, atol=1e-14)

    def test_bandwidth_probe(self):
        p = ClassicalSymbol(MAN1, 0, [wave_term(MAN1, 0, 5)])
        assert base_bandwidth(p) == 5
