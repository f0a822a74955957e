import numpy as np
import pytest

from symres import HomogeneousTerm, ModelManifold
from symres.errors import DomainError, GridMismatchError

MAN1 = ModelManifold(1, 16)
MAN2 = ModelManifold(2, 16, 16)


def rand_term(man, degree, m=2, seed=0):
    rng = np.random.default_rng(seed)
    shape = man.sample_shape + (m, m)
    return HomogeneousTerm(man, degree,
                           rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class TestEvaluate:
    def test_constant_any_point(self):
        c = np.array([[1.0, 2.0], [3.0, 4.0]])
        t = HomogeneousTerm.constant(MAN1, 0, c)
        np.testing.assert_allclose(t.evaluate(0.3, 5.0), c)
        t2 = HomogeneousTerm.constant(MAN2, 0, c)
        np.testing.assert_allclose(t2.evaluate([0.3, 1.1], [2.0, -1.0]), c)

    def test_homogeneous_extension_n1(self):
        # samples (A at +1, B at -1), degree -1, xi = -2 -> B/2
        A = np.array([[1.0 + 1j]])
        B = np.array([[2.0 - 1j]])
        samples = np.zeros((16, 2, 1, 1), complex)
        samples[:, 0] = A
        samples[:, 1] = B
        t = HomogeneousTerm(MAN1, -1, samples)
        np.testing.assert_allclose(t.evaluate(0.0, -2.0), B / 2.0)

    def test_direction_profile_n2(self):
        # g(theta) = cos(theta), degree 1, xi = (0, 3) -> 3 cos(pi/2) = 0
        th = MAN2.theta
        samples = np.broadcast_to(np.cos(th)[None, None, :, None, None],
                                  (16, 16, 16, 1, 1)).astype(complex)
        t = HomogeneousTerm(MAN2, 1, np.array(samples))
        assert abs(t.evaluate([0.0, 0.0], [0.0, 3.0])) < 1e-13
        np.testing.assert_allclose(t.evaluate([0.0, 0.0], [2.0, 0.0]), 2.0)

    def test_zero_covector_rejected(self):
        t = rand_term(MAN1, 0)
        with pytest.raises(DomainError):
            t.evaluate(0.0, 0.0)

    @pytest.mark.parametrize("t_scale", [0.5, 2.0, 7.0])
    @pytest.mark.parametrize("degree", [-2, -1, 0, 1])
    def test_homogeneity_exact(self, t_scale, degree):
        term = rand_term(MAN2, degree, seed=degree + 5)
        xi = np.array([0.6, -1.3])
        a = term.evaluate([0.5, 0.7], t_scale * xi)
        b = t_scale**degree * term.evaluate([0.5, 0.7], xi)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-13 * np.max(np.abs(b)))

    def test_offgrid_trig_interpolation(self):
        # band-limited sample field: interpolation reproduces the function
        f = np.exp(2j * MAN1.x)
        samples = f[:, None, None, None] * np.ones((1, 2, 1, 1))
        t = HomogeneousTerm(MAN1, 0, samples)
        x = 0.12345
        np.testing.assert_allclose(t.evaluate(x, 1.0)[0, 0], np.exp(2j * x),
                                   atol=1e-13)


class TestDerivatives:
    def test_diff_x_wave(self):
        f = np.exp(1j * MAN1.x)
        t = HomogeneousTerm(MAN1, 0, f[:, None, None, None] * np.ones((1, 2, 1, 1)))
        d = t.diff_x(0)
        np.testing.assert_allclose(d.samples, 1j * t.samples, atol=1e-13)

    def test_diff_x_constant_is_zero(self):
        t = HomogeneousTerm.constant(MAN2, 1, np.eye(2))
        assert t.diff_x(0).max_abs() == 0.0
        assert t.diff_x(1).max_abs() == 0.0

    def test_diff_x_torus(self):
        f = np.sin(2 * MAN2.x)[:, None, None, None, None]
        t = HomogeneousTerm(MAN2, 0, np.broadcast_to(f, (16, 16, 16, 1, 1)).copy())
        d = t.diff_x(0)
        expect = 2 * np.cos(2 * MAN2.x)[:, None, None, None, None]
        np.testing.assert_allclose(d.samples, np.broadcast_to(expect, d.samples.shape),
                                   atol=1e-12)

    def test_diff_xi_n1_absval(self):
        # f = |xi| (degree 1, both direction samples 1) -> sgn(xi)
        t = HomogeneousTerm.constant(MAN1, 1, np.array([[1.0]]))
        d = t.diff_xi(0)
        assert d.degree == 0
        np.testing.assert_allclose(d.samples[:, 0], 1.0)
        np.testing.assert_allclose(d.samples[:, 1], -1.0)
        # and d/dxi sgn = 0 (degree factor vanishes)
        assert d.diff_xi(0).max_abs() == 0.0

    def test_diff_xi_n2_absval(self):
        t = HomogeneousTerm.constant(MAN2, 1, np.array([[1.0]]))
        d = t.diff_xi(0)
        assert d.degree == 0
        expect = np.cos(MAN2.theta)
        np.testing.assert_allclose(d.samples[0, 0, :, 0, 0], expect, atol=1e-12)

    def test_diff_xi_commutes_n2(self):
        # theta-band-limited samples (the spectral derivative's exactness domain)
        rng = np.random.default_rng(3)
        coef = np.zeros(MAN2.sample_shape + (2, 2), complex)
        kt = np.abs(np.fft.fftfreq(MAN2.K, 1.0 / MAN2.K)) <= 3
        coef[:, :, kt] = rng.standard_normal((16, 16, int(kt.sum()), 2, 2))
        samp = np.fft.ifft(coef, axis=2) * MAN2.K
        t = HomogeneousTerm(MAN2, 2, samp)
        a = t.diff_xi(0).diff_xi(1)
        b = t.diff_xi(1).diff_xi(0)
        np.testing.assert_allclose(a.samples, b.samples, atol=1e-12)


class TestValidation:
    def test_shape_mismatch(self):
        with pytest.raises(GridMismatchError):
            HomogeneousTerm(MAN1, 0, np.zeros((16, 3, 2, 2)))

    def test_nonfinite_rejected(self):
        bad = np.zeros((16, 2, 1, 1), complex)
        bad[0, 0] = np.nan
        with pytest.raises(DomainError):
            HomogeneousTerm(MAN1, 0, bad)

    def test_samples_frozen(self):
        t = rand_term(MAN1, 0)
        with pytest.raises(ValueError):
            t.samples[0, 0, 0, 0] = 1.0

    def test_degree_mismatch_add(self):
        with pytest.raises(DomainError):
            rand_term(MAN1, 0) + rand_term(MAN1, 1)


class TestManifold:
    def test_grid_validation(self):
        with pytest.raises(DomainError):
            ModelManifold(1, 48)
        with pytest.raises(DomainError):
            ModelManifold(2, 16, 12)
        with pytest.raises(Exception):
            ModelManifold(3, 16)

    def test_mask_includes_boundary(self):
        man = ModelManifold(1, 16)
        assert man.mask_X[0] and man.mask_X[8]       # x = 0 and x = pi
        assert not man.mask_X[9]

    def test_margin_cells(self):
        man = ModelManifold(1, 16)
        supp = np.zeros(16, bool)
        supp[3:6] = True
        assert man.margin_cells(supp) == 3
        supp2 = np.zeros(16, bool)
        supp2[0] = True
        assert man.margin_cells(supp2) <= 0
        supp3 = np.zeros(16, bool)
        supp3[12] = True                              # beyond x = pi
        assert man.margin_cells(supp3) <= 0
