import math

import numpy as np
import pytest

from pairemit.model import (MASS, EmitterParams, OutOfBandError,
                            bogoliubov, derive_params, form_factors,
                            pole_momentum)


def test_pippard_length_identity():
    # xi/lambda_F * pi^2 |Delta|/mu = 1 identically
    for d in (1e-5, 2.997e-3, 0.05, 0.3):
        p = EmitterParams(delta=d, ec=1e-3, w=1.0)
        dp = derive_params(p)
        assert dp.xi_over_lambda_f * math.pi**2 * d == pytest.approx(1.0, rel=1e-12)


def test_fig3_xi_value():
    p = EmitterParams(delta=2.997e-3, ec=2.997e-3, w=1.0)
    assert derive_params(p).xi_over_lambda_f == pytest.approx(33.8, abs=0.05)


def test_zero_gap_sentinel():
    dp = derive_params(EmitterParams(delta=0.0, ec=1e-3, w=1.0))
    assert math.isinf(dp.xi)
    assert dp.w_over_xi == 0.0


def test_ratio_example():
    p = EmitterParams(delta=1e-2, ec=1e-2, w=1.0)
    assert derive_params(p).delta_over_ec == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [
    dict(delta=0.0, ec=-1.0, w=1.0),
    dict(delta=0.0, ec=0.0, w=1.0),
    dict(delta=0.0, ec=1e-3, w=0.0),
    dict(delta=1.5, ec=1e-3, w=1.0),       # weak-coupling guard
])
def test_param_validation(bad):
    with pytest.raises(ValueError):
        EmitterParams(**bad)


class TestBogoliubov:
    def test_fermi_surface(self):
        st = bogoliubov(0.0, 0.01)
        assert st.ukvk == pytest.approx(0.5)
        assert st.vk2 == pytest.approx(0.5)
        assert st.omega_k == pytest.approx(0.01)

    def test_filled_sea_normal_state(self):
        st = bogoliubov(-0.3, 0.0)
        assert st.ukvk == 0.0
        assert st.vk2 == pytest.approx(1.0)

    def test_three_quarter_gap(self):
        # eps = (3/4)|D| -> omega = (5/4)|D|, ukvk = (2/5) * phase
        d = 0.01 * np.exp(0.4j)
        st = bogoliubov(0.75 * abs(d), d)
        assert st.omega_k == pytest.approx(1.25 * abs(d))
        assert st.ukvk == pytest.approx(0.4 * d / abs(d))

    def test_degenerate_point_convention(self):
        st = bogoliubov(0.0, 0.0)
        assert st.omega_k == 0.0
        assert st.ukvk == 0.0
        assert st.vk2 == 0.5

    def test_ukvk_bound_and_particle_hole(self):
        d = 3e-3
        for eps in np.linspace(-0.05, 0.05, 41):
            st = bogoliubov(float(eps), d)
            assert abs(st.ukvk) <= 0.5 + 1e-15
            # |ukvk| = |D|/2w, equality at eps = 0 only
            assert abs(st.ukvk) == pytest.approx(d / (2 * st.omega_k))
            mirror = bogoliubov(-float(eps), d)
            assert st.vk2 + mirror.vk2 == pytest.approx(1.0, abs=1e-14)


class TestFormFactors:
    params = EmitterParams(delta=0.0, ec=0.05, w=1.0)

    def test_g_at_zero_argument(self):
        g, _, _ = form_factors(np.array([0.7, 0, 0]), np.array([0.7, 0, 0]),
                               self.params)
        assert g == pytest.approx((2 * math.pi) ** -3, rel=1e-12)

    def test_h_at_fermi_level(self):
        _, h, _ = form_factors(np.array([1.0, 0, 0]), np.zeros(3), self.params)
        assert h == pytest.approx(math.sqrt(1.0 / MASS), rel=1e-12)

    def test_g_two_over_w(self):
        w = self.params.w_kf
        p = np.array([1.0, 0, 0])
        k = p - np.array([2.0 / w, 0, 0])
        g, _, _ = form_factors(p, k, self.params)
        assert g == pytest.approx((2 * math.pi) ** -3 * math.exp(-2.0),
                                  rel=1e-12)

    def test_h_consistency_identity(self):
        # h(p)^2 m / |p| = e^{eps_p / E_C}
        for pmag in (0.7, 1.0, 1.2):
            p = np.array([0.0, 0.0, pmag])
            _, h, _ = form_factors(p, np.zeros(3), self.params)
            lhs = h * h * MASS / pmag
            assert lhs == pytest.approx(
                math.exp((pmag**2 - 1.0) / self.params.ec), rel=1e-12)

    def test_t_product(self):
        p = np.array([0.9, 0.1, 0.2])
        k = np.array([0.8, 0.0, 0.3])
        g, h, t = form_factors(p, k, self.params)
        assert t == pytest.approx(g * h, rel=1e-15)

    def test_zero_momentum_rejected(self):
        with pytest.raises(ValueError):
            form_factors(np.zeros(3), np.zeros(3), self.params)


class TestPoleMomentum:
    def test_fermi(self):
        assert pole_momentum(0.0) == pytest.approx(1.0)

    def test_sqrt_example(self):
        assert pole_momentum(0.19) == pytest.approx(0.9, rel=1e-12)

    def test_out_of_band(self):
        with pytest.raises(OutOfBandError):
            pole_momentum(1.5)
        with pytest.raises(OutOfBandError):
            pole_momentum(1.0)

    def test_monotone(self):
        omegas = np.linspace(0.0, 0.99, 50)
        ps = [pole_momentum(float(o)) for o in omegas]
        assert all(a > b for a, b in zip(ps, ps[1:]))
