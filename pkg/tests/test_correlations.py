import cmath
import math

import numpy as np
import pytest

import pairemit.kernels as kernels
from pairemit.correlations import (DetectorGeometry,
                                   energy_cutoff, energy_cutoff_shift,
                                   farfield_amplitude,
                                   farfield_amplitude_direct, chi, gamma,
                                   rho2_and_Q)
from pairemit.model import EmitterParams, pole_momentum, OutOfBandError
from pairemit.quad import QuadSpec

DELTA = 2.997e-3
SUPER = EmitterParams(delta=DELTA, ec=DELTA, w=1.0)
NORMAL = EmitterParams(delta=0.0, ec=DELTA, w=1.0)
R = 100.0


@pytest.fixture(scope="module", autouse=True)
def _warm():
    kernels.warmup()


class TestGeometry:
    def test_from_r_theta(self):
        g = DetectorGeometry.from_r_theta(100.0, math.pi / 3)
        assert g.r1 == pytest.approx(100.0)
        assert g.r2 == pytest.approx(100.0)
        assert g.theta == pytest.approx(math.pi / 3)

    def test_far_field_flag(self):
        # threshold is k_F r >= 50, i.e. r >= 50/(2 pi) lambda_F
        assert DetectorGeometry.from_r_theta(10.0, 0.1).far_field
        assert not DetectorGeometry.from_r_theta(5.0, 0.1).far_field

    def test_positive_distances(self):
        with pytest.raises(ValueError):
            DetectorGeometry((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))


class TestFarfieldAmplitude:
    def test_exact_distance_scaling(self):
        # A at 2r equals A at r times e^{i p_k r} / 2 exactly
        omega = 0.01
        k = np.array([0.0, 0.0, 0.9])
        r1 = np.array([0.0, 0.0, 100.0])
        a1 = farfield_amplitude(k, r1, omega, SUPER)
        a2 = farfield_amplitude(k, 2 * r1, omega, SUPER)
        p_k = pole_momentum(omega, SUPER)
        r_kf = 100.0 * 2 * math.pi
        assert a2 == pytest.approx(a1 * cmath.exp(1j * p_k * r_kf) / 2.0,
                                   rel=1e-12)

    def test_direction_maximum_along_r(self):
        omega = 0.01
        p_k = pole_momentum(omega, SUPER)
        r = np.array([0.0, 0.0, 100.0])
        best = abs(farfield_amplitude(np.array([0, 0, p_k]), r, omega, SUPER))
        for ang in (0.05, 0.2, 0.7):
            k = p_k * np.array([math.sin(ang), 0.0, math.cos(ang)])
            assert abs(farfield_amplitude(k, r, omega, SUPER)) < best

    def test_out_of_band_propagates(self):
        with pytest.raises(OutOfBandError):
            farfield_amplitude(np.array([0, 0, 1.0]),
                               np.array([0, 0, 100.0]), 1.5, SUPER)

    @pytest.mark.slow
    def test_oracle_agreement(self):
        # documented oracle configuration, <= 2% (criterion tolerance)
        params = EmitterParams(delta=DELTA, ec=0.12, w=0.55)
        omega = 0.01
        r = np.array([0.0, 0.0, 200.0])
        k = np.array([0.0, 0.0, pole_momentum(omega, params)])
        a_far = farfield_amplitude(k, r, omega, params)
        a_dir = farfield_amplitude_direct(k, r, omega, params)
        assert abs(a_far - a_dir) / abs(a_dir) <= 0.02

    def test_direct_oracle_requires_convergent_filter(self):
        with pytest.raises(ValueError):
            farfield_amplitude_direct(np.array([0, 0, 1.0]),
                                      np.array([0, 0, 200.0]), 0.01, SUPER)


class TestGamma:
    def test_diagonal_real_positive(self):
        g = DetectorGeometry.from_r_theta(R, 0.0)
        val = gamma(g, SUPER)
        assert val.imag == pytest.approx(0.0, abs=1e-18)
        assert val.real > 0.0

    def test_hermiticity_under_swap(self):
        geom = DetectorGeometry((0.0, 0.0, 90.0),
                                (30.0, 0.0, 85.0))
        a = gamma(geom, SUPER)
        b = gamma(geom.swapped(), SUPER)
        assert abs(a - b.conjugate()) <= 1e-3 * abs(a)

    def test_cauchy_schwarz(self):
        geom = DetectorGeometry.from_r_theta(R, 0.3)
        g11 = gamma(DetectorGeometry(geom.r1_vec, geom.r1_vec), SUPER).real
        g22 = gamma(DetectorGeometry(geom.r2_vec, geom.r2_vec), SUPER).real
        g21 = gamma(geom, SUPER)
        assert abs(g21) ** 2 <= g11 * g22 * (1.0 + 1e-6)

    def test_angular_localization_at_pi(self):
        # |gamma21| at theta = pi is below 1e-3 of the diagonal
        res = rho2_and_Q(DetectorGeometry.from_r_theta(R, math.pi), SUPER)
        assert abs(res.gamma21) <= 1e-3 * res.gamma11

    def test_far_field_warning(self):
        with pytest.warns(UserWarning):
            gamma(DetectorGeometry.from_r_theta(2.0, 0.1), NORMAL)

    def test_energy_cutoff_convergence(self):
        geom = DetectorGeometry.from_r_theta(R, 0.0)
        assert energy_cutoff_shift(geom, SUPER) < 0.01

    def test_energy_cutoff_value(self):
        assert energy_cutoff(SUPER) == pytest.approx(20 * DELTA)
        wide = EmitterParams(delta=0.0, ec=0.2, w=1.0)
        assert energy_cutoff(wide) <= 0.95


class TestChi:
    def test_exact_null_in_normal_state(self):
        geom = DetectorGeometry.from_r_theta(R, math.pi)
        assert chi(geom, NORMAL) == 0.0

    def test_regime_warnings(self):
        with pytest.warns(UserWarning):
            chi(DetectorGeometry.from_r_theta(4.0, math.pi), SUPER,
                QuadSpec(rel_tol=1e-2, abs_tol=1e-25, max_depth=25))

    @pytest.mark.slow
    def test_swap_symmetry_asymmetric_geometry(self):
        # chi(r1, r2) = chi(r2, r1) at unequal radii and off-axis angles
        n2 = np.array([-0.6, 0.15, -0.785])
        n2 /= np.linalg.norm(n2)
        geom = DetectorGeometry((0.0, 0.0, 90.0), tuple(105.0 * n2))
        a = chi(geom, SUPER)
        b = chi(geom.swapped(), SUPER)
        assert abs(a - b) <= 2e-2 * abs(a)

    @pytest.mark.slow
    def test_phase_invariance(self):
        geom = DetectorGeometry.from_r_theta(R, math.pi)
        a = chi(geom, SUPER)
        rotated = EmitterParams(delta=DELTA * cmath.exp(1.1j), ec=DELTA, w=1.0)
        b = chi(geom, rotated)
        assert abs(abs(b) - abs(a)) <= 1e-10 * abs(a)
        # the phase itself co-rotates with the gap
        assert cmath.phase(b / a) == pytest.approx(1.1, abs=1e-6)

    @pytest.mark.slow
    def test_small_gap_linear_scaling(self):
        # chi is linear in Delta up to the logarithmic variation of its
        # Hankel-type kernel: the doubling ratio |chi(2D)/chi(D)| matches
        # the closed-form prediction of that kernel and converges (slowly,
        # through the log) toward 2 as the gap shrinks at fixed geometry.
        import pairemit.specfun as sf

        geom = DetectorGeometry.from_r_theta(R, math.pi)
        ec = 0.01
        w_kf = 2 * math.pi
        r_kf = R * 2 * math.pi

        def predicted_ratio(d):
            def bracket(dd):
                z = complex(-r_kf * dd**2 / 8.0, w_kf**2 * dd**2 / 4.0)
                s = 4.0 * cmath.exp(1j * r_kf * dd**2 / 8.0) / (
                    math.pi * sf.principal_sqrt(1j * r_kf / w_kf**2))
                return abs(sf.hankel2_0(z).value - s)
            return 2.0 * bracket(2 * d) / bracket(d)

        x1 = chi(geom, EmitterParams(delta=2e-4, ec=ec, w=1.0))
        x2 = chi(geom, EmitterParams(delta=4e-4, ec=ec, w=1.0))
        ratio = abs(x2) / abs(x1)
        assert ratio == pytest.approx(predicted_ratio(2e-4), rel=0.03)
        # directional convergence toward 2: shrinking the gap helps
        assert 1.0 < predicted_ratio(2e-3) < predicted_ratio(2e-4) \
            < predicted_ratio(2e-6) < 2.0


class TestRho2AndQ:
    def test_normal_coincident_antibunching(self):
        res = rho2_and_Q(DetectorGeometry.from_r_theta(R, 0.0), NORMAL)
        assert res.Q == pytest.approx(0.5, abs=1e-6)

    def test_normal_separated_factorizes(self):
        res = rho2_and_Q(DetectorGeometry.from_r_theta(R, math.pi / 2), NORMAL)
        assert res.Q == pytest.approx(1.0, abs=1e-4)
        assert res.rho1_1 == pytest.approx(2 * res.gamma11)

    @pytest.mark.slow
    def test_q_even_about_pi(self):
        d = 0.35
        qa = rho2_and_Q(DetectorGeometry.from_r_theta(R, math.pi - d), SUPER).Q
        qb = rho2_and_Q(DetectorGeometry.from_r_theta(R, math.pi + d), SUPER).Q
        assert qa == pytest.approx(qb, rel=2e-2)

    @pytest.mark.slow
    def test_rho2_nonnegative_and_flags(self):
        res = rho2_and_Q(DetectorGeometry.from_r_theta(R, math.pi), SUPER)
        assert res.rho2 >= 0.0
        assert res.regime_flags["far_field"]
        assert res.regime_flags["chi_kfr_ok"]
        assert res.regime_flags["chi_spread_ok"]

    def test_normal_theta0_feeds_q_half(self):
        # Delta = 0, theta = 0: chi = 0 and gamma21 = gamma11 give Q = 1/2
        res = rho2_and_Q(DetectorGeometry.from_r_theta(R, 0.0), NORMAL)
        assert res.chi21 == 0.0
        assert abs(res.gamma21 - res.gamma11) <= 1e-12 * res.gamma11


class TestBackendEquivalence:
    def test_numpy_fallback_matches(self):
        # the pure-NumPy kernels agree with the active backend
        u = np.linspace(-0.4, 0.4, 97)
        c1 = np.cos(np.linspace(0, 1, 97))
        c2 = -c1
        a = kernels.chi_f(u, 1.0, 6.28, c1, c2, 600.0, 610.0)
        b = kernels._chi_f(u, 1.0, 6.28, c1, c2, 600.0, 610.0)
        assert np.allclose(a, b, rtol=1e-12, atol=0)
        phi = np.linspace(0, math.pi, 31)
        ga = kernels.gamma_integrand(phi, -0.01, 0.9, DELTA, DELTA, 6.28,
                                     628.0, 628.0, 0.7, 0.999)
        gb = kernels._gamma_integrand(phi, -0.01, 0.9, DELTA, DELTA, 6.28,
                                      628.0, 628.0, 0.7, 0.999)
        assert np.allclose(ga, gb, rtol=1e-12, atol=0)
