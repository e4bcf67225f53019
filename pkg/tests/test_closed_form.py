import math

import numpy as np
import pytest

from ncbounds.bounds import det_crb, det_nc_crb
from ncbounds.closed_form import (
    AlphaBetaGamma,
    TwoSourceParams,
    alpha_beta_gamma,
    dirichlet_alpha,
    nc_crb_limit_zero_sep,
    nc_gain,
    single_source_nc_crb,
    single_source_ula_nc_crb,
    two_groups_decoupling_check,
    two_source_crb,
    two_source_nc_crb,
)
from ncbounds.geometry import SamplingGrid, build_steering_set, ula, uniform_grid
from ncbounds.signals import SourceScenario, exact_covariance_symbols, rotated_covariance


def params(m=15, dmu=0.1, dphi=np.pi / 2, rho=0.0, snr1=200.0, snr2=200.0):
    return TwoSourceParams(m_sensors=m, delta_mu=dmu, delta_phi=dphi, rho=rho,
                           snr1=snr1, snr2=snr2)


def numeric_two_source(m, dmu, dphi_rot, rho, sigma2=0.1, n=20, seed=42):
    """Both bounds from the full machinery on a centered M-element ULA."""
    grid = ula(m, "centroid")
    sc = SourceScenario(mu=np.array([[0.2, 0.2 + dmu]]), phi=[0.1, 0.1 + dphi_rot],
                        powers=[1.0, 1.0], corr=rho, n_snapshots=n, sigma2=sigma2)
    block = exact_covariance_symbols(sc, seed)
    st_set = build_steering_set(grid, sc.mu)
    nc = det_nc_crb(st_set, sc.phi, block.rhat_s0, sigma2, n)
    crb = det_crb(st_set, rotated_covariance(block.rhat_s0, sc.phi), sigma2, n)
    return crb.trace, nc.trace


class TestSingleSource:
    def test_ula_anchor(self):
        grid = ula(4, "centroid")  # coordinates +-0.5, +-1.5: sum k^2 = 5
        val = single_source_nc_crb(grid, snr=200.0)
        assert val[0] == pytest.approx((1 / 200) * (4 / 8) / 5, rel=1e-14)
        assert val[0] == pytest.approx(5e-4, rel=1e-12)

    def test_nonuniform_grid(self):
        grid = SamplingGrid(((-2.0, -1.0, 1.0, 2.0),))
        val = single_source_nc_crb(grid, snr=1.0)
        assert val[0] == pytest.approx(0.05, rel=1e-14)

    def test_nonuniform_matches_full_machinery(self):
        grid = SamplingGrid(((-2.0, -1.0, 1.0, 2.0),))
        n, sigma2 = 20, 0.1
        snr = n * 1.0 / sigma2
        st_set = build_steering_set(grid, np.array([[0.7]]))
        numeric = det_nc_crb(st_set, [0.9], np.array([[1.0]]), sigma2, n)
        assert numeric.trace == pytest.approx(single_source_nc_crb(grid, snr)[0], rel=1e-10)

    def test_square_grid_symmetric_modes(self):
        grid = uniform_grid([3, 3])
        val = single_source_nc_crb(grid, snr=50.0)
        assert val[0] == val[1]

    def test_requires_centered_grid(self):
        with pytest.raises(ValueError, match="centered"):
            single_source_nc_crb(ula(4, "first"), snr=1.0)

    def test_requires_centro_symmetric(self):
        with pytest.raises(ValueError, match="centro-symmetric"):
            single_source_nc_crb(SamplingGrid(((-4 / 3, -1 / 3, 5 / 3),)), snr=1.0)

    def test_ula_closed_form(self):
        assert single_source_ula_nc_crb(4, 4, 200.0) == pytest.approx(5e-4, rel=1e-14)
        # 4x3 grid, second mode: 6/(12*8) = 0.0625
        assert single_source_ula_nc_crb(12, 3, 1.0) == pytest.approx(0.0625, rel=1e-14)

    def test_ula_closed_form_matches_coordinate_sum(self):
        for m in (2, 3, 4, 7, 10):
            grid = ula(m, "centroid")
            assert single_source_ula_nc_crb(m, m, 3.0) == pytest.approx(
                single_source_nc_crb(grid, 3.0)[0], rel=1e-13
            )

    def test_divisibility_check(self):
        with pytest.raises(ValueError, match="divisible"):
            single_source_ula_nc_crb(10, 4, 1.0)


class TestTwoSourceNcCrb:
    def test_decoupled_value_independent_of_separation(self):
        # rho=0, delta_phi=pi/2: 6/(M(M^2-1)) * (snr1+snr2)/(snr1*snr2)
        expected = 6 / (15 * 224) * 0.01
        for dmu in (0.01, 0.05, 0.2):
            got = two_source_nc_crb(params(dmu=dmu))
            assert got == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(1.7857142857e-5, rel=1e-9)

    def test_limit_value(self):
        # rho=0.5, delta_phi=pi/3, M=8, both SNRs 100
        p = params(m=8, dphi=np.pi / 3, rho=0.5, snr1=100.0, snr2=100.0)
        lim = nc_crb_limit_zero_sep(p)
        assert lim == pytest.approx(4.2328042328e-4, rel=1e-9)

    def test_limit_continuity(self):
        p_small = params(m=8, dmu=1e-5, dphi=np.pi / 3, rho=0.5, snr1=100.0, snr2=100.0)
        lim = nc_crb_limit_zero_sep(p_small)
        assert abs(two_source_nc_crb(p_small) - lim) / lim < 1e-4

    def test_limit_infinite_when_degenerate(self):
        assert nc_crb_limit_zero_sep(params(rho=1.0, dphi=0.0)) == math.inf
        assert nc_crb_limit_zero_sep(params(rho=0.0, dphi=np.pi / 2)) == pytest.approx(
            6 / (15 * 224) * 0.01, rel=1e-14
        )

    def test_tracks_numeric_bound(self):
        for dmu in (0.01, 0.03, 0.05):
            crb_num, nc_num = numeric_two_source(15, dmu, np.pi / 3, 0.5)
            closed = two_source_nc_crb(params(dmu=dmu, dphi=np.pi / 3, rho=0.5))
            assert abs(closed - nc_num) / nc_num < 0.01

    def test_phase_symmetry_and_periodicity(self):
        base = params(dphi=0.3, rho=0.4, dmu=0.07)
        mirrored = params(dphi=np.pi - 0.3, rho=0.4, dmu=0.07)
        shifted = params(dphi=0.3 + np.pi, rho=0.4, dmu=0.07)
        assert two_source_nc_crb(base) == pytest.approx(two_source_nc_crb(mirrored), rel=1e-12)
        assert two_source_nc_crb(base) == pytest.approx(two_source_nc_crb(shifted), rel=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="4 sensors"):
            params(m=3)
        with pytest.raises(ValueError, match="rho"):
            params(rho=1.5)

    def test_from_rotation_combines_reference(self):
        p = TwoSourceParams.from_rotation(m_sensors=8, delta_mu=0.1, delta_phi_rot=0.2,
                                          reference_delta=3.5, rho=0.0, snr1=1.0, snr2=1.0)
        assert p.delta_phi == pytest.approx(0.2 + 0.35)
        p = TwoSourceParams.from_rotation(m_sensors=8, delta_mu=-0.1, delta_phi_rot=-0.2,
                                          reference_delta=0.0, rho=0.0, snr1=1.0, snr2=1.0)
        assert p.delta_mu == 0.1
        assert p.delta_phi == pytest.approx(0.2)


class TestTwoSourceCrb:
    def test_uncorrelated_value(self):
        # rho=0, M=15, dmu=0.05, both SNRs 200
        got = two_source_crb(params(dmu=0.05))
        expected = (1 / 0.05**2) * 360 / (15 * 14 * 13 * 17 * 16) * 0.01
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(1.93924e-3, rel=1e-5)

    def test_decorrelation_identity(self):
        # coherent sources with quarter-turn phase separation behave as
        # uncorrelated ones at the same separation
        for dmu in (0.02, 0.1):
            coherent = two_source_crb(params(dmu=dmu, rho=1.0, dphi=np.pi / 2))
            uncorrelated = two_source_crb(params(dmu=dmu, rho=0.0, dphi=np.pi / 2))
            assert coherent == pytest.approx(uncorrelated, rel=1e-10)

    def test_diverges_at_zero_separation(self):
        assert two_source_crb(params(dmu=0.0)) == math.inf
        assert two_source_crb(params(dmu=0.0, rho=0.9, dphi=0.3)) == math.inf

    def test_tracks_numeric_bound(self):
        for dmu in (0.01, 0.05):
            crb_num, _ = numeric_two_source(15, dmu, np.pi / 4, 0.9)
            closed = two_source_crb(params(dmu=dmu, dphi=np.pi / 4, rho=0.9))
            assert abs(closed - crb_num) / crb_num < 0.01


class TestValidityRadius:
    def test_ten_percent_out_to_dmu_02(self):
        """Both truncated expressions stay within 10% of the numerics up to
        dmu = 0.2 rad at M = 15 (1% inside dmu <= 0.05 is asserted in the
        acceptance suite)."""
        for rho in (0.0, 0.5, 0.9):
            for dphi in (0.0, np.pi / 4, np.pi / 2):
                for dmu in (0.1, 0.15, 0.2):
                    crb_num, nc_num = numeric_two_source(15, dmu, dphi, rho)
                    p = params(dmu=dmu, dphi=dphi, rho=rho)
                    assert abs(two_source_nc_crb(p) - nc_num) / nc_num <= 0.10
                    assert abs(two_source_crb(p) - crb_num) / crb_num <= 0.10


class TestNcGain:
    def test_no_gain_cases(self):
        assert nc_gain(params(rho=1.0, dphi=0.7)) == 1.0
        assert nc_gain(params(rho=0.5, dphi=0.0)) == 1.0

    def test_maximum_gain_value(self):
        got = nc_gain(params(m=15, dmu=0.1, rho=0.0, dphi=np.pi / 2))
        assert got == pytest.approx(60 / (0.01 * 13 * 17), abs=1e-9)
        assert got == pytest.approx(27.149, abs=1e-3)

    def test_ratio_consistency(self, rng):
        for _ in range(50):
            p = params(
                m=int(rng.integers(4, 30)),
                dmu=float(rng.uniform(0.01, 0.3)),
                dphi=float(rng.uniform(0.05, np.pi / 2)),
                rho=float(rng.uniform(0, 0.99)),
                snr1=float(rng.uniform(1, 500)),
                snr2=float(rng.uniform(1, 500)),
            )
            ratio = two_source_crb(p) / two_source_nc_crb(p)
            assert nc_gain(p) == pytest.approx(ratio, rel=1e-10)

    def test_gain_at_least_one(self):
        # Outside dmu^2 (M-2)(M+2) <= 60 the truncated expression itself dips
        # below 1 (e.g. M=30, dmu=0.3 gives 0.962) -- that corner is far past
        # the small-separation regime, so the invariant is asserted inside
        # the expression's positivity radius.
        for m in (4, 7, 15, 30):
            for rho in (0.0, 0.3, 0.6, 0.9):
                for dphi in (0.0, np.pi / 8, np.pi / 4, np.pi / 2):
                    for dmu in (0.01, 0.1, 0.3):
                        if dmu**2 * (m - 2) * (m + 2) > 60:
                            continue
                        assert nc_gain(params(m=m, dmu=dmu, dphi=dphi, rho=rho)) >= 1 - 1e-9

    def test_gain_grows_unbounded_at_small_separation(self):
        dmus = np.geomspace(1e-4, 0.01, 10)
        gains = [nc_gain(params(dmu=x, rho=0.5, dphi=np.pi / 4)) for x in dmus]
        assert all(g2 < g1 for g1, g2 in zip(gains, gains[1:]))
        assert gains[0] > 1e5


class TestAlphaBetaGamma:
    def test_zero_separation(self):
        for m in (3, 4, 15):
            abg = alpha_beta_gamma(m, 0.0)
            assert abg.alpha == pytest.approx(m)
            assert abg.beta == pytest.approx(0.0)
            assert abg.gamma == pytest.approx(m * (m**2 - 1) / 12)

    def test_small_m_value(self):
        abg = alpha_beta_gamma(3, 0.1, taylor_order=2)
        assert abg.alpha.real == pytest.approx(2.99001, abs=5e-6)
        assert abg.alpha_taylor == pytest.approx(2.99, abs=1e-12)

    def test_exact_alpha_is_dirichlet_kernel(self):
        for m in (3, 8, 15):
            for dmu in (0.01, 0.3, 1.2):
                abg = alpha_beta_gamma(m, dmu)
                assert abg.alpha.real == pytest.approx(dirichlet_alpha(m, dmu), rel=1e-12)
                assert abs(abg.alpha.imag) < 1e-12 * m

    def test_taylor_order4_truncation_slope(self):
        """|alpha_exact - alpha_taylor(4)| must shrink like delta_mu^6.

        Fit over [1e-2, 1e-1]: below that the difference drops under the
        float64 resolution of alpha itself (~1e-15 relative).
        """
        m = 15
        dmus = np.geomspace(1e-2, 1e-1, 12)
        errs = [abs(alpha_beta_gamma(m, x, 4).alpha.real - alpha_beta_gamma(m, x, 4).alpha_taylor)
                for x in dmus]
        slope = np.polyfit(np.log(dmus), np.log(errs), 1)[0]
        assert abs(slope - 6.0) < 0.3

    def test_taylor_order2_truncation_slope(self):
        m = 15
        dmus = np.geomspace(1e-3, 1e-1, 12)
        errs = [abs(alpha_beta_gamma(m, x, 2).alpha.real - alpha_beta_gamma(m, x, 2).alpha_taylor)
                for x in dmus]
        slope = np.polyfit(np.log(dmus), np.log(errs), 1)[0]
        assert abs(slope - 4.0) < 0.3

    def test_printed_expansion_coefficients(self):
        # order-2 alpha: M - (M/24)(M^2-1) dmu^2
        m, dmu = 9, 0.05
        abg = alpha_beta_gamma(m, dmu, 2)
        assert abg.alpha_taylor == pytest.approx(m - m / 24 * (m**2 - 1) * dmu**2, rel=1e-14)
        # order-3-in-dmu beta term: (M/12)(M^2-1) dmu - (M/1440)(3M^4-10M^2+7) dmu^3
        abg4 = alpha_beta_gamma(m, dmu, 4)
        expected_beta = (m / 12 * (m**2 - 1) * dmu
                         - m / 1440 * (3 * m**4 - 10 * m**2 + 7) * dmu**3)
        assert abg4.beta_taylor == pytest.approx(expected_beta, rel=1e-13)
        # order-2 gamma term: M(M^2-1)/12 - (M/480)(3M^4-10M^2+7) dmu^2
        expected_gamma = (m * (m**2 - 1) / 12
                          - m / 480 * (3 * m**4 - 10 * m**2 + 7) * dmu**2)
        assert alpha_beta_gamma(m, dmu, 2).gamma_taylor == pytest.approx(expected_gamma, rel=1e-13)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            alpha_beta_gamma(5, 0.1, taylor_order=3)

    def test_result_type(self):
        assert isinstance(alpha_beta_gamma(5, 0.1), AlphaBetaGamma)


class TestTwoGroupsDecoupling:
    @staticmethod
    def scenario(mu, phi):
        d = len(phi)
        return SourceScenario(mu=np.atleast_2d(mu), phi=phi, powers=np.ones(d),
                              corr=0.0, n_snapshots=20, sigma2=0.1)

    def test_two_sources_quarter_turn(self):
        sc = self.scenario([[0.3, 0.5]], [0.0, np.pi / 2])
        assert two_groups_decoupling_check(ula(8, "centroid"), sc)

    def test_four_sources_two_groups(self):
        sc = self.scenario([[-1.0, 0.2, 0.8, 1.6]],
                           [0.3, 0.3 + np.pi, 0.3 + np.pi / 2, 0.3 + 3 * np.pi / 2])
        assert two_groups_decoupling_check(ula(8, "centroid"), sc)

    def test_quarter_pi_groups_do_not_decouple(self):
        sc = self.scenario([[-1.0, 0.2, 0.8, 1.6]],
                           [0.3, 0.3 + np.pi, 0.3 + np.pi / 4, 0.3 + np.pi + np.pi / 4])
        assert not two_groups_decoupling_check(ula(8, "centroid"), sc)

    def test_preconditions(self):
        sc = self.scenario([[0.3, 0.5]], [0.0, np.pi / 2])
        with pytest.raises(ValueError, match="centered"):
            two_groups_decoupling_check(ula(8, "first"), sc)
        correlated = SourceScenario(mu=[[0.3, 0.5]], phi=[0.0, np.pi / 2],
                                    powers=[1.0, 1.0], corr=0.5, n_snapshots=20, sigma2=0.1)
        with pytest.raises(ValueError, match="uncorrelated"):
            two_groups_decoupling_check(ula(8, "centroid"), correlated)
        three_groups = self.scenario([[0.1, 0.5, 1.0]], [0.0, 0.7, 2.0])
        with pytest.raises(ValueError, match="two phase groups"):
            two_groups_decoupling_check(ula(8, "centroid"), three_groups)
