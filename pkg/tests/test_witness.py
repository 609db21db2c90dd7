import json
import math

import numpy as np
import pytest

from gaussfade import (
    ChannelError,
    ChannelMoments,
    DeterministicPdt,
    IndependentProductPdt,
    MisuseError,
    UniformMarginal,
    adaptive_correlate,
    apply_channel,
    displace,
    duan_matrix,
    duan_witness_correlated,
    moments_from_pdt,
    simon_witness_direct,
    tmsv_state,
    verdict,
    witness_correlated,
    witness_expansion,
    witness_uncorrelated_zero_mean,
)
from gaussfade.witness import cross_check_direct
from gaussfade.sampling import (
    random_channel_moments,
    random_correlated_moments,
    random_entangled_state,
    random_noisy_entangled_state,
    random_state,
)

M_16 = ChannelMoments(t_a=0.398, t_b=0.398, t_a2=0.163, t_b2=0.163, t_ab=0.158404)
M_144 = ChannelMoments(t_a=0.027, t_b=0.027, t_a2=0.001, t_b2=0.001, t_ab=0.000729)

SINH2_1 = math.sinh(1.0) ** 2
SC_1 = math.sinh(1.0) * math.cosh(1.0)


def assert_close(a, b, rel=1e-9, floor=1e-12):
    assert abs(a - b) <= max(floor, rel * max(abs(a), abs(b)))


def random_uncorrelated_moments(rng):
    """Valid moments with <T_aT_b> = <T_a><T_b> exactly."""
    ta, tb = rng.uniform(0.1, 1.0, size=2)
    ta2 = rng.uniform(ta * ta, ta)
    tb2 = rng.uniform(tb * tb, tb)
    return ChannelMoments(ta, tb, ta2, tb2, ta * tb)


class TestOracleEquality:
    def test_random_pairs(self):
        rng = np.random.default_rng(0)
        for i in range(500):
            if i % 3 == 0:
                st = random_noisy_entangled_state(rng, displaced=True)
            elif i % 3 == 1:
                st = random_entangled_state(rng, displaced=True)
            else:
                st = random_state(rng, displaced=True)
            m = random_correlated_moments(rng) if i % 4 == 0 else random_channel_moments(rng)
            w_e = witness_expansion(st, m).w_atm
            w_d = cross_check_direct(st, m)
            assert_close(w_e, w_d)

    def test_term_sum_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            st = random_state(rng, displaced=True)
            m = random_channel_moments(rng)
            r = witness_expansion(st, m)
            total = r.term_loss + r.term_N + r.term_F + r.term_S
            assert_close(total, r.w_atm, rel=1e-10)

    def test_displacement_vector_wiring(self):
        # An asymmetric displacement through a fluctuating correlated channel
        # exercises every block of the S sandwich; a swapped or unconjugated
        # component would break equality with the direct determinant.
        st = displace(tmsv_state(0.8), 1.0 + 0.0j, 0.0 + 0.5j)
        m = moments_from_pdt(adaptive_correlate(IndependentProductPdt(UniformMarginal(), UniformMarginal())))
        r = witness_expansion(st, m)
        assert r.term_S != 0.0
        assert_close(r.w_atm, cross_check_direct(st, m))

    def test_degenerate_channel_rejected(self):
        m = ChannelMoments(0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ChannelError, match="degenerate"):
            witness_expansion(tmsv_state(1.0), m)


class TestTermSigns:
    def test_decay_terms_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(300):
            st = random_state(rng, displaced=True)
            m = random_channel_moments(rng)
            r = witness_expansion(st, m)
            scale = max(1.0, abs(r.w_atm))
            assert r.term_N >= -1e-9 * scale
            assert r.term_F >= -1e-9 * scale

    def test_uncorrelated_displacement_term_nonnegative(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            st = random_state(rng, displaced=True)
            m = random_uncorrelated_moments(rng)
            r = witness_expansion(st, m)
            assert r.term_S >= -1e-9 * max(1.0, abs(r.w_atm))


class TestDeterministicReduction:
    def test_terms_collapse(self):
        st = displace(tmsv_state(1.0), 1.3 - 0.2j, 0.4 + 1.1j)
        m = moments_from_pdt(DeterministicPdt(0.7, 0.5))
        r = witness_expansion(st, m)
        scale = max(1.0, abs(r.w_atm))
        assert abs(r.term_N) <= 1e-12 * scale
        assert abs(r.term_F) <= 1e-12 * scale
        assert abs(r.term_S) <= 1e-12 * scale
        assert_close(r.term_loss, r.w_atm, rel=1e-12)
        assert r.gamma == pytest.approx(1.0, abs=1e-12)
        assert r.delta_gamma == 0.0

    def test_matches_direct_loss_witness(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            st = random_state(rng, displaced=True)
            ea, eb = rng.uniform(0.05, 1.0, size=2)
            m = moments_from_pdt(DeterministicPdt(ea, eb))
            assert_close(witness_expansion(st, m).w_atm, cross_check_direct(st, m), rel=1e-12)


class TestUncorrelatedZeroMean:
    def test_preset_channel_verdicts(self):
        st = tmsv_state(1.0)
        assert witness_uncorrelated_zero_mean(st, M_16) < 0.0
        assert witness_uncorrelated_zero_mean(st, M_144) > 0.0

    def test_equals_expansion(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            st = random_state(rng, displaced=False)
            m = random_uncorrelated_moments(rng)
            assert witness_uncorrelated_zero_mean(st, m) == witness_expansion(st, m).w_atm

    def test_correlated_channel_rejected(self):
        m = ChannelMoments(0.5, 0.5, 0.3, 0.3, 0.3)  # Gamma = 1, cov > 0
        with pytest.raises(MisuseError, match="correlated"):
            witness_uncorrelated_zero_mean(tmsv_state(1.0), m)

    def test_displaced_state_rejected(self):
        st = displace(tmsv_state(1.0), 0.1, 0.0)
        with pytest.raises(MisuseError, match="zero means"):
            witness_uncorrelated_zero_mean(st, M_16)

    @pytest.mark.parametrize("m", [M_16, M_144], ids=["1p6km", "144km"])
    def test_tmsv_threshold_is_artanh_gamma(self, m):
        gamma = m.t_ab / math.sqrt(m.t_a2 * m.t_b2)
        target = math.atanh(gamma)

        def w(xi):
            return witness_uncorrelated_zero_mean(tmsv_state(xi), m)

        # exactly one sign change on (0, 5]
        grid = np.linspace(1e-4, 5.0, 500)
        signs = [w(x) < 0 for x in grid]
        assert sum(a != b for a, b in zip(signs, signs[1:])) == 1
        lo, hi = 1e-4, 5.0
        assert w(lo) < 0 < w(hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if w(mid) < 0:
                lo = mid
            else:
                hi = mid
        assert abs(0.5 * (lo + hi) - target) <= 1e-6

    def test_displacement_never_decreases_witness(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            st0 = random_state(rng, displaced=False)
            m = random_uncorrelated_moments(rng)
            dir_a = np.exp(1j * rng.uniform(0, 2 * np.pi))
            dir_b = np.exp(1j * rng.uniform(0, 2 * np.pi))
            values = []
            for r in (0.0, 0.5, 1.0, 2.0, 4.0):
                st = displace(st0, r * dir_a, r * dir_b)
                values.append(witness_expansion(st, m).w_atm)
            scale = max(1.0, max(abs(v) for v in values))
            assert all(b >= a - 1e-10 * scale for a, b in zip(values, values[1:]))


class TestCorrelated:
    def test_uncorrelated_channel_rejected(self):
        with pytest.raises(MisuseError, match="not perfectly correlated"):
            witness_correlated(tmsv_state(1.0), M_16)

    def test_zero_mean_equals_deterministic_loss(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            st = random_entangled_state(rng)
            m = random_correlated_moments(rng)
            r = witness_correlated(st, m)
            det_m = moments_from_pdt(DeterministicPdt(m.t_a2, m.t_b2))
            assert_close(r.w_atm, cross_check_direct(st, det_m), rel=1e-10)
            assert_close(r.w_atm, witness_expansion(st, m).w_atm)

    def test_entangled_verdict_preserved_zero_mean(self):
        # Loss-robust entangled inputs keep a negative witness through any
        # perfectly correlated channel (the zero-mean correlated witness is
        # the deterministic-loss witness at eta = <T^2>).
        rng = np.random.default_rng(8)
        for _ in range(50):
            st = random_entangled_state(rng)
            m = random_correlated_moments(rng)
            assert witness_correlated(st, m).w_atm < 0.0

    def test_deterministic_degenerate_allowed(self):
        st = displace(tmsv_state(0.7), 1.0 + 2.0j, -0.3 + 0.1j)
        m = moments_from_pdt(DeterministicPdt(0.6, 0.6))
        r = witness_correlated(st, m)
        assert r.gamma == 1.0 and r.delta_gamma == 0.0
        assert r.term_S == 0.0
        assert_close(r.w_atm, cross_check_direct(st, m), rel=1e-12)

    def test_displaced_report_matches_direct(self):
        m = moments_from_pdt(adaptive_correlate(IndependentProductPdt(UniformMarginal(), UniformMarginal())))
        st = displace(tmsv_state(0.5), 3.0 + 1.0j, 2.0 - 4.0j)
        r = witness_correlated(st, m)
        assert r.term_S != 0.0
        assert_close(r.w_atm, cross_check_direct(st, m))

    def test_report_json_shape(self):
        r = witness_correlated(tmsv_state(1.0), moments_from_pdt(DeterministicPdt(0.5, 0.5)))
        d = r.to_dict()
        payload = json.loads(json.dumps(d))
        assert set(payload) == {"w_atm", "terms", "gamma", "delta_gamma", "entangled"}
        assert set(payload["terms"]) == {"loss", "N", "F", "S"}
        assert payload["entangled"] is True


class TestDuanCorrelated:
    def test_asymmetric_moments_rejected(self):
        m = ChannelMoments(0.5, 0.6, 0.3, 0.4, 0.34)
        with pytest.raises(MisuseError, match="symmetric"):
            duan_witness_correlated(tmsv_state(1.0), m)

    def test_uncorrelated_rejected(self):
        with pytest.raises(MisuseError, match="not perfectly correlated"):
            duan_witness_correlated(tmsv_state(1.0), M_16)

    def test_zero_displacement(self):
        m = random_correlated_moments(np.random.default_rng(9))
        st = tmsv_state(1.0)
        value, persistent = duan_witness_correlated(st, m)
        assert persistent == 0.0
        det_d = float(np.linalg.det(duan_matrix(st)).real)
        assert det_d == pytest.approx(-SINH2_1, rel=1e-12)
        assert value == pytest.approx(m.t_a2 ** 2 * det_d, rel=1e-12)

    def test_tmsv_equal_real_displacement(self):
        alpha = 0.8
        st = displace(tmsv_state(1.0), alpha, alpha)
        m = moments_from_pdt(adaptive_correlate(IndependentProductPdt(UniformMarginal(), UniformMarginal())))
        value, persistent = duan_witness_correlated(st, m)
        expected = 2.0 * alpha ** 2 * (SINH2_1 - SC_1)
        assert persistent == pytest.approx(expected, rel=1e-12)
        assert persistent < 0.0

    def test_persistent_value_channel_independent(self):
        rng = np.random.default_rng(10)
        st = displace(tmsv_state(0.6), 1.5 - 0.7j, -0.2 + 2.1j)
        values = {duan_witness_correlated(st, random_correlated_moments(rng))[1] for _ in range(10)}
        assert len(values) == 1

    def test_value_matches_output_duan_determinant(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            st = random_entangled_state(rng, displaced=True)
            m = random_correlated_moments(rng)
            value, _ = duan_witness_correlated(st, m)
            direct = float(np.linalg.det(duan_matrix(apply_channel(st, m))).real)
            assert_close(value, direct, rel=1e-10)


class TestVerdictFloor:
    def test_boundary_band(self):
        assert verdict(0.0) == "boundary"
        assert verdict(5e-13) == "boundary"
        assert verdict(-5e-13) == "boundary"
        assert verdict(-1e-9) is True
        assert verdict(1e-9) is False

    def test_identity_channel_tmsv_zero(self):
        m = moments_from_pdt(DeterministicPdt(1.0, 1.0))
        r = witness_expansion(tmsv_state(0.0), m)
        assert r.entangled == "boundary"
