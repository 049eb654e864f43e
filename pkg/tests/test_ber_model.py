import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dfthreshold.ber_model import (
    ALL_VARIANTS,
    DEFAULT_VARIANT,
    FormulaVariant,
    OrderStatSize,
    closed_form_ber,
    decode_fail_prob,
    decoding_set_pmf,
    dual_branch_mrc_ber,
    error_propagation_weight,
    make_ber_function,
    mrc_best_of_ber,
    relay_error_given_reliable,
)
from dfthreshold.link_model import Scenario, erfc, rayleigh_bpsk_ber

E = math.exp(-1.0)
SYM4 = Scenario(1.0, 1.0, 1.0, 4, 0.0)


def naive_dual_branch(a, b):
    mu = lambda x: math.sqrt(x / (1 + x))  # noqa: E731
    return 0.5 * (1 - a / (a - b) * mu(a) + b / (a - b) * mu(b))


def dual_branch_quad(a, b):
    f = lambda y, x: 0.5 * erfc(math.sqrt(x + y)) * math.exp(-x / a - y / b) / (a * b)  # noqa: E731
    val, _ = integrate.dblquad(f, 0, np.inf, 0, np.inf, epsabs=1e-11, epsrel=1e-10)
    return val


def best_of_quad(n, a, b):
    """Best-of-n selection SNR density integrated against the dual-branch conditional BER."""

    def cond(x):
        # BER given relay SNR x, averaged over the exponential direct branch
        v, _ = integrate.quad(lambda y: 0.5 * erfc(math.sqrt(x + y)) * math.exp(-y / b) / b, 0, np.inf,
                              epsabs=1e-13, epsrel=1e-11)
        return v

    dens = lambda x: n * (1 - math.exp(-x / a)) ** (n - 1) * math.exp(-x / a) / a  # noqa: E731
    val, _ = integrate.quad(lambda x: cond(x) * dens(x), 0, np.inf, epsabs=1e-12, epsrel=1e-9, limit=200)
    return val


class TestFormulaVariant:
    def test_default(self):
        assert DEFAULT_VARIANT.include_binomial_coeff
        assert DEFAULT_VARIANT.order_stat_size is OrderStatSize.DECODING_SET_SIZE

    @pytest.mark.parametrize("v", ALL_VARIANTS)
    def test_dict_round_trip(self, v):
        assert FormulaVariant.from_dict(v.to_dict()) == v

    def test_labels_distinct(self):
        assert len({v.label for v in ALL_VARIANTS}) == 4


class TestDecodeFailProb:
    @pytest.mark.parametrize("t,g,expected", [(0.0, 3.0, 0.0), (2.0, 2.0, 1 - E), (np.inf, 1.0, 1.0)])
    def test_examples(self, t, g, expected):
        assert decode_fail_prob(t, g) == pytest.approx(expected, abs=1e-12)

    def test_vectorized(self):
        out = decode_fail_prob(np.array([0.0, 1.0]), 1.0)
        assert out.shape == (2,)

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError):
            decode_fail_prob(-1.0, 1.0)


class TestDecodingSetPmf:
    def test_single_relay(self):
        assert decoding_set_pmf(1, 1, 1.0, 1.0) == pytest.approx(E, rel=1e-12)

    def test_two_relays(self):
        assert decoding_set_pmf(1, 2, 1.0, 1.0) == pytest.approx(0.465088, rel=1e-6)

    def test_two_relays_monte_carlo(self):
        rng = np.random.default_rng(3)
        snr = rng.exponential(1.0, (200_000, 2))
        freq = np.mean((snr >= 1.0).sum(axis=1) == 1)
        assert decoding_set_pmf(1, 2, 1.0, 1.0) == pytest.approx(freq, abs=5e-3)

    def test_empty_set(self):
        assert decoding_set_pmf(0, 3, 1.0, 1.0) == pytest.approx(0.252580, rel=1e-5)

    def test_no_coefficient(self):
        v = FormulaVariant(include_binomial_coeff=False)
        assert decoding_set_pmf(1, 2, 1.0, 1.0, v) == pytest.approx(E * (1 - E), rel=1e-12)

    @given(st.integers(1, 12), st.floats(0.0, 50.0), st.floats(0.01, 100.0))
    def test_sums_to_one(self, m, t, g):
        total = math.fsum(decoding_set_pmf(i, m, t, g) for i in range(m + 1))
        assert abs(total - 1.0) <= 1e-12

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            decoding_set_pmf(3, 2, 1.0, 1.0)


class TestRelayError:
    def test_zero_threshold(self):
        assert relay_error_given_reliable(0.0, 1.0) == pytest.approx(0.1464466, rel=1e-6)

    @pytest.mark.parametrize("g", [0.01, 0.5, 1.0, 7.0, 100.0, 1e4])
    def test_zero_threshold_is_unconditional(self, g):
        assert abs(relay_error_given_reliable(0.0, g) - rayleigh_bpsk_ber(g)) <= 1e-10

    @pytest.mark.parametrize("t,g", [(1.0, 1.0), (0.3, 5.0), (4.0, 2.0), (10.0, 30.0)])
    def test_against_quadrature(self, t, g):
        val, _ = integrate.quad(lambda x: 0.5 * erfc(math.sqrt(x)) * math.exp(-x / g) / g, t, np.inf,
                                epsabs=1e-15, epsrel=1e-12)
        assert relay_error_given_reliable(t, g) == pytest.approx(val / math.exp(-t / g), rel=1e-8)

    def test_example(self):
        assert relay_error_given_reliable(1.0, 1.0) == pytest.approx(0.034921, rel=1e-4)

    def test_large_threshold(self):
        assert relay_error_given_reliable(1e6, 1.0) == pytest.approx(0.0, abs=1e-300)
        assert relay_error_given_reliable(np.inf, 1.0) == 0.0

    def test_decreasing_in_threshold(self):
        vals = relay_error_given_reliable(np.linspace(0, 40, 200), 3.0)
        assert np.all(np.diff(vals) <= 0)
        assert np.all(np.isfinite(vals))


class TestErrorPropagationWeight:
    @pytest.mark.parametrize("a,b,expected", [(3.0, 3.0, 0.5), (10.0, 1.0, 0.909091), (1e-300, 1.0, 0.0)])
    def test_examples(self, a, b, expected):
        assert error_propagation_weight(a, b) == pytest.approx(expected, abs=1e-6)


class TestDualBranchMrc:
    @pytest.mark.parametrize("a", [0.2, 1.0, 3.0, 10.0, 50.0])
    @pytest.mark.parametrize("b", [0.2, 1.0, 3.0, 10.0, 50.0])
    def test_against_double_quadrature(self, a, b):
        assert dual_branch_mrc_ber(a, b) == pytest.approx(dual_branch_quad(a, b), abs=1e-6)

    @given(st.floats(0.01, 1e3), st.floats(0.01, 1e3))
    def test_symmetric(self, a, b):
        assert dual_branch_mrc_ber(a, b) == pytest.approx(dual_branch_mrc_ber(b, a), rel=1e-12)

    @given(st.floats(0.01, 100.0), st.floats(0.02, 100.0))
    def test_matches_textbook_form_off_singularity(self, a, b):
        if abs(a - b) > 0.1 * max(a, b):
            assert dual_branch_mrc_ber(a, b) == pytest.approx(naive_dual_branch(a, b), rel=1e-8, abs=1e-12)

    def test_equal_means(self):
        p = rayleigh_bpsk_ber(1.0)
        assert dual_branch_mrc_ber(1.0, 1.0) == pytest.approx(p * p * (3 - 2 * p), rel=1e-12)


class TestMrcBestOf:
    def test_single_relay_example(self):
        assert mrc_best_of_ber(1, 2.0, 1.0) == pytest.approx(0.037057, rel=1e-5)

    def test_equal_means_example(self):
        assert mrc_best_of_ber(1, 1.0, 1.0) == pytest.approx(0.0580582, rel=1e-5)

    def test_vanishing_relay_branch(self):
        assert mrc_best_of_ber(1, 1e-12, 1.0) == pytest.approx(0.1464466, rel=1e-6)

    @pytest.mark.parametrize("n,a,b", [(2, 1.0, 1.0), (3, 4.0, 1.0), (4, 10.0, 10.0), (6, 2.5, 0.7)])
    def test_against_order_statistic_quadrature(self, n, a, b):
        assert mrc_best_of_ber(n, a, b) == pytest.approx(best_of_quad(n, a, b), rel=1e-6)

    @pytest.mark.parametrize("n,k", [(2, 1), (4, 1), (4, 3), (8, 5)])
    def test_continuity_across_singularity(self, n, k):
        # term k is singular in the textbook form when a/(k+1) == b
        a, b = 3.0 * (k + 1), 3.0
        at = mrc_best_of_ber(n, a, b)
        for d in (1e-9, -1e-9, 1e-7, -1e-7):
            assert abs(mrc_best_of_ber(n, a, b * (1 + d)) - at) < 1e-8

    def test_decreasing_in_branch_count(self):
        vals = [mrc_best_of_ber(n, 5.0, 2.0) for n in range(1, 10)]
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_nonnegative_at_high_snr(self):
        assert mrc_best_of_ber(8, 1e5, 1e5) >= 0.0


class TestClosedFormBer:
    def test_table_examples(self):
        assert closed_form_ber(SYM4, 1.0) == pytest.approx(7.32e-2, rel=0.01)
        assert closed_form_ber(Scenario(1, 1, 1, 4, 20.0), 10.0) == pytest.approx(2.96e-7, rel=0.01)

    @pytest.mark.parametrize("s", [SYM4, Scenario(10, 10, 1, 6, 13), Scenario(3.25, 1, 10, 2, 3)])
    def test_infinite_threshold_is_direct_link(self, s):
        direct = rayleigh_bpsk_ber(s.sigma_sd_sq * 10 ** (s.ebn0_db / 10))
        assert closed_form_ber(s, 1e9) == pytest.approx(direct, rel=1e-12)

    def test_vectorized_matches_scalar(self):
        f = make_ber_function(SYM4)
        grid = np.linspace(0, 20, 11)
        assert np.allclose(f(grid), [f(t) for t in grid], rtol=0, atol=0)

    def test_zero_threshold_manual(self):
        # every relay decodes: C(4,4) term only
        s = Scenario(1, 1, 1, 4, 5.0)
        g = 10 ** 0.5
        eps = rayleigh_bpsk_ber(g)
        expected = eps * g / (2 * g) + (1 - eps) * mrc_best_of_ber(4, g, g)
        assert closed_form_ber(s, 0.0) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(0.5, 10), st.floats(0.5, 10), st.floats(0.5, 10), st.integers(1, 8), st.floats(-5, 30),
        st.floats(0, 60), st.sampled_from(ALL_VARIANTS),
    )
    def test_range(self, sr, rd, sd, m, db, t, v):
        b = closed_form_ber(Scenario(sr, rd, sd, m, db), t, v)
        assert 0.0 < b <= 0.5

    def test_variants_coincide_for_single_relay(self):
        s = Scenario(2, 3, 1, 1, 6.0)
        vals = {closed_form_ber(s, 2.0, v) for v in ALL_VARIANTS}
        assert len(vals) == 1

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError):
            closed_form_ber(SYM4, -0.1)
