import json
import math

import pytest

from dfthreshold.ber_model import ALL_VARIANTS, DEFAULT_VARIANT, decoding_set_pmf, mrc_best_of_ber
from dfthreshold.link_model import Scenario, average_link_snrs, rayleigh_bpsk_ber
from dfthreshold.ber_model import closed_form_ber
from dfthreshold.simulator import (
    MIN_BITS,
    McEstimate,
    _partition,
    default_validation_pairs,
    run_counts,
    simulate_ber,
    validate_closed_form,
    validate_pairs,
)

SYM4_10 = Scenario(1.0, 1.0, 1.0, 4, 10.0)


def genie_closed_form(s, t):
    """Exact BER when every decoding relay forwards the right bit."""
    lb = average_link_snrs(s)
    total = decoding_set_pmf(0, s.m, t, lb.gamma_sr_bar) * rayleigh_bpsk_ber(lb.gamma_sd_bar)
    for i in range(1, s.m + 1):
        total += decoding_set_pmf(i, s.m, t, lb.gamma_sr_bar) * mrc_best_of_ber(i, lb.gamma_rd_bar, lb.gamma_sd_bar)
    return total


class TestMcEstimate:
    def test_from_counts(self):
        e = McEstimate.from_counts(100, 10_000)
        assert e.ber == 0.01
        assert e.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(0.01 * 0.99 / 10_000))

    def test_zero_errors(self):
        assert McEstimate.from_counts(0, 10_000).ci95_halfwidth == 0.0


class TestPreconditions:
    def test_min_bits(self):
        with pytest.raises(ValueError):
            simulate_ber(SYM4_10, 1.0, MIN_BITS - 1, 0)

    def test_negative_threshold(self):
        with pytest.raises(ValueError):
            simulate_ber(SYM4_10, -1.0, MIN_BITS, 0)

    def test_workers(self):
        with pytest.raises(ValueError):
            simulate_ber(SYM4_10, 1.0, MIN_BITS, 0, workers=0)

    @pytest.mark.parametrize("n,w", [(10_000, 1), (10_001, 3), (99_999, 7)])
    def test_partition(self, n, w):
        parts = _partition(n, w)
        assert sum(parts) == n and len(parts) == w
        assert max(parts) - min(parts) < w


class TestDeterminism:
    def test_same_seed_identical(self):
        assert simulate_ber(SYM4_10, 2.0, 50_000, 11) == simulate_ber(SYM4_10, 2.0, 50_000, 11)

    def test_same_seed_identical_multiworker(self):
        a = simulate_ber(SYM4_10, 2.0, 40_000, 5, workers=2)
        b = simulate_ber(SYM4_10, 2.0, 40_000, 5, workers=2)
        assert a == b

    def test_different_seeds_differ(self):
        a = run_counts(SYM4_10, 2.0, 50_000, 1)
        b = run_counts(SYM4_10, 2.0, 50_000, 2)
        assert a != b

    def test_disjoint_seeds_agree_statistically(self):
        ok = 0
        cells = [(Scenario(1, 1, 1, m, db), g) for m in (1, 2, 4, 8) for db, g in ((0, 0.5), (4, 1), (8, 2), (4, 5), (0, 3))]
        for s, g in cells:
            a = simulate_ber(s, g, 40_000, 100)
            b = simulate_ber(s, g, 40_000, 200)
            ok += abs(a.ber - b.ber) <= 3 * math.hypot(a.ci95_halfwidth, b.ci95_halfwidth)
        assert ok >= 19


class TestAnalyticLimits:
    def test_direct_only_limit(self):
        # decode_fail_prob > 1 - 1e-9 for every relay
        t = 10.0 * 25.0
        e = simulate_ber(SYM4_10, t, 400_000, 3)
        assert abs(e.ber - rayleigh_bpsk_ber(10.0)) <= 3 * e.ci95_halfwidth
        assert rayleigh_bpsk_ber(10.0) == pytest.approx(0.023269, rel=1e-4)

    def test_empty_set_subpopulation(self):
        s = Scenario(1, 1, 2, 3, 4.0)
        c = run_counts(s, 3.0, 300_000, 9)
        p = c["errors_empty"] / c["n_empty"]
        ci = 1.96 * math.sqrt(p * (1 - p) / c["n_empty"])
        assert abs(p - rayleigh_bpsk_ber(2 * 10**0.4)) <= 3 * ci
        expected_frac = decoding_set_pmf(0, 3, 3.0, 10**0.4)
        assert c["n_empty"] / c["n"] == pytest.approx(expected_frac, abs=4 * math.sqrt(expected_frac / c["n"]))

    @pytest.mark.parametrize(
        "s,t",
        [(Scenario(1, 1, 1, 1, 4.0), 1.0), (Scenario(1, 1, 1, 4, 0.0), 1.0), (Scenario(2, 1, 0.5, 3, 6.0), 0.5),
         (Scenario(10, 10, 1, 6, 2.0), 8.0)],
    )
    def test_genie_relays_match_exact_selection_ber(self, s, t):
        e = simulate_ber(s, t, 400_000, 21, genie_relays=True)
        assert abs(e.ber - genie_closed_form(s, t)) <= 3 * e.ci95_halfwidth

    def test_single_relay_sanity_bound(self):
        s = Scenario(1, 1, 1, 1, 6.0)
        g = 10**0.6
        e = simulate_ber(s, 0.0, 200_000, 4)
        assert e.ber <= rayleigh_bpsk_ber(g) + rayleigh_bpsk_ber(g) + 3 * e.ci95_halfwidth

    def test_table_cell(self):
        # simulated truth sits a few percent above the closed form, inside the validation allowance
        s = Scenario(1, 1, 1, 4, 0.0)
        e = simulate_ber(s, 1.0, 10**6, 0)
        cf = closed_form_ber(s, 1.0)
        assert cf == pytest.approx(7.32e-2, rel=0.01)
        assert abs(e.ber - cf) <= 3 * e.ci95_halfwidth + 0.10 * cf


class TestValidation:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            validate_closed_form([], [1.0], MIN_BITS, 0)
        with pytest.raises(ValueError):
            validate_closed_form([SYM4_10], [], MIN_BITS, 0)
        with pytest.raises(ValueError):
            validate_pairs([], MIN_BITS, 0)

    def test_single_relay_variants_coincide(self):
        r = validate_closed_form([Scenario(1, 1, 1, 1, 5.0)], [1.0], MIN_BITS, 0)
        assert len({c.closed_form for c in r.cells}) == 1
        assert len(r.cells) == len(ALL_VARIANTS)

    def test_report_serialization(self):
        r = validate_closed_form([SYM4_10], [1.0, 3.0], 20_000, 7, variants=[DEFAULT_VARIANT])
        d = json.loads(r.to_json())
        assert d["n_bits"] == 20_000 and d["seed"] == 7
        assert len(d["cells"]) == 2
        assert d["best_variant"] == DEFAULT_VARIANT.label
        table = r.to_table()
        assert table.count("\n") >= 4
        assert DEFAULT_VARIANT.label in table

    def test_pair_seeds(self):
        pairs = [(SYM4_10, 1.0), (SYM4_10, 1.0)]
        r = validate_pairs(pairs, 20_000, 3, variants=[DEFAULT_VARIANT])
        assert r.cells[0].mc_ber == simulate_ber(SYM4_10, 1.0, 20_000, 3).ber
        assert r.cells[1].mc_ber == simulate_ber(SYM4_10, 1.0, 20_000, 4).ber

    def test_default_pairs(self):
        pairs = default_validation_pairs()
        assert len(pairs) == 12
        assert sorted({s.m for s, _ in pairs}) == [1, 2, 4, 8]
        assert all(0 <= s.ebn0_db <= 16 for s, _ in pairs)
