import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import K_PRIME
from twotier.approx import (MomentEstimate, approx1_feasible, approx2_bound, approx2_capacity,
                            estimate_moments, gaussian_feasibility_probability, macro_share,
                            normal_quantile)
from twotier.exact import GainTable
from twotier.geometry import SystemParams, draw_gains, trial_rng
from twotier.search import find_capacity, feasibility_probability

gain_lists = st.integers(1, 80).flatmap(lambda n: st.tuples(
    st.lists(st.floats(1e-6, 1e3), min_size=n, max_size=n),
    st.lists(st.floats(1e-6, 1e3), min_size=n, max_size=n)))


class TestApprox1:

    def test_single_user(self):
        v = approx1_feasible(GainTable([3.0], [7.0]), K_PRIME)
        assert v.feasible
        # A^2 + B^2 = 0.09 + 0.49
        assert v.diagnostic == pytest.approx(K_PRIME - 0.58)

    @pytest.mark.parametrize("n, expected", [(50, True), (51, True), (52, False), (60, False)])
    def test_identical_users(self, n, expected):
        # A = B = n/2 gives n^2/2 < n K'  <=>  n < 2K' = 51.08
        assert approx1_feasible(GainTable(np.ones(n), np.ones(n)), K_PRIME).feasible is expected

    @given(gain_lists, st.floats(1e-6, 1e6))
    def test_scale_invariant(self, gains, c):
        g = GainTable(*gains)
        margin = approx1_feasible(g, K_PRIME).diagnostic
        assume(abs(margin) > 1e-6)
        assert approx1_feasible(g.scaled(c), K_PRIME).feasible == approx1_feasible(g, K_PRIME).feasible

    @given(gain_lists, st.randoms(use_true_random=False))
    def test_permutation_invariant(self, gains, rnd):
        g = GainTable(*gains)
        order = list(range(g.n))
        rnd.shuffle(order)
        a, b = approx1_feasible(g, K_PRIME), approx1_feasible(g.permuted(order), K_PRIME)
        assume(abs(a.diagnostic) > 1e-6)
        assert a.feasible == b.feasible

    @given(gain_lists)
    def test_never_feasible_at_or_above_twice_k(self, gains):
        g = GainTable(*gains)
        if g.n >= 2 * K_PRIME:
            assert not approx1_feasible(g, K_PRIME).feasible


class TestApprox2:

    def test_normal_quantile(self):
        assert normal_quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-9)
        assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_balanced_no_spread(self):
        assert approx2_capacity(MomentEstimate(0.5, 0.0, 1), K_PRIME, 0.95) == 51

    def test_single_base_limit(self):
        assert approx2_capacity(MomentEstimate(1.0, 0.0, 1), K_PRIME, 0.95) == 25

    @given(st.floats(0.0, 0.5))
    def test_balanced_ignores_sigma(self, sigma):
        assert approx2_capacity(MomentEstimate(0.5, sigma, 1), K_PRIME, 0.95) == 51

    def test_matches_direct_formula(self):
        mu, sigma = 0.3, 0.35
        spread = math.sqrt(1 - 2 * mu + 2 * mu * mu)
        expected = ((math.sqrt(K_PRIME) - 1.6448536269514722 * sigma * abs(2 * mu - 1) / spread) / spread) ** 2
        assert approx2_bound(MomentEstimate(mu, sigma, 1), K_PRIME, 0.95) == pytest.approx(expected, rel=1e-9)

    def test_nonpositive_numerator_gives_zero(self):
        assert approx2_capacity(MomentEstimate(0.99, 50.0, 1), K_PRIME, 0.95) == 0

    @given(st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
    def test_nonincreasing_in_sigma(self, mu, s1, s2):
        lo, hi = sorted((s1, s2))
        assert (approx2_capacity(MomentEstimate(mu, hi, 1), K_PRIME, 0.95)
                <= approx2_capacity(MomentEstimate(mu, lo, 1), K_PRIME, 0.95))

    @given(st.floats(0.0, 1.0), st.floats(0.0, 0.5))
    def test_symmetric_in_mu(self, mu, sigma):
        a = approx2_bound(MomentEstimate(mu, sigma, 1), K_PRIME, 0.95)
        b = approx2_bound(MomentEstimate(1 - mu, sigma, 1), K_PRIME, 0.95)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


class TestMoments:

    def test_colocated_identical_bases(self):
        p = SystemParams(x0=0.0, h_ratio=1.0, sigma_macro_db=0.0, sigma_micro_db=0.0)
        m = estimate_moments(p, 20_000, 1)
        assert m.mu == pytest.approx(0.5, abs=1e-12)
        assert m.sigma == pytest.approx(0.0, abs=1e-12)

    def test_colocated_equal_shadowing_is_balanced(self):
        p = SystemParams(x0=0.0, h_ratio=1.0, sigma_macro_db=6.0, sigma_micro_db=6.0)
        assert estimate_moments(p, 200_000, 1).mu == pytest.approx(0.5, abs=0.005)

    def test_dominant_macrocell(self):
        m = estimate_moments(SystemParams(h_ratio=1e12), 20_000, 1)
        assert m.mu > 1 - 1e-4
        assert m.sigma < 1e-3

    def test_chunked_estimate_matches_direct(self, monkeypatch):
        import twotier.approx as approx

        monkeypatch.setattr(approx, "MOMENT_CHUNK", 7_000)
        p = SystemParams(hotspot_density=0.3)
        m = approx.estimate_moments(p, 30_000, 11, 2)
        chunks = [macro_share(*draw_gains(p, min(7_000, 30_000 - s), trial_rng(11, 2, c)))
                  for c, s in enumerate(range(0, 30_000, 7_000))]
        r = np.concatenate(chunks)
        assert m.samples == 30_000
        assert m.mu == pytest.approx(r.mean(), rel=1e-12)
        assert m.sigma == pytest.approx(r.std(ddof=1), rel=1e-10)

    def test_variance_bound(self):
        for p_h in (0.0, 0.5, 1.0):
            m = estimate_moments(SystemParams(hotspot_density=p_h), 50_000, 3)
            assert 0 < m.mu < 1
            assert m.sigma ** 2 <= m.mu * (1 - m.mu)

    def test_reference_regression(self):
        # frozen from a 10^6-sample run at P_h = 0.5
        m = estimate_moments(SystemParams(hotspot_density=0.5), 10 ** 6, 2024, 3, 500000)
        assert m.mu == pytest.approx(0.48468505425666164, rel=1e-12)
        assert m.sigma == pytest.approx(0.41189999153720225, rel=1e-12)


@pytest.mark.parametrize("p_h", [0.0, 0.75, 1.0])
def test_gaussian_prediction_near_capacity(p_h):
    params = SystemParams(hotspot_density=p_h, trials=4000)
    moments = estimate_moments(params, 400_000, 21)
    n_star = find_capacity(params, "approx1", seed=21).capacity
    for n in (n_star - 2, n_star, n_star + 2):
        mc = feasibility_probability(params, n, "approx1", seed=21).p_hat
        assert abs(mc - gaussian_feasibility_probability(moments, n, params.k_prime)) <= 0.05
