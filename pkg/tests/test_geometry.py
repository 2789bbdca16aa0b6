import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotier.geometry import (MIN_DISTANCE, Population, SystemParams, draw_users, path_gain,
                              sample_trial, sample_user)


def test_k_prime_recomputed(params):
    assert params.k_prime == pytest.approx(128 / 10 ** 0.7, rel=1e-15)
    assert SystemParams(gamma_db=0.0).k_prime == 128.0


@pytest.mark.parametrize("field, value", [
    ("hotspot_density", 1.5),
    ("hotspot_density", -0.1),
    ("confidence", 1.0),
    ("trials", 0),
    ("hotspot_side", 1000.0),
    ("x0", 450.0),
    ("b_macro", 0.0),
])
def test_invalid_params_rejected(field, value):
    with pytest.raises(ValueError, match=field if field not in ("x0",) else "inside"):
        SystemParams(**{field: value})


class TestPathGain:

    def test_breakpoint_identity(self):
        assert path_gain(100.0, 100.0, 7.0, 0.0) == pytest.approx(7.0)

    def test_fourth_power_beyond_breakpoint(self):
        assert path_gain(200.0, 100.0, 7.0, 0.0) == pytest.approx(7.0 / 16)

    def test_square_law_inside_with_shadowing(self):
        assert path_gain(50.0, 100.0, 1.0, 10.0) == pytest.approx(40.0)

    def test_continuous_at_breakpoint(self):
        eps = 1e-9
        assert path_gain(100.0 - eps, 100.0, 1.0, 0.0) == pytest.approx(path_gain(100.0 + eps, 100.0, 1.0, 0.0))

    @pytest.mark.parametrize("d", [0.0, -3.0])
    def test_nonpositive_distance(self, d):
        with pytest.raises(ValueError):
            path_gain(d, 100.0, 1.0, 0.0)

    @given(st.floats(0.1, 5000), st.floats(0.1, 5000), st.floats(-30, 30))
    def test_monotone_in_distance(self, d1, d2, chi):
        lo, hi = sorted((d1, d2))
        assert path_gain(lo, 100.0, 1.0, chi) >= path_gain(hi, 100.0, 1.0, chi)

    def test_vectorized(self):
        d = np.array([50.0, 100.0, 200.0])
        np.testing.assert_allclose(path_gain(d, 100.0, 1.0, 0.0), [4.0, 1.0, 1 / 16])


class TestSampling:

    def test_no_hotspot_users_when_density_zero(self, rng):
        p = SystemParams(hotspot_density=0.0)
        users = draw_users(p, 20_000, rng)
        assert not users.hd.any()
        assert users.x.min() >= -500 and users.x.max() < 500
        # LD users cover the whole region, not just the hotspot
        assert users.x.min() < -400 and users.y.max() > 400

    def test_all_hotspot_users_when_density_one(self, rng):
        p = SystemParams(hotspot_density=1.0)
        users = draw_users(p, 50_000, rng)
        assert users.hd.all()
        assert np.all(np.abs(users.x - 300) <= 100) and np.all(np.abs(users.y) <= 100)
        assert users.x.mean() == pytest.approx(300, abs=1.0)
        assert users.y.mean() == pytest.approx(0, abs=1.0)

    def test_hotspot_fraction(self, rng):
        users = draw_users(SystemParams(hotspot_density=0.5), 100_000, rng)
        # binomial sd is 0.0016; 0.01 is > 6 sd
        assert abs(users.hd.mean() - 0.5) <= 0.01

    def test_shadowing_spread_per_base(self, rng):
        users = draw_users(SystemParams(), 200_000, rng)
        assert users.chi_macro_db.std() == pytest.approx(8.0, rel=0.01)
        assert users.chi_micro_db.std() == pytest.approx(4.0, rel=0.01)
        assert abs(np.corrcoef(users.chi_macro_db, users.chi_micro_db)[0, 1]) < 0.01

    def test_gains_match_path_gain(self, rng):
        p = SystemParams()
        u = sample_user(p, rng)
        x, y = u.position
        d_m = max(math.hypot(x, y), MIN_DISTANCE)
        d_u = max(math.hypot(x - p.x0, y), MIN_DISTANCE)
        assert u.t_macro == pytest.approx(path_gain(d_m, p.b_macro, p.h_ratio, u.chi_macro_db))
        assert u.t_micro == pytest.approx(path_gain(d_u, p.b_micro, 1.0, u.chi_micro_db))

    @settings(max_examples=50)
    @given(seed=st.integers(0, 2 ** 32), p_h=st.floats(0, 1))
    def test_positions_stay_in_their_squares(self, seed, p_h):
        p = SystemParams(hotspot_density=p_h)
        trial = sample_trial(p, 40, seed=seed)
        for u in trial.users:
            x, y = u.position
            assert -500 <= x < 500 and -500 <= y < 500
            if u.population is Population.HD:
                assert 200 <= x < 400 and -100 <= y < 100
            assert u.t_macro > 0 and u.t_micro > 0


class TestTrials:

    def test_single_user(self, params, rng):
        assert len(sample_trial(params, 1, rng)) == 1

    def test_empty_trial_rejected(self, params, rng):
        with pytest.raises(ValueError):
            sample_trial(params, 0, rng)

    def test_seeded_trials_repeat(self, params):
        a = sample_trial(params, 25, seed=99, trial_index=3)
        b = sample_trial(params, 25, seed=99, trial_index=3)
        c = sample_trial(params, 25, seed=99, trial_index=4)
        assert a == b
        assert a.seed_info == (99, 3)
        assert a != c

    def test_hotspot_users_hear_the_microcell_better(self):
        p = SystemParams(hotspot_density=0.5)
        hd, ld = [], []
        for t in range(200):
            for u in sample_trial(p, 30, seed=7, trial_index=t).users:
                (hd if u.population is Population.HD else ld).append(u.t_micro)
        assert np.mean(hd) > np.mean(ld)
