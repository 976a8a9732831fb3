from __future__ import annotations

import math

import numpy as np
import pytest

import jumpvol as jv
from jumpvol.errors import ParameterError, SizeError


class TestPricesToReturns:
    def test_equal_prices_give_zero(self):
        series = jv.prices_to_returns([100.0, 100.0])
        assert series.returns.tolist() == [0.0]

    def test_one_percent_move(self):
        series = jv.prices_to_returns([100.0, 101.0])
        assert series.returns[0] == pytest.approx(100.0 * math.log(1.01), abs=1e-12)
        assert series.returns[0] == pytest.approx(0.9950330853155723, abs=1e-10)

    def test_three_prices_direct_formula(self):
        prices = [100.0, 101.0, 99.0]
        series = jv.prices_to_returns(prices)
        expected = [100.0 * (math.log(prices[i + 1]) - math.log(prices[i])) for i in range(2)]
        np.testing.assert_allclose(series.returns, expected, atol=1e-12)
        np.testing.assert_allclose(series.returns, [0.995033, -2.000067], atol=5e-7)

    def test_round_trip_random_paths(self):
        gen = np.random.default_rng(99)
        for _ in range(20):
            n = int(gen.integers(2, 60))
            prices = np.exp(gen.normal(0.0, 0.02, n).cumsum()) * gen.uniform(5.0, 500.0)
            series = jv.prices_to_returns(prices)
            back = jv.returns_to_prices(series, prices[0])
            np.testing.assert_allclose(back, prices, rtol=1e-10)

    def test_errors(self):
        with pytest.raises(ParameterError):
            jv.prices_to_returns([100.0, -1.0])
        with pytest.raises(ParameterError):
            jv.prices_to_returns([100.0, 0.0])
        with pytest.raises(SizeError):
            jv.prices_to_returns([100.0])
        with pytest.raises(SizeError):
            jv.prices_to_returns([100.0, 101.0], timestamps=["a"])

    def test_timestamps_keep_later_label(self):
        series = jv.prices_to_returns([1.0, 2.0, 3.0], timestamps=["d0", "d1", "d2"])
        assert series.timestamps == ["d1", "d2"]


class TestReturnsSeries:
    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            jv.ReturnsSeries(np.array([0.1, math.nan]))
        with pytest.raises(ParameterError):
            jv.ReturnsSeries(np.array([0.1, math.inf]))

    def test_timestamp_length_checked(self):
        with pytest.raises(SizeError):
            jv.ReturnsSeries(np.array([0.1, 0.2]), timestamps=["only-one"])

    def test_values_read_only(self):
        series = jv.ReturnsSeries(np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            series.returns[0] = 5.0

    def test_len(self):
        assert len(jv.ReturnsSeries(np.array([0.1, 0.2, 0.3]))) == 3


class TestModelConfig:
    def test_defaults_match_reference_setup(self):
        cfg = jv.default_config()
        assert cfg.nu == 30.0
        assert cfg.omega == 0.9
        assert cfg.jump_threshold == 0.7
        assert cfg.a0 == 0.1 and cfg.b0 == 0.1
        assert cfg.jumps_enabled
        priors = cfg.priors
        assert (priors.mu_mean, priors.mu_var) == (0.0, 100.0)
        assert (priors.jump_mean_mean, priors.jump_mean_var) == (0.0, 100.0)
        assert (priors.jump_var_shape, priors.jump_var_scale) == (0.1, 0.1)
        assert (priors.jump_prob_a, priors.jump_prob_b) == (2.0, 40.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"nu": 0.0},
            {"nu": -3.0},
            {"omega": 0.0},
            {"omega": 1.0001},
            {"jump_threshold": 0.0},
            {"jump_threshold": 1.0},
            {"a0": 0.0},
            {"b0": -1.0},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ParameterError):
            jv.ModelConfig(**kwargs)

    def test_omega_one_allowed(self):
        assert jv.ModelConfig(omega=1.0).omega == 1.0

    def test_invalid_priors_rejected(self):
        with pytest.raises(ParameterError):
            jv.Priors(mu_var=0.0)
        with pytest.raises(ParameterError):
            jv.Priors(jump_prob_b=-2.0)


class TestStaticParams:
    def test_range_checks(self):
        jv.StaticParams(mu=0.1, jump_prob=0.01, jump_mean=-2.5, jump_var=16.0)
        with pytest.raises(ParameterError):
            jv.StaticParams(mu=0.1, jump_prob=0.0, jump_mean=0.0, jump_var=1.0)
        with pytest.raises(ParameterError):
            jv.StaticParams(mu=0.1, jump_prob=0.5, jump_mean=0.0, jump_var=0.0)
        with pytest.raises(ParameterError):
            jv.StaticParams(mu=math.nan, jump_prob=0.5, jump_mean=0.0, jump_var=1.0)


class TestLatentPath:
    def test_jumps_product(self):
        path = jv.LatentPath(
            precision=np.array([1.0, 2.0]),
            mixture=np.array([1.0, 1.0]),
            jump_size=np.array([-3.0, 4.0]),
            jump_ind=np.array([1, 0]),
        )
        np.testing.assert_array_equal(path.jumps, [-3.0, 0.0])
        assert len(path) == 2

    def test_validation(self):
        with pytest.raises(ParameterError):
            jv.LatentPath(
                precision=np.array([1.0, -2.0]),
                mixture=np.ones(2),
                jump_size=np.zeros(2),
                jump_ind=np.zeros(2),
            )
        with pytest.raises(ParameterError):
            jv.LatentPath(
                precision=np.ones(2),
                mixture=np.ones(2),
                jump_size=np.zeros(2),
                jump_ind=np.array([0, 2]),
            )
        with pytest.raises(SizeError):
            jv.LatentPath(
                precision=np.ones(3),
                mixture=np.ones(2),
                jump_size=np.zeros(3),
                jump_ind=np.zeros(3),
            )
