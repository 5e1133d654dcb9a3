import numpy as np
import pytest

from dynprice.forecast import Forecast, ForecasterConfig, ForecastSet, forecast, forecast_set, sample
from dynprice.scenario import GeneratorConfig, HourlySeries, Scenario, generate
from dynprice.timeline import DecisionEvent, Horizon, TimeStep, calendar_features

from conftest import make_forecast_set


def periodic_scenario(days=3, base=100.0):
    """Scenario whose series repeat every 24 hours (persistence fixed point)."""
    n = days * 24
    hod = np.arange(n) % 24
    production = base + 10.0 * hod
    consumption = base + 5.0 * hod
    price = 40.0 + hod
    return Scenario(
        production=HourlySeries(0, production),
        baseline_consumption=HourlySeries(0, consumption),
        dayahead_price=HourlySeries(0, price),
        imbalance_price=HourlySeries(0, price + 5.0),
        calendar=tuple(calendar_features(t) for t in range(n)),
    )


@pytest.fixture(scope="module")
def scenario():
    return generate(GeneratorConfig(seed=11), Horizon(72))


EVENT_DAY1 = DecisionEvent(TimeStep(12))


class TestNoisyOracle:
    def test_zero_gamma_is_exact(self, scenario):
        config = ForecasterConfig(kind="noisy_oracle", gamma=0.0)
        for target, series in (
            ("production", scenario.production),
            ("consumption", scenario.baseline_consumption),
            ("price", scenario.dayahead_price),
        ):
            items = forecast(target, scenario, EVENT_DAY1, config)
            assert [f.mean for f in items] == [series.value_at(t) for t in EVENT_DAY1.delivery_hours]
            assert all(f.std == 0.0 for f in items)

    def test_deterministic_per_seed(self, scenario):
        config = ForecasterConfig(kind="noisy_oracle", gamma=0.2, seed=5)
        a = forecast("production", scenario, EVENT_DAY1, config)
        b = forecast("production", scenario, EVENT_DAY1, config)
        assert a == b
        other = forecast("production", scenario, EVENT_DAY1, ForecasterConfig(gamma=0.2, seed=6))
        assert a != other

    def test_noise_streams_differ_between_targets(self, scenario):
        config = ForecasterConfig(kind="noisy_oracle", gamma=0.3, seed=5)
        prod = forecast("production", scenario, EVENT_DAY1, config)
        cons = forecast("consumption", scenario, EVENT_DAY1, config)
        rel_p = [f.mean / scenario.production.value_at(f.delivery.t) for f in prod if f.mean > 0]
        rel_c = [
            f.mean / scenario.baseline_consumption.value_at(f.delivery.t) for f in cons if f.mean > 0
        ]
        assert rel_p != rel_c

    def test_means_never_negative(self, scenario):
        config = ForecasterConfig(kind="noisy_oracle", gamma=5.0, seed=1)
        for target in ("production", "consumption"):
            items = forecast(target, scenario, EVENT_DAY1, config)
            assert all(f.mean >= 0.0 for f in items)

    def test_std_scales_with_truth(self, scenario):
        config = ForecasterConfig(kind="noisy_oracle", gamma=0.1)
        items = forecast("consumption", scenario, EVENT_DAY1, config)
        for f in items:
            truth = scenario.baseline_consumption.value_at(f.delivery.t)
            assert f.std == pytest.approx(0.1 * abs(truth))
        price_items = forecast("price", scenario, EVENT_DAY1, config)
        assert all(f.std == 0.1 for f in price_items)


class TestPersistence:
    def test_periodic_scenario_fixed_point(self):
        scenario = periodic_scenario()
        config = ForecasterConfig(kind="persistence")
        items = forecast("consumption", scenario, EVENT_DAY1, config)
        assert [f.mean for f in items] == [
            scenario.baseline_consumption.value_at(t) for t in EVENT_DAY1.delivery_hours
        ]

    def test_day0_uses_profile(self):
        scenario = periodic_scenario()
        profile = tuple(float(i) for i in range(24))
        config = ForecasterConfig(kind="persistence", day0_profile=profile)
        items = forecast("price", scenario, DecisionEvent(TimeStep(-12)), config)
        assert [f.mean for f in items] == list(profile)

    def test_day0_defaults_to_zero(self):
        scenario = periodic_scenario()
        config = ForecasterConfig(kind="persistence")
        items = forecast("production", scenario, DecisionEvent(TimeStep(-12)), config)
        assert all(f.mean == 0.0 for f in items)

    def test_constant_std(self):
        scenario = periodic_scenario()
        config = ForecasterConfig(kind="persistence", persistence_std=7.0)
        items = forecast("consumption", scenario, EVENT_DAY1, config)
        assert all(f.std == 7.0 for f in items)


class TestForecastValidation:
    def test_unknown_target(self, scenario):
        with pytest.raises(ValueError, match="unknown forecast target"):
            forecast("weather", scenario, EVENT_DAY1, ForecasterConfig())

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown forecaster kind"):
            ForecasterConfig(kind="magic")

    def test_window_outside_scenario(self, scenario):
        event = DecisionEvent(TimeStep(36 + 24))  # delivery day 3 of a 3-day scenario
        with pytest.raises(ValueError, match="outside scenario"):
            forecast("production", scenario, event, ForecasterConfig())

    def test_decision_hour_enforced_by_event(self):
        with pytest.raises(ValueError, match="decision hour"):
            DecisionEvent(TimeStep(0))

    def test_lead_times_within_contract(self, scenario):
        items = forecast("production", scenario, EVENT_DAY1, ForecasterConfig())
        lags = [f.delivery.t - EVENT_DAY1.decision_time.t for f in items]
        assert min(lags) == 12 and max(lags) == 35

    def test_forecast_set_rejects_bad_lag(self):
        items = tuple(Forecast(TimeStep(i), 1.0, 0.0) for i in range(24))
        with pytest.raises(ValueError, match="lags"):
            ForecastSet(issued_at=TimeStep(0), production=items, consumption=items, price=items)

    def test_forecast_set_means(self, scenario):
        fs = forecast_set(
            scenario, EVENT_DAY1, ForecasterConfig(), ForecasterConfig(), ForecasterConfig()
        )
        assert len(fs) == 24
        assert fs.delivery_start.t == 24
        assert np.array_equal(fs.means("production"), scenario.production.window(24, 24))


class TestSampling:
    def test_zero_std_returns_means(self):
        fs = make_forecast_set([100.0] * 24, [50.0] * 24, [40.0] * 24, std=0.0)
        draws = sample(fs, 5, seed=1)
        assert np.all(draws.production == 100.0)
        assert np.all(draws.consumption == 50.0)
        assert np.all(draws.price == 40.0)

    def test_deterministic(self):
        fs = make_forecast_set([100.0] * 24, [50.0] * 24, [40.0] * 24, std=10.0)
        a = sample(fs, 2, seed=9)
        b = sample(fs, 2, seed=9)
        assert np.array_equal(a.production, b.production)
        assert not np.array_equal(a.production, sample(fs, 2, seed=10).production)

    def test_rejects_zero_samples(self):
        fs = make_forecast_set([1.0] * 24, [1.0] * 24, [1.0] * 24)
        with pytest.raises(ValueError, match="at least one sample"):
            sample(fs, 0)

    def test_never_negative_power_draws(self):
        fs = make_forecast_set([1.0] * 24, [1.0] * 24, [0.0] * 24, std=50.0)
        draws = sample(fs, 200, seed=2)
        assert draws.production.min() >= 0.0
        assert draws.consumption.min() >= 0.0
        assert draws.price.min() < 0.0  # prices may go negative

    def test_sample_mean_converges(self):
        # one N(100, 10) mean over 10^4 draws: 3 sigma / sqrt(n) = 0.3
        fs = make_forecast_set([100.0] * 24, [100.0] * 24, [100.0] * 24, std=10.0)
        draws = sample(fs, 10_000, seed=3)
        assert abs(draws.price[:, 0].mean() - 100.0) <= 0.3
        # pooled over all 24 hours the bound tightens by sqrt(24)
        assert abs(draws.price.mean() - 100.0) <= 0.3 / np.sqrt(24)
