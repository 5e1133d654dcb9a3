import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynprice.demand import (
    DemandResponseModel,
    PriceSignal,
    aggregate_elasticity,
    respond,
    shift_matrix,
    uniform_kernel,
)
from dynprice.timeline import TimeStep

from conftest import day_calendar, flat_signal, make_model

CAL = day_calendar()


def signal_with_bump(base, hour, price):
    prices = np.full(24, float(base))
    prices[hour] = price
    return PriceSignal(TimeStep(0), prices)


class TestModelValidation:
    def test_rejects_positive_elasticity(self):
        with pytest.raises(ValueError, match="elasticity"):
            make_model(elasticity=0.1)

    def test_rejects_unnormalised_kernel(self):
        with pytest.raises(ValueError, match="sum to 1"):
            make_model(weights=[0.5, 0.6])

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError, match=">= 0"):
            make_model(weights=[-0.5, 1.5])

    def test_rejects_nonpositive_reference(self):
        with pytest.raises(ValueError, match="reference tariff"):
            make_model(reference=0.0)

    def test_rejects_bad_recovery(self):
        with pytest.raises(ValueError, match="recovery"):
            make_model(recovery=1.5)

    def test_kernel_weight_count_must_match_halfwidth(self):
        with pytest.raises(ValueError, match="weights"):
            make_model(halfwidth=2, weights=[0.5, 0.5])


class TestRespond:
    def test_reference_price_is_identity(self):
        cf = np.full(24, 120.0)
        out = respond(make_model(), cf, flat_signal(50.0), CAL)
        assert np.array_equal(out.values, cf)
        assert not out.clipped

    def test_zero_elasticity_is_identity_for_any_signal(self):
        cf = np.linspace(50, 200, 24)
        signal = PriceSignal(TimeStep(0), np.linspace(10, 90, 24))
        out = respond(make_model(elasticity=0.0), cf, signal, CAL)
        assert np.array_equal(out.values, cf)

    def test_single_hour_curtailment(self):
        # own-price stage only: 10% above reference at one hour with
        # elasticity -0.2 scales that hour by 1 - 0.2*0.1 = 0.98
        cf = np.full(24, 100.0)
        out = respond(
            make_model(elasticity=-0.2, recovery=0.0),
            cf,
            signal_with_bump(50.0, 12, 55.0),
            CAL,
        )
        expected = np.full(24, 100.0)
        expected[12] = 98.0
        assert np.allclose(out.values, expected)

    def test_shift_to_neighbours_conserves_energy(self):
        # with full recovery and the symmetric +-1 kernel the curtailed
        # 2 kWh reappear as 1 kWh on each neighbour
        cf = np.full(24, 100.0)
        out = respond(
            make_model(elasticity=-0.2, recovery=1.0, weights=[0.5, 0.5]),
            cf,
            signal_with_bump(50.0, 12, 55.0),
            CAL,
        )
        expected = np.full(24, 100.0)
        expected[12] = 98.0
        expected[11] = expected[13] = 101.0
        assert np.allclose(out.values, expected)
        assert out.total() == pytest.approx(cf.sum(), rel=1e-12)

    def test_cheap_hour_pulls_load_from_neighbours(self):
        cf = np.full(24, 100.0)
        out = respond(
            make_model(elasticity=-0.5, recovery=1.0, weights=[0.5, 0.5]),
            cf,
            signal_with_bump(50.0, 12, 40.0),
            CAL,
        )
        assert out.values[12] > 100.0
        assert out.values[11] < 100.0 and out.values[13] < 100.0
        assert out.total() == pytest.approx(cf.sum(), rel=1e-12)

    def test_edge_hours_conserve_through_renormalisation(self):
        cf = np.full(24, 100.0)
        out = respond(
            make_model(elasticity=-0.5, recovery=1.0, weights=[0.5, 0.5]),
            cf,
            signal_with_bump(50.0, 0, 60.0),
            CAL,
        )
        # hour 0 has a single in-day neighbour, which receives everything
        assert out.values[0] == pytest.approx(90.0)
        assert out.values[1] == pytest.approx(110.0)
        assert out.total() == pytest.approx(cf.sum(), rel=1e-12)

    def test_clipping_reported(self):
        cf = np.full(24, 10.0)
        out = respond(
            make_model(elasticity=-1.0, recovery=0.0),
            cf,
            signal_with_bump(50.0, 5, 500.0),  # 900% price rise, elasticity -1
            CAL,
        )
        assert out.values[5] == 0.0
        assert out.clipped
        assert out.clipped_hours == (5,)

    def test_higher_price_never_raises_own_hour(self):
        cf = np.full(24, 100.0)
        model = make_model(elasticity=-0.4, recovery=0.0)
        low = respond(model, cf, signal_with_bump(50.0, 7, 55.0), CAL)
        high = respond(model, cf, signal_with_bump(50.0, 7, 70.0), CAL)
        assert high.values[7] < low.values[7] < cf[7]

    def test_locality(self):
        cf = np.full(24, 100.0)
        model = make_model(elasticity=-0.5, halfwidth=2, recovery=1.0)
        base = respond(model, cf, flat_signal(50.0), CAL).values
        bumped = respond(model, cf, signal_with_bump(50.0, 10, 60.0), CAL).values
        changed = np.flatnonzero(~np.isclose(base, bumped))
        assert changed.size > 0
        assert set(changed) <= {8, 9, 10, 11, 12}

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(ValueError, match="misaligned"):
            respond(make_model(), np.ones(23), flat_signal(50.0), CAL)

    def test_negative_consumption_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            respond(make_model(), np.full(24, -1.0), flat_signal(50.0), CAL)


class TestShiftMatrix:
    def test_columns_sum_to_one(self):
        model = make_model(halfwidth=3)
        m = shift_matrix(model, 24)
        assert np.allclose(m.sum(axis=0), 1.0)

    def test_single_hour_day_has_no_targets(self):
        model = make_model(halfwidth=1)
        assert np.array_equal(shift_matrix(model, 1), np.zeros((1, 1)))


@st.composite
def conservation_case(draw):
    halfwidth = draw(st.integers(min_value=1, max_value=4))
    raw = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=1.0),
            min_size=2 * halfwidth,
            max_size=2 * halfwidth,
        )
    )
    weights = np.array(raw) / np.sum(raw)
    elasticity = -np.array(
        draw(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=24, max_size=24))
    )
    # price deviations within 10% of reference cannot clip loads in [50, 150]
    rel = np.array(
        draw(st.lists(st.floats(min_value=-0.1, max_value=0.1), min_size=24, max_size=24))
    )
    cf = np.array(
        draw(st.lists(st.floats(min_value=50.0, max_value=150.0), min_size=24, max_size=24))
    )
    return halfwidth, weights, elasticity, rel, cf


class TestConservation:
    @given(conservation_case())
    @settings(max_examples=150, deadline=None)
    def test_full_recovery_conserves_energy(self, case):
        halfwidth, weights, elasticity, rel, cf = case
        model = make_model(
            elasticity=elasticity, halfwidth=halfwidth, weights=weights, recovery=1.0
        )
        signal = PriceSignal(TimeStep(0), 50.0 * (1.0 + rel))
        out = respond(model, cf, signal, CAL)
        assert not out.clipped
        assert abs(out.total() - cf.sum()) <= 1e-9 * cf.sum()

    @given(conservation_case())
    @settings(max_examples=50, deadline=None)
    def test_partial_recovery_interpolates(self, case):
        halfwidth, weights, elasticity, rel, cf = case
        signal = PriceSignal(TimeStep(0), 50.0 * (1.0 + rel))
        totals = []
        for rho in (0.0, 0.5, 1.0):
            model = make_model(
                elasticity=elasticity, halfwidth=halfwidth, weights=weights, recovery=rho
            )
            totals.append(respond(model, cf, signal, CAL).total())
        full, half, none_lost = totals[2], totals[1], totals[0]
        assert half == pytest.approx((full + none_lost) / 2.0, rel=1e-9, abs=1e-9)


class TestAggregateElasticity:
    def test_full_recovery_gives_zero(self):
        model = make_model(elasticity=-0.4, recovery=1.0)
        value = aggregate_elasticity(model, np.full(24, 100.0), flat_signal(50.0), CAL)
        assert abs(value) <= 1e-9

    def test_pure_curtailment_gives_mean_elasticity(self):
        model = make_model(elasticity=-0.3, recovery=0.0)
        value = aggregate_elasticity(model, np.full(24, 100.0), flat_signal(50.0), CAL)
        assert value == pytest.approx(-0.3, rel=1e-9)

    def test_daytime_split_averages(self):
        # -0.1 during hours 8..19, -0.5 otherwise: flat load averages to -0.3
        eps = np.full(24, -0.5)
        eps[8:20] = -0.1
        model = make_model(elasticity=eps, recovery=0.0)
        value = aggregate_elasticity(model, np.full(24, 100.0), flat_signal(50.0), CAL)
        assert value == pytest.approx(-0.3, rel=1e-9)

    def test_weighted_by_consumption(self):
        eps = np.zeros(24)
        eps[0] = -1.0
        cf = np.ones(24)
        cf[0] = 23.0  # hour 0 holds exactly half the energy
        model = make_model(elasticity=eps, recovery=0.0)
        value = aggregate_elasticity(model, cf, flat_signal(50.0), CAL)
        assert value == pytest.approx(-0.5, rel=1e-9)

    def test_zero_perturbation_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            aggregate_elasticity(make_model(), np.full(24, 1.0), flat_signal(50.0), CAL, rel_step=0.0)
