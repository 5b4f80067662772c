import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nemx.adoption import (
    INFINITE_PAYBACK,
    AdoptionParams,
    adoption_update,
    bass_cdf,
    bass_cdf_inverse,
    market_potential,
    payback_time,
    payback_time_from_saving,
)
from nemx.devices import DeviceModel
from nemx.tariffs import TariffParams

PARAMS = AdoptionParams(market_size=0.3, payback_sensitivity=-0.1,
                        bass_p=0.5, bass_q=0.5)


class TestPayback:
    def test_undiscounted(self):
        assert payback_time_from_saving(100.0, 250.0) == 2

    def test_with_degradation(self):
        # partial sums 100, 190, 271
        assert payback_time_from_saving(100.0, 250.0, degradation=0.1) == 2

    def test_no_savings_never_recovers(self):
        assert payback_time_from_saving(0.0, 250.0) == INFINITE_PAYBACK

    def test_horizon_cutoff(self):
        assert payback_time_from_saving(10.0, 250.0, horizon=10) == INFINITE_PAYBACK
        assert payback_time_from_saving(10.0, 250.0, horizon=40) == 24

    def test_cost_must_be_positive(self):
        with pytest.raises(ValueError):
            payback_time_from_saving(100.0, 0.0)

    def test_monotone_in_cost_and_saving(self):
        base = payback_time_from_saving(120.0, 1000.0, 0.01, 0.03)
        assert payback_time_from_saving(120.0, 1400.0, 0.01, 0.03) >= base
        assert payback_time_from_saving(150.0, 1000.0, 0.01, 0.03) <= base

    def test_tariff_level_wrapper(self):
        devices = [DeviceModel(alpha=1.0, beta=0.1, cap=20.0)]
        t = TariffParams(0.4, 0.1)
        # savings at r=12 are 2.7 per billing period, annualized by J=100
        years = payback_time(t, devices, [12.0], install_cost=500.0,
                             billing_periods_per_year=100.0)
        assert years == 1  # 270 + 270 >= 500


class TestMarketPotential:
    def test_direct_value(self):
        params = AdoptionParams(market_size=0.3, payback_sensitivity=-0.1)
        assert market_potential(params, 5.0) == pytest.approx(0.18196, abs=1e-5)

    def test_instant_payback_saturates(self):
        params = AdoptionParams(market_size=0.3, payback_sensitivity=-0.1)
        assert market_potential(params, 0.0) == pytest.approx(0.3)

    def test_unreachable_payback_zero_potential(self):
        assert market_potential(PARAMS, INFINITE_PAYBACK) == 0.0

    def test_strictly_decreasing_in_payback(self):
        values = [market_potential(PARAMS, t) for t in (0, 1, 3, 8, 20)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestBass:
    def test_starts_at_zero(self):
        assert bass_cdf(PARAMS, 0.0) == 0.0

    def test_tanh_special_case(self):
        # p == q makes the curve tanh((p+q) t / 2)
        assert bass_cdf(PARAMS, 1.0) == pytest.approx(math.tanh(0.5), abs=1e-12)

    def test_inverse_round_trip_example(self):
        assert bass_cdf_inverse(PARAMS, math.tanh(0.5)) == pytest.approx(1.0, abs=1e-12)

    def test_limit_is_one(self):
        assert bass_cdf(PARAMS, 80.0) == pytest.approx(1.0, abs=1e-9)

    def test_strictly_increasing(self):
        ts = np.linspace(0, 20, 200)
        vals = [bass_cdf(PARAMS, t) for t in ts]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @given(y=st.floats(0.0, 0.999), p=st.floats(0.01, 1.0), q=st.floats(0.0, 1.5))
    def test_round_trip_property(self, y, p, q):
        params = AdoptionParams(market_size=0.5, payback_sensitivity=-0.1,
                                bass_p=p, bass_q=q)
        assert bass_cdf(params, bass_cdf_inverse(params, y)) == pytest.approx(
            y, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bass_cdf_inverse(PARAMS, 1.0)
        with pytest.raises(ValueError):
            bass_cdf(PARAMS, -0.1)


class TestAdoptionUpdate:
    def test_ceiling_below_current_freezes(self):
        assert adoption_update(0.3, 0.2, PARAMS) == 0.3

    def test_one_step_from_zero(self):
        value = adoption_update(0.0, 0.5, PARAMS)
        assert value == pytest.approx(0.5 * math.tanh(0.5), abs=1e-5)

    def test_saturation_fixed_point(self):
        assert adoption_update(0.4, 0.4, PARAMS) == 0.4

    def test_zero_ceiling_zero_gamma(self):
        assert adoption_update(0.0, 0.0, PARAMS) == 0.0

    @given(gamma=st.floats(0.0, 1.0), ceiling=st.floats(0.0, 1.0),
           p=st.floats(0.01, 1.0), q=st.floats(0.0, 1.5))
    def test_monotone_and_bounded(self, gamma, ceiling, p, q):
        params = AdoptionParams(market_size=0.9, payback_sensitivity=-0.05,
                                bass_p=p, bass_q=q)
        nxt = adoption_update(gamma, ceiling, params)
        assert nxt >= gamma - 1e-15
        assert nxt <= max(gamma, ceiling) + 1e-12
