import numpy as np
import pytest
from hypothesis import given, strategies as st

from nemx.tariffs import (
    MeterReading,
    TariffParams,
    build_tou_schedule,
    fit_payment,
    nem_payment,
    payment_gap,
    peak_rate_factors,
)

rates = st.floats(0.0, 1.0, allow_nan=False)
energies = st.floats(0.0, 100.0, allow_nan=False)


def make_tariff(plus, minus, fixed=0.0):
    return TariffParams(retail_rate=plus, export_rate=minus, fixed_charge=fixed)


class TestNemPayment:
    def test_net_import(self):
        assert nem_payment(5, make_tariff(0.4, 0.1)) == pytest.approx(2.0)

    def test_net_zero_pays_fixed_charge_only(self):
        assert nem_payment(0, make_tariff(0.4, 0.1, 3.0)) == pytest.approx(3.0)

    def test_net_export(self):
        assert nem_payment(-5, make_tariff(0.4, 0.1)) == pytest.approx(-0.5)

    def test_nondecreasing_piecewise_linear(self):
        t = make_tariff(0.4, 0.1, 1.0)
        zs = np.linspace(-10, 10, 2001)
        pays = np.array([nem_payment(z, t) for z in zs])
        assert (np.diff(pays) >= -1e-12).all()
        # one kink only: slopes are pi_minus left of zero, pi_plus right
        left = pays[zs < 0]
        right = pays[zs > 0]
        assert np.allclose(np.diff(left) / np.diff(zs[zs < 0]), 0.1)
        assert np.allclose(np.diff(right) / np.diff(zs[zs > 0]), 0.4)


class TestFitPayment:
    def test_basic(self):
        assert fit_payment(3, 5, make_tariff(0.4, 0.2)) == pytest.approx(0.2)

    def test_fixed_charge_only(self):
        assert fit_payment(0, 0, make_tariff(0.4, 0.2, 1.0)) == pytest.approx(1.0)

    def test_equal_rates_net_out(self):
        assert fit_payment(10, 10, make_tariff(0.3, 0.3)) == pytest.approx(0.0)

    def test_negative_quantities_rejected(self):
        with pytest.raises(ValueError):
            fit_payment(-1, 0, make_tariff(0.4, 0.2))
        with pytest.raises(ValueError):
            fit_payment(0, -1, make_tariff(0.4, 0.2))


class TestPaymentGap:
    def test_gap_example(self):
        assert payment_gap(3, 5, make_tariff(0.4, 0.2)) == pytest.approx(0.6)

    def test_equal_rates_gap_zero(self):
        assert payment_gap(7, 3, make_tariff(0.3, 0.3)) == 0.0

    def test_zero_consumption_gap_zero(self):
        assert payment_gap(0, 7, make_tariff(0.4, 0.1)) == 0.0

    @given(d=energies, r=energies, plus=rates, frac=st.floats(0.0, 1.0),
           fixed=st.floats(0.0, 20.0))
    def test_identity_and_dominance(self, d, r, plus, frac, fixed):
        t = make_tariff(plus, plus * frac, fixed)
        gap = fit_payment(d, r, t) - nem_payment(d - r, t)
        assert gap == pytest.approx(payment_gap(d, r, t), abs=1e-12)
        assert nem_payment(d - r, t) <= fit_payment(d, r, t) + 1e-12


class TestTariffParams:
    def test_export_above_retail_rejected(self):
        with pytest.raises(ValueError):
            TariffParams(retail_rate=0.1, export_rate=0.2)

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            TariffParams(retail_rate=-0.1, export_rate=-0.2)

    def test_equal_rates_allowed(self):
        t = TariffParams(retail_rate=0.3, export_rate=0.3)
        assert t.rates_for(5) == (0.3, 0.3)

    def test_schedule_lookup_wraps(self):
        t = TariffParams(0.2, 0.1, period_schedule=((0.2, 0.1), (0.3, 0.15)))
        assert t.rates_for(0) == (0.2, 0.1)
        assert t.rates_for(3) == (0.3, 0.15)

    def test_meter_reading_net(self):
        m = MeterReading(gross_consumption=3.0, btm_generation=5.0)
        assert m.net == pytest.approx(-2.0)
        with pytest.raises(ValueError):
            MeterReading(-1.0, 0.0)


class TestTou:
    def test_peak_window_16_to_21(self):
        factors = peak_rate_factors()
        assert factors.shape == (24,)
        for hour in range(24):
            expected = 1.5 if 16 <= hour < 21 else 1.0
            assert factors[hour] == expected

    def test_schedule_builder_offsets_export(self):
        t = build_tou_schedule(base_retail=0.2, export_offset=0.035)
        plus, minus = t.rates_for(17)
        assert plus == pytest.approx(0.3)
        assert minus == pytest.approx(0.265)
        plus0, minus0 = t.rates_for(3)
        assert plus0 == pytest.approx(0.2)
        assert minus0 == pytest.approx(0.165)
