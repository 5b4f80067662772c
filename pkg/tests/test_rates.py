import math

import numpy as np
import pytest

from nemx.devices import DeviceModel
from nemx.engine import PeriodSet
from nemx.errors import BracketError, DeathSpiralError
from nemx.rates import (
    LinearCostModel,
    PolicyRule,
    RateCase,
    customer_surplus,
    expected_utility_surplus,
    ramsey_objective,
    solve_break_even,
    utility_surplus,
)
from nemx.tariffs import TariffParams

ONE = [DeviceModel(alpha=1.0, beta=0.1, cap=20.0)]
FLAT = PolicyRule(name="flat", export_rule="retail")


def single_period_set(wholesale=0.1, samples=(0.0,)):
    return PeriodSet(
        alpha=[[1.0]], beta=[[0.1]], cap=[[20.0]],
        wholesale=[wholesale], der_samples=[list(samples)],
        weight=1.0, periods_per_day=24,
    )


def analytic_case(theta, gamma=0.0, samples=(0.0,)):
    return RateCase(
        periods=single_period_set(samples=samples),
        gamma=gamma, theta=theta, rule=FLAT, bracket=(0.0, 1.2),
    )


class TestScalarSurpluses:
    def test_customer_surplus_mixes_population(self):
        t = TariffParams(0.2, 0.1)
        s = customer_surplus(t, 0.5, ONE, 0.0)
        assert s == pytest.approx(3.2)
        assert customer_surplus(t, 0.0, ONE, 7.0) == pytest.approx(3.2)
        assert customer_surplus(t, 1.0, ONE, 0.0) == pytest.approx(3.2)

    def test_utility_surplus_break_even_point(self):
        t = TariffParams(0.2, 0.2)
        s = utility_surplus(t, 0.0, ONE, 0.0, LinearCostModel(0.1), theta=0.8,
                            n_periods=1)
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_price_at_cost_zero_surplus_without_fixed_cost(self):
        t = TariffParams(0.1, 0.1)
        s = utility_surplus(t, 0.0, ONE, 0.0, LinearCostModel(0.1), theta=0.0,
                            n_periods=1)
        assert s == pytest.approx(0.0, abs=1e-12)

    def test_net_zero_population_pays_nothing(self):
        # adopters sized exactly to the net-zero zone: zero revenue, only costs
        t = TariffParams(0.4, 0.1)
        s = utility_surplus(t, 1.0, ONE, 7.0, LinearCostModel(0.1), theta=0.8,
                            n_periods=2)
        assert s == pytest.approx(-0.4, abs=1e-12)  # -theta/J

    def test_gamma_validated(self):
        with pytest.raises(ValueError):
            customer_surplus(TariffParams(0.2, 0.1), 1.5, ONE, 0.0)


class TestBreakEven:
    def test_analytic_root(self):
        res = solve_break_even(analytic_case(theta=0.8))
        assert res.base_rate == pytest.approx(0.2, abs=1e-6)
        assert abs(res.residual) <= 1e-6 * 0.8

    def test_zero_fixed_cost_prices_at_marginal_cost(self):
        res = solve_break_even(analytic_case(theta=0.0))
        assert res.base_rate == pytest.approx(0.1, abs=1e-6)

    def test_death_spiral_when_cost_exceeds_revenue_peak(self):
        with pytest.raises(DeathSpiralError) as info:
            solve_break_even(analytic_case(theta=2.5))
        assert info.value.max_surplus < 0

    def test_bracket_error_when_surplus_positive_at_low_end(self):
        case = RateCase(
            periods=single_period_set(),
            gamma=0.0, theta=0.0, rule=FLAT, bracket=(0.5, 1.2),
        )
        with pytest.raises(BracketError):
            solve_break_even(case)

    def test_residual_small_at_root(self):
        case = analytic_case(theta=1.5)
        res = solve_break_even(case)
        assert abs(expected_utility_surplus(case, res.base_rate)) <= 1e-6 * 1.5

    def test_smallest_root_selected(self):
        # the break-even equation has roots at 0.2 and 0.9
        res = solve_break_even(analytic_case(theta=0.8))
        assert res.base_rate < 0.5

    def test_zero_adoption_rate_independent_of_export_rule(self):
        for rule in (
            FLAT,
            PolicyRule(name="offset", export_rule="offset", export_offset=0.05),
            PolicyRule(name="ratio", export_rule="ratio", export_ratio=0.5),
        ):
            case = RateCase(periods=single_period_set(), gamma=0.0, theta=0.8,
                            rule=rule, bracket=(0.0, 1.2))
            assert solve_break_even(case).base_rate == pytest.approx(0.2, abs=1e-6)

    def test_break_even_rate_rises_with_adoption(self):
        pset = single_period_set(samples=(3.0, 5.0, 7.0))
        rates = []
        for gamma in (0.0, 0.15, 0.3):
            case = RateCase(periods=pset, gamma=gamma, theta=0.8, rule=FLAT,
                            bracket=(0.0, 1.2))
            rates.append(solve_break_even(case).base_rate)
        assert rates[0] <= rates[1] <= rates[2]


class TestRamseyObjective:
    def test_gamma_zero_ignores_environmental_price(self):
        t = TariffParams(0.2, 0.1)
        a = ramsey_objective(t, 0.0, ONE, [[0.0, 5.0]], env_price=0.0)
        b = ramsey_objective(t, 0.0, ONE, [[0.0, 5.0]], env_price=10.0)
        assert a == b

    def test_env_zero_full_adoption_equals_prosumer_surplus(self):
        t = TariffParams(0.2, 0.1)
        val = ramsey_objective(t, 1.0, ONE, [[4.0]], env_price=0.0)
        assert val == pytest.approx(customer_surplus(t, 1.0, ONE, 4.0))

    def test_smaller_root_gives_higher_objective(self):
        small = ramsey_objective(TariffParams(0.2, 0.2), 0.0, ONE, [[0.0]])
        large = ramsey_objective(TariffParams(0.9, 0.9), 0.0, ONE, [[0.0]])
        assert small > large

    def test_solver_returns_welfare_preferred_root(self):
        # single consumer device, linear cost: both break-even roots are
        # known in closed form, and the smaller one must win the objective
        rng = np.random.default_rng(77)
        for _ in range(25):
            alpha = float(rng.uniform(0.5, 1.2))
            beta = float(rng.uniform(0.05, 0.4))
            cost = float(rng.uniform(0.02, 0.15))
            theta_max = (alpha - cost) ** 2 / (4 * beta)
            theta = float(rng.uniform(0.1, 0.9)) * theta_max
            disc = math.sqrt((alpha - cost) ** 2 - 4 * beta * theta)
            lo_root = ((alpha + cost) - disc) / 2
            hi_root = ((alpha + cost) + disc) / 2

            pset = PeriodSet(alpha=[[alpha]], beta=[[beta]], cap=[[alpha / beta]],
                             wholesale=[cost], der_samples=[[0.0]])
            case = RateCase(periods=pset, gamma=0.0, theta=theta, rule=FLAT,
                            bracket=(0.0, 1.5))
            res = solve_break_even(case)
            assert res.base_rate == pytest.approx(lo_root, abs=1e-6)

            devices = [DeviceModel(alpha=alpha, beta=beta, cap=alpha / beta)]
            obj_lo = ramsey_objective(TariffParams(lo_root, lo_root), 0.0,
                                      devices, [[0.0]])
            obj_hi = ramsey_objective(TariffParams(hi_root, hi_root), 0.0,
                                      devices, [[0.0]])
            assert obj_lo > obj_hi


class TestPolicyRule:
    def test_ratio_decrement_linear_with_floor(self):
        rule = PolicyRule(name="d", export_rule="ratio", export_ratio=1.0,
                          ratio_decrement=0.03, ratio_floor=0.25)
        assert rule.ratio_at(0) == pytest.approx(1.0)
        assert rule.ratio_at(10) == pytest.approx(0.70)
        assert rule.ratio_at(25) == pytest.approx(0.25)
        assert rule.ratio_at(40) == pytest.approx(0.25)

    def test_fixed_charge_schedule_caps(self):
        rule = PolicyRule(name="d4", export_rule="offset", fixed_monthly=0.0,
                          fixed_increment=2.0, fixed_cap=40.0)
        assert rule.fixed_monthly_at(0) == 0.0
        assert rule.fixed_monthly_at(10) == 20.0
        assert rule.fixed_monthly_at(30) == 40.0

    def test_export_never_exceeds_retail(self):
        pset = single_period_set()
        rule = PolicyRule(name="p", export_rule="profile",
                          export_profile=(0.5,))
        arrays = rule.tariff_arrays(0.3, pset)
        assert arrays.minus[0] <= arrays.plus[0]

    def test_smc_placeholder_requires_resolution(self):
        rule = PolicyRule(name="smc", export_rule="smc")
        with pytest.raises(ValueError):
            rule.export_rates(np.array([0.3]), single_period_set(), 0)

    def test_cbc_charged_to_prosumers_only(self):
        rule = PolicyRule(name="nem3", export_rule="profile",
                          export_profile=(0.05,), cbc_per_kw_month=8.0)
        arrays = rule.tariff_arrays(0.3, single_period_set(), year=0, system_kw=5.0)
        assert arrays.fixed_consumer == pytest.approx(0.0)
        assert arrays.fixed_prosumer == pytest.approx(8.0 * 5.0 * 12.0)

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            PolicyRule(name="x", export_rule="mystery")
