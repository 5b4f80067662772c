"""Prosumer decisions, break-even rate setting, and long-run solar adoption
under net-metering and feed-in tariffs."""

__version__ = "0.1.0"

from .adoption import (
    AdoptionParams,
    adoption_update,
    bass_cdf,
    bass_cdf_inverse,
    market_potential,
    payback_time,
    payback_time_from_saving,
)
from .devices import CalibrationInput, DeviceModel, calibrate, marginal_utility_inverse, utility
from .errors import (
    BracketError,
    CalibrationError,
    DeathSpiralError,
    EmptyTraceError,
    InternalInvariantError,
    NemxError,
    PolicyAssumptionError,
    SchemaError,
    TraceAlignmentError,
    ZeroBaselineError,
)
from .mpc import (
    BillingWindow,
    PerfectForecast,
    PersistenceForecast,
    SchedulerState,
    clairvoyant_optimum,
    mpc_step,
    run_billing_period,
)
from .metrics import bill_savings, cost_shift, percentage_change, social_welfare
from .policy import (
    ConsumptionDecision,
    CustomerKind,
    ThresholdPair,
    Zone,
    optimal_consumption,
    surplus,
    thresholds,
    zone_of,
)
from .rates import (
    LinearCostModel,
    PolicyRule,
    RateCase,
    customer_surplus,
    ramsey_objective,
    solve_break_even,
    utility_surplus,
)
from .tariffs import MeterReading, TariffParams, fit_payment, nem_payment, payment_gap
