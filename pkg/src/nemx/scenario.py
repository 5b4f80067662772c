"""Closed-loop rate-setting dynamics, policy sweeps, and result emission.

The long-run loop alternates two moves per year: the regulator solves
the break-even retail rate given the current adopter fraction and fixed
cost, then consumers respond to the new tariff and the current
installation cost by adopting along the diffusion curve.  Installation
costs decline and fixed costs grow exogenously.  A year in which no
retail rate recovers costs terminates the run (death spiral).

Short-run sweeps hold the adopter fraction fixed at grid values and
compare policies at their respective break-even rates.
"""

from __future__ import annotations

import dataclasses
import json
import math
import platform
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from . import __version__
from .adoption import adoption_update, market_potential, payback_time_from_saving
from .config import ScenarioConfig
from .engine import Aggregates, PeriodEvaluation, PeriodSet, aggregate, evaluate
from .errors import DeathSpiralError
from .rates import BreakEvenResult, PolicyRule, RateCase, solve_break_even
from .traces import ScenarioData, build_period_set, ingest_traces

__all__ = [
    "PreparedScenario",
    "SystemState",
    "StepRecord",
    "ScenarioRun",
    "SweepCell",
    "prepare",
    "step",
    "run_long_run",
    "run_short_run_sweep",
    "emit_long_run",
    "emit_sweep",
    "write_manifest",
]


@dataclass(frozen=True)
class PreparedScenario:
    """Config plus the derived period set and resolved policy rules."""

    config: ScenarioConfig
    data: ScenarioData
    periods: PeriodSet
    smc_prices: np.ndarray
    rules: tuple[PolicyRule, ...]

    def rule(self, name: str) -> PolicyRule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(f"no policy named {name!r}")


def prepare(config: ScenarioConfig) -> PreparedScenario:
    """Ingest traces, build the model year, and resolve policy rules.

    Policies whose export rule is ``"smc"`` are materialized into fixed
    per-period price profiles equal to wholesale plus the configured
    non-market adder.
    """
    data = ingest_traces(
        config.load_path, config.solar_path, config.prices_path,
        config.net_billing_minutes,
    )
    periods = build_period_set(
        data,
        n_periods=config.model_periods,
        n_samples=config.samples,
        seed=config.seed,
        elasticities=config.elasticities,
        historical_price=config.historical_price,
        hours_per_year=config.hours_per_year,
    )
    smc = periods.wholesale + config.economics.smc_adder
    rules = []
    for rule in config.policies:
        if rule.export_rule == "smc":
            rule = dataclasses.replace(
                rule, export_rule="profile", export_profile=tuple(float(x) for x in smc)
            )
        rules.append(rule)
    return PreparedScenario(
        config=config, data=data, periods=periods, smc_prices=smc,
        rules=tuple(rules),
    )


@dataclass(frozen=True)
class SystemState:
    """Feedback-loop state: last solved tariff and adopter fraction."""

    gamma: float
    year: int = 0
    base_rate: float | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class StepRecord:
    """One emitted year of a long-run study (or one sweep-adjacent solve)."""

    policy: str
    year: int
    feasible: bool
    retail_base: float | None = None
    retail_mean: float | None = None
    export_mean: float | None = None
    fixed_monthly: float | None = None
    cbc_monthly: float | None = None
    gamma: float | None = None
    welfare: float | None = None
    cost_shift_monthly: float | None = None
    payback_years: float | None = None
    market_potential: float | None = None


@dataclass(frozen=True)
class ScenarioRun:
    policy: str
    records: tuple[StepRecord, ...]
    terminal: str  # "completed" or "death_spiral_year_<n>"


def _annual_bill_saving(periods: PeriodSet, ev: PeriodEvaluation) -> float:
    saving = ev.pay0[:, None] - ev.pay_pro
    return periods.weight * float(saving.mean(axis=1).sum())


def _solve_and_evaluate(
    prepared: PreparedScenario,
    rule: PolicyRule,
    gamma: float,
    theta: float,
    year: int,
) -> tuple[BreakEvenResult, PeriodEvaluation]:
    case = RateCase(
        periods=prepared.periods,
        gamma=gamma,
        theta=theta,
        rule=rule,
        year=year,
        system_kw=prepared.config.economics.system_kw,
        bracket=prepared.config.rate_bracket,
        scan_step=prepared.config.scan_step,
    )
    result = solve_break_even(case)
    ev = evaluate(prepared.periods, result.rates, rule.metering)
    return result, ev


def step(
    prepared: PreparedScenario,
    rule: PolicyRule,
    state: SystemState,
) -> tuple[SystemState, StepRecord]:
    """Advance the feedback loop one rate-setting period.

    Solves next year's break-even rate at the current adopter fraction,
    advances adoption against the new tariff and installation cost, and
    reports end-of-period metrics at the new (tariff, adoption) pair.
    Raises :class:`~nemx.errors.DeathSpiralError` when no rate is
    feasible; callers decide whether that terminates a study.
    """
    econ = prepared.config.economics
    year = state.year  # 0-based exogenous index; emitted as year + 1
    theta = econ.theta_at(year)
    xi = econ.xi_at(year)

    result, ev = _solve_and_evaluate(prepared, rule, state.gamma, theta, year)

    saving = _annual_bill_saving(prepared.periods, ev)
    payback = payback_time_from_saving(
        saving,
        xi * econ.system_kw,
        prepared.config.adoption.degradation,
        prepared.config.adoption.interest,
        prepared.config.adoption.horizon,
    )
    ceiling = market_potential(prepared.config.adoption, payback)
    gamma_next = adoption_update(state.gamma, ceiling, prepared.config.adoption)

    agg = aggregate(
        prepared.periods, ev, gamma_next, theta,
        env_price=econ.env_price, smc_prices=prepared.smc_prices,
    )
    record = StepRecord(
        policy=rule.name,
        year=year + 1,
        feasible=True,
        retail_base=result.base_rate,
        retail_mean=float(np.mean(result.rates.plus)),
        export_mean=float(np.mean(result.rates.minus)),
        fixed_monthly=rule.fixed_monthly_at(year),
        cbc_monthly=rule.cbc_per_kw_month * econ.system_kw,
        gamma=gamma_next,
        welfare=agg.welfare,
        cost_shift_monthly=agg.cost_shift / 12.0,
        payback_years=payback,
        market_potential=ceiling,
    )
    new_state = SystemState(gamma=gamma_next, year=year + 1, base_rate=result.base_rate)
    return new_state, record


def run_long_run(
    prepared: PreparedScenario,
    rule: PolicyRule,
    horizon: int | None = None,
) -> ScenarioRun:
    """Iterate the feedback loop; a death spiral ends the run with a
    terminal infeasible record."""
    horizon = prepared.config.horizon if horizon is None else horizon
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    state = SystemState(gamma=prepared.config.gamma0)
    records: list[StepRecord] = []
    for _ in range(horizon):
        try:
            state, record = step(prepared, rule, state)
        except DeathSpiralError:
            records.append(StepRecord(
                policy=rule.name, year=state.year + 1, feasible=False,
                gamma=state.gamma,
            ))
            return ScenarioRun(
                policy=rule.name,
                records=tuple(records),
                terminal=f"death_spiral_year_{state.year + 1}",
            )
        records.append(record)
    return ScenarioRun(policy=rule.name, records=tuple(records), terminal="completed")


@dataclass(frozen=True)
class SweepCell:
    policy: str
    gamma: float
    feasible: bool
    retail_base: float | None = None
    welfare_pct: float | None = None
    prosumer_surplus_pct: float | None = None
    consumer_surplus_pct: float | None = None
    payback_years: float | None = None
    market_potential: float | None = None


def _sweep_point(
    prepared: PreparedScenario, rule: PolicyRule, gamma: float
) -> tuple[BreakEvenResult, Aggregates, float, float] | None:
    econ = prepared.config.economics
    try:
        result, ev = _solve_and_evaluate(
            prepared, rule, gamma, econ.theta0, year=0
        )
    except DeathSpiralError:
        return None
    agg = aggregate(prepared.periods, ev, gamma, econ.theta0,
                    env_price=econ.env_price, smc_prices=prepared.smc_prices)
    saving = _annual_bill_saving(prepared.periods, ev)
    payback = payback_time_from_saving(
        saving, econ.xi0 * econ.system_kw,
        prepared.config.adoption.degradation,
        prepared.config.adoption.interest,
        prepared.config.adoption.horizon,
    )
    ceiling = market_potential(prepared.config.adoption, payback)
    return result, agg, payback, ceiling


def run_short_run_sweep(
    prepared: PreparedScenario,
    gammas: Sequence[float] | None = None,
) -> tuple[SweepCell, ...]:
    """Break-even rates and metrics over an adoption grid, per policy.

    Percentage changes are taken against each policy's own zero-adoption
    solution.  Infeasible cells are reported and skipped; the sweep
    continues.
    """
    gammas = tuple(prepared.config.gamma_grid if gammas is None else gammas)
    if any(not 0 <= g <= 1 for g in gammas):
        raise ValueError("gamma grid must lie in [0, 1]")
    cells: list[SweepCell] = []
    for rule in prepared.rules:
        base = _sweep_point(prepared, rule, 0.0)
        for gamma in gammas:
            point = _sweep_point(prepared, rule, gamma) if gamma > 0 else base
            if point is None:
                cells.append(SweepCell(policy=rule.name, gamma=gamma, feasible=False))
                continue
            result, agg, payback, ceiling = point
            if base is None:
                pct = (None, None, None)
            else:
                _, agg0, _, _ = base
                pct = (
                    _pct(agg.welfare, agg0.welfare),
                    _pct(agg.prosumer_surplus, agg0.prosumer_surplus),
                    _pct(agg.consumer_surplus, agg0.consumer_surplus),
                )
            cells.append(SweepCell(
                policy=rule.name,
                gamma=gamma,
                feasible=True,
                retail_base=result.base_rate,
                welfare_pct=pct[0],
                prosumer_surplus_pct=pct[1],
                consumer_surplus_pct=pct[2],
                payback_years=payback,
                market_potential=ceiling,
            ))
    return tuple(cells)


def _pct(value: float, baseline: float) -> float | None:
    if baseline == 0:
        return None
    return (value - baseline) / abs(baseline) * 100.0


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

_DASH = "--"


def _fmt(value, kind: str) -> str:
    """Stable cell formatting: money 2 dp, rates/fractions 4 dp."""
    if value is None:
        return _DASH
    if kind == "flag":
        return "true" if value else "false"
    if kind == "int":
        return str(int(value))
    if kind == "years":
        return "inf" if math.isinf(value) else str(int(value))
    if kind == "money":
        return f"{value:.2f}"
    if kind == "rate" or kind == "frac":
        return f"{value:.4f}"
    raise ValueError(f"unknown cell kind {kind!r}")


_LONG_RUN_COLUMNS = (
    ("policy", "str"), ("year", "int"), ("feasible", "flag"),
    ("retail_base", "rate"), ("retail_mean", "rate"), ("export_mean", "rate"),
    ("fixed_monthly", "money"), ("cbc_monthly", "money"),
    ("gamma", "frac"), ("welfare", "money"),
    ("cost_shift_monthly", "money"), ("payback_years", "years"),
    ("market_potential", "frac"),
)

_SWEEP_COLUMNS = (
    ("policy", "str"), ("gamma", "frac"), ("feasible", "flag"),
    ("retail_base", "rate"), ("welfare_pct", "money"),
    ("prosumer_surplus_pct", "money"), ("consumer_surplus_pct", "money"),
    ("payback_years", "years"), ("market_potential", "frac"),
)


def _rows_to_lines(rows: Iterable, columns, fmt: str) -> list[str]:
    lines = []
    if fmt == "csv":
        lines.append(",".join(name for name, _ in columns))
        for row in rows:
            cells = []
            for name, kind in columns:
                value = getattr(row, name)
                cells.append(str(value) if kind == "str" else _fmt(value, kind))
            lines.append(",".join(cells))
    elif fmt == "json-lines":
        for row in rows:
            obj = {}
            for name, kind in columns:
                value = getattr(row, name)
                if kind == "str":
                    obj[name] = value
                else:
                    cell = _fmt(value, kind)
                    obj[name] = None if cell == _DASH else cell
            lines.append(json.dumps(obj, sort_keys=True))
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json-lines'")
    return lines


def _write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_long_run(runs: Sequence[ScenarioRun], out_dir: str | Path,
                  fmt: str = "csv") -> list[Path]:
    """One table of per-year records across policies."""
    out_dir = Path(out_dir)
    ext = "csv" if fmt == "csv" else "jsonl"
    rows = [record for run in runs for record in run.records]
    table = out_dir / f"long_run.{ext}"
    _write_lines(table, _rows_to_lines(rows, _LONG_RUN_COLUMNS, fmt))
    status = out_dir / "long_run_status.txt"
    _write_lines(status, [f"{run.policy}: {run.terminal}" for run in runs])
    return [table, status]


def emit_sweep(cells: Sequence[SweepCell], out_dir: str | Path,
               fmt: str = "csv") -> list[Path]:
    out_dir = Path(out_dir)
    ext = "csv" if fmt == "csv" else "jsonl"
    table = out_dir / f"sweep.{ext}"
    _write_lines(table, _rows_to_lines(cells, _SWEEP_COLUMNS, fmt))
    return [table]


def write_manifest(config: ScenarioConfig, out_dir: str | Path,
                   outputs: Sequence[Path]) -> Path:
    """Reproducibility sidecar: config hash, seed, package version."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "scenario": config.name,
        "config_sha256": config.config_hash,
        "seed": config.seed,
        "versions": {
            "nemx": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "pandas": pd.__version__,
        },
        "outputs": sorted(p.name for p in outputs),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path
