"""Scenario configuration: YAML schema, defaults, and trace resolution.

One YAML file describes one scenario: trace locations, the model-year
reduction (period count, sample count, seed), device calibration
inputs, economic constants, adoption parameters, and the list of tariff
policies to study.  Every numeric constant used by the simulations is
overridable here; the bundled file documents the synthetic defaults.

Trace paths may use the ``builtin:`` prefix to reference the packaged
synthetic dataset; otherwise they resolve relative to the config file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .adoption import AdoptionParams
from .rates import PolicyRule

__all__ = ["EconomicConfig", "ScenarioConfig", "load_config", "builtin_data_path"]


def builtin_data_path(name: str) -> Path:
    """Filesystem path of a packaged data file."""
    base = resources.files("nemx").joinpath("data")
    path = Path(str(base.joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file named {name!r}")
    return path


@dataclass(frozen=True)
class EconomicConfig:
    """Exogenous cost environment of the rate-setting loop."""

    theta0: float = 1050.0          # utility fixed cost, $/customer/year
    theta_growth: float = 0.026     # annual growth of theta
    xi0: float = 4500.0             # DER installation cost, $/kW
    xi_decay: float = 0.035         # annual decline of xi
    env_price: float = 0.035        # environmental value of DER, $/kWh
    smc_adder: float = 0.03         # non-market adder over wholesale, $/kWh
    degradation: float = 0.01       # DER output degradation per year
    interest: float = 0.03          # discount rate for payback
    payback_horizon: int = 30       # years searched for payback
    system_kw: float = 5.0          # DER system size matching the solar trace

    def theta_at(self, year: int) -> float:
        return self.theta0 * (1.0 + self.theta_growth) ** year

    def xi_at(self, year: int) -> float:
        return self.xi0 * (1.0 - self.xi_decay) ** year


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    load_path: Path
    solar_path: Path
    prices_path: Path
    net_billing_minutes: int
    model_periods: int
    samples: int
    hours_per_year: float
    historical_price: float
    elasticities: dict[str, float]
    economics: EconomicConfig
    adoption: AdoptionParams
    gamma0: float
    rate_bracket: tuple[float, float]
    scan_step: float
    horizon: int
    gamma_grid: tuple[float, ...]
    policies: tuple[PolicyRule, ...]
    export_profiles: dict[str, tuple[float, ...]]
    raw: dict[str, Any] = field(repr=False, default_factory=dict)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def policy(self, name: str) -> PolicyRule:
        for rule in self.policies:
            if rule.name == name:
                return rule
        raise KeyError(f"no policy named {name!r} in scenario {self.name!r}")


def _resolve_path(value: str, config_dir: Path) -> Path:
    if value.startswith("builtin:"):
        return builtin_data_path(value.split(":", 1)[1])
    path = Path(value)
    return path if path.is_absolute() else config_dir / path


def _policy_rule(entry: Mapping[str, Any],
                 profiles: Mapping[str, tuple[float, ...]]) -> PolicyRule:
    data = dict(entry)
    name = data.pop("name", None)
    if not name:
        raise ValueError("every policy entry needs a name")
    profile_ref = data.pop("export_profile", None)
    if isinstance(profile_ref, str):
        if profile_ref not in profiles:
            raise ValueError(f"policy {name!r}: unknown export profile {profile_ref!r}")
        data["export_profile"] = profiles[profile_ref]
    elif profile_ref is not None:
        data["export_profile"] = tuple(float(x) for x in profile_ref)
    known = {
        "metering", "export_rule", "export_offset", "export_ratio",
        "ratio_decrement", "ratio_floor", "export_profile", "tou",
        "tou_peak_ratio", "tou_peak_start", "tou_peak_end",
        "fixed_monthly", "fixed_increment", "fixed_cap", "cbc_per_kw_month",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"policy {name!r}: unknown keys {sorted(unknown)}")
    return PolicyRule(name=str(name), **data)


def load_config(path: str | Path, seed_override: int | None = None) -> ScenarioConfig:
    """Parse and validate a scenario YAML file."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        raw = yaml.safe_load(handle)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a top-level mapping")
    config_dir = path.resolve().parent

    traces = raw.get("traces", {})
    for key in ("load", "solar", "prices"):
        if key not in traces:
            raise ValueError(f"{path}: traces.{key} is required")

    profiles = {
        str(k): tuple(float(x) for x in v)
        for k, v in (raw.get("export_profiles") or {}).items()
    }
    policies = tuple(
        _policy_rule(entry, profiles) for entry in raw.get("policies", [])
    )
    if not policies:
        raise ValueError(f"{path}: at least one policy is required")

    econ_raw = raw.get("economics") or {}
    economics = EconomicConfig(**econ_raw)

    adoption_raw = dict(raw.get("adoption") or {})
    gamma0 = float(adoption_raw.pop("gamma0", 0.0))
    adoption_raw.setdefault("degradation", economics.degradation)
    adoption_raw.setdefault("interest", economics.interest)
    adoption_raw.setdefault("horizon", economics.payback_horizon)
    adoption = AdoptionParams(**adoption_raw)

    elasticities = {
        str(k): float(v) for k, v in (raw.get("elasticities") or {}).items()
    }
    if not elasticities:
        elasticities = {"default": -0.3}

    bracket = raw.get("rate_bracket", [0.0, 1.5])
    seed = int(raw.get("seed", 0))
    if seed_override is not None:
        seed = int(seed_override)

    return ScenarioConfig(
        name=str(raw.get("name", path.stem)),
        seed=seed,
        load_path=_resolve_path(str(traces["load"]), config_dir),
        solar_path=_resolve_path(str(traces["solar"]), config_dir),
        prices_path=_resolve_path(str(traces["prices"]), config_dir),
        net_billing_minutes=int(raw.get("net_billing_minutes", 60)),
        model_periods=int(raw.get("model_periods", 24)),
        samples=int(raw.get("samples", 64)),
        hours_per_year=float(raw.get("hours_per_year", 8760.0)),
        historical_price=float(raw.get("historical_price", 0.20)),
        elasticities=elasticities,
        economics=economics,
        adoption=adoption,
        gamma0=gamma0,
        rate_bracket=(float(bracket[0]), float(bracket[1])),
        scan_step=float(raw.get("scan_step", 0.005)),
        horizon=int(raw.get("horizon", 30)),
        gamma_grid=tuple(float(g) for g in raw.get(
            "gamma_grid", [0.0, 0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.5, 0.6]
        )),
        policies=policies,
        export_profiles=profiles,
        raw=dict(raw, seed=seed),
    )
