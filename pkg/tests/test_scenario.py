import json

import numpy as np
import pytest
import yaml

from nemx import cli
from nemx.config import builtin_data_path, load_config
from nemx.engine import evaluate
from nemx.errors import DeathSpiralError
from nemx.rates import RateCase, expected_utility_surplus, solve_break_even
from nemx.scenario import (
    SystemState,
    emit_long_run,
    emit_sweep,
    prepare,
    run_long_run,
    run_short_run_sweep,
    step,
    write_manifest,
)

from test_traces import write_traces


def write_config(tmp_path, days=3, **overrides):
    write_traces(tmp_path, days=days)
    config = {
        "name": "mini",
        "seed": 3,
        "traces": {"load": "load.csv", "solar": "solar.csv",
                   "prices": "prices.csv"},
        "model_periods": 12,
        "samples": 8,
        "historical_price": 0.2,
        "elasticities": {"default": -0.4},
        "economics": {
            "theta0": 150.0, "theta_growth": 0.02, "xi0": 900.0,
            "xi_decay": 0.03, "env_price": 0.035, "smc_adder": 0.03,
            "degradation": 0.01, "interest": 0.03, "payback_horizon": 25,
            "system_kw": 1.0,
        },
        "adoption": {
            "market_size": 0.4, "payback_sensitivity": -0.05,
            "bass_p": 0.03, "bass_q": 0.6, "gamma0": 0.05,
        },
        "rate_bracket": [0.0, 1.5],
        "horizon": 4,
        "gamma_grid": [0.0, 0.2, 0.4],
        "policies": [
            {"name": "NEM 1.0", "export_rule": "retail"},
            {"name": "FiT 1.0", "metering": "fit", "export_rule": "retail"},
        ],
    }
    config.update(overrides)
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(config))
    return path


@pytest.fixture()
def mini(tmp_path):
    return prepare(load_config(write_config(tmp_path)))


class TestStep:
    def test_advances_state_and_reports(self, mini):
        state = SystemState(gamma=0.05)
        new_state, record = step(mini, mini.rules[0], state)
        assert record.feasible
        assert record.year == 1
        assert new_state.gamma >= state.gamma
        assert 0 <= new_state.gamma <= 1
        assert record.retail_base is not None and record.retail_base > 0

    def test_break_even_audit(self, mini):
        state = SystemState(gamma=0.05)
        new_state, record = step(mini, mini.rules[0], state)
        case = RateCase(
            periods=mini.periods, gamma=state.gamma,
            theta=mini.config.economics.theta0, rule=mini.rules[0],
            year=0, system_kw=mini.config.economics.system_kw,
            bracket=mini.config.rate_bracket,
        )
        residual = expected_utility_surplus(case, record.retail_base)
        assert abs(residual) <= 1e-6 * max(mini.config.economics.theta0, 1.0)

    def test_frozen_gamma_when_ceiling_below(self, tmp_path):
        # gigantic install cost: payback unreachable, adoption frozen
        path = write_config(tmp_path, economics={
            "theta0": 150.0, "xi0": 1e9, "system_kw": 1.0,
        })
        prepared = prepare(load_config(path))
        state = SystemState(gamma=0.05)
        for _ in range(3):
            state, record = step(prepared, prepared.rules[0], state)
            assert record.gamma == pytest.approx(0.05)
            assert record.market_potential == 0.0
            assert record.payback_years == float("inf")


class TestLongRun:
    def test_completes_with_records(self, mini):
        run = run_long_run(mini, mini.rules[0])
        assert run.terminal == "completed"
        assert len(run.records) == 4
        years = [r.year for r in run.records]
        assert years == [1, 2, 3, 4]
        gammas = [r.gamma for r in run.records]
        assert all(b >= a for a, b in zip(gammas, gammas[1:]))

    def test_zero_horizon_empty(self, mini):
        run = run_long_run(mini, mini.rules[0], horizon=0)
        assert run.records == ()
        assert run.terminal == "completed"

    def test_death_spiral_terminates_run(self, tmp_path):
        path = write_config(tmp_path, economics={"theta0": 1e6,
                                                 "system_kw": 1.0})
        prepared = prepare(load_config(path))
        run = run_long_run(prepared, prepared.rules[0])
        assert run.terminal == "death_spiral_year_1"
        assert len(run.records) == 1
        assert not run.records[0].feasible

    def test_nem_one_equals_fit_one(self, mini):
        nem = run_long_run(mini, mini.rule("NEM 1.0"))
        fit = run_long_run(mini, mini.rule("FiT 1.0"))
        for a, b in zip(nem.records, fit.records):
            assert a.gamma == pytest.approx(b.gamma, abs=1e-9)
            assert a.retail_base == pytest.approx(b.retail_base, abs=1e-6)


class TestSweep:
    def test_cells_cover_grid(self, mini):
        cells = run_short_run_sweep(mini)
        assert len(cells) == 2 * 3
        assert {c.gamma for c in cells} == {0.0, 0.2, 0.4}
        for c in cells:
            if c.feasible and c.gamma == 0.0:
                assert c.welfare_pct == pytest.approx(0.0, abs=1e-9)

    def test_gamma_grid_validated(self, mini):
        with pytest.raises(ValueError):
            run_short_run_sweep(mini, [0.0, 1.2])


class TestEmission:
    def test_csv_layout_and_rounding(self, mini, tmp_path):
        runs = [run_long_run(mini, rule) for rule in mini.rules]
        files = emit_long_run(runs, tmp_path / "out")
        table = files[0].read_text().splitlines()
        header = table[0].split(",")
        assert header[0] == "policy" and "gamma" in header
        first = table[1].split(",")
        gamma_cell = first[header.index("gamma")]
        assert len(gamma_cell.split(".")[1]) == 4  # fractions at 4 decimals
        welfare_cell = first[header.index("welfare")]
        assert len(welfare_cell.split(".")[1]) == 2  # money at 2 decimals

    def test_death_spiral_rows_use_dashes(self, tmp_path):
        path = write_config(tmp_path, economics={"theta0": 1e6,
                                                 "system_kw": 1.0})
        prepared = prepare(load_config(path))
        runs = [run_long_run(prepared, prepared.rules[0])]
        files = emit_long_run(runs, tmp_path / "out")
        lines = files[0].read_text().splitlines()
        assert "--" in lines[1]
        assert "false" in lines[1]

    def test_json_lines_format(self, mini, tmp_path):
        cells = run_short_run_sweep(mini, [0.0, 0.2])
        files = emit_sweep(cells, tmp_path / "out", fmt="json-lines")
        rows = [json.loads(line) for line in files[0].read_text().splitlines()]
        assert len(rows) == 4
        assert all("market_potential" in row for row in rows)

    def test_manifest_contents(self, mini, tmp_path):
        files = emit_sweep(run_short_run_sweep(mini, [0.0]), tmp_path / "out")
        manifest_path = write_manifest(mini.config, tmp_path / "out", files)
        manifest = json.loads(manifest_path.read_text())
        assert manifest["scenario"] == "mini"
        assert manifest["seed"] == 3
        assert "nemx" in manifest["versions"]
        assert len(manifest["config_sha256"]) == 64
        assert manifest["outputs"] == ["sweep.csv"]

    def test_unknown_format_rejected(self, mini, tmp_path):
        with pytest.raises(ValueError):
            emit_sweep(run_short_run_sweep(mini, [0.0]), tmp_path, fmt="xml")


class TestCli:
    def test_validate(self, tmp_path, capsys):
        path = write_config(tmp_path)
        assert cli.main(["validate", str(path)]) == 0
        out = capsys.readouterr().out
        assert "ok" in out
        assert "model periods: 12" in out

    def test_run_writes_outputs(self, tmp_path):
        path = write_config(tmp_path)
        out_dir = tmp_path / "results"
        assert cli.main(["run", str(path), "--out", str(out_dir),
                         "--horizon", "2"]) == 0
        assert (out_dir / "long_run.csv").exists()
        assert (out_dir / "manifest.json").exists()

    def test_sweep_with_gamma_override(self, tmp_path):
        path = write_config(tmp_path)
        out_dir = tmp_path / "sweep_out"
        assert cli.main(["sweep", str(path), "--out", str(out_dir),
                         "--gamma", "0:0.2:0.1",
                         "--format", "json-lines"]) == 0
        lines = (out_dir / "sweep.jsonl").read_text().splitlines()
        assert len(lines) == 2 * 3

    def test_payback_command(self, tmp_path, capsys):
        path = write_config(tmp_path)
        out_dir = tmp_path / "pb"
        assert cli.main(["payback", str(path), "--out", str(out_dir)]) == 0
        assert (out_dir / "payback.csv").exists()

    def test_seed_override_changes_manifest(self, tmp_path):
        path = write_config(tmp_path)
        out_dir = tmp_path / "seeded"
        assert cli.main(["sweep", str(path), "--out", str(out_dir),
                         "--gamma", "0:0:0.1", "--seed", "99"]) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["seed"] == 99

    def test_invalid_traces_exit_code(self, tmp_path):
        path = write_config(tmp_path)
        (tmp_path / "solar.csv").write_text("timestamp,kwh\n")
        assert cli.main(["validate", str(path)]) == 2


class TestBundledDataset:
    def test_trace_reduces_to_2160_hourly_periods(self):
        from nemx.config import builtin_data_path, load_config
        from nemx.traces import ingest_traces

        cfg = load_config(builtin_data_path("synthetic_longrun.yaml"))
        data = ingest_traces(cfg.load_path, cfg.solar_path, cfg.prices_path,
                             cfg.net_billing_minutes)
        assert data.n_periods == 2160  # 90 days of hourly net-billing periods
        assert data.devices == ("ev", "hvac", "other")

    def test_emitted_rates_ordered_when_feasible(self, mini):
        run = run_long_run(mini, mini.rules[0])
        for rec in run.records:
            if rec.feasible:
                assert rec.retail_mean >= rec.export_mean >= 0.0
                assert 0.0 <= rec.gamma <= 1.0
