"""Command-line entry points.

Subcommands::

    nemx run <config>       long-run feedback studies for every policy
    nemx sweep <config>     short-run break-even sweep over an adoption grid
    nemx payback <config>   first-year payback and market potential per policy
    nemx validate <config>  ingest and sanity-check the configured traces

Common options: ``--out`` output directory, ``--format csv|json-lines``,
``--seed`` to override the config seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adoption import market_potential, payback_time_from_saving
from .config import load_config
from .errors import DeathSpiralError, NemxError
from .scenario import (
    emit_long_run,
    emit_sweep,
    prepare,
    run_long_run,
    run_short_run_sweep,
    write_manifest,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", type=Path, help="scenario YAML file")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
    parser.add_argument("--format", choices=["csv", "json-lines"], default="csv")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")


def _parse_gamma_grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected lo:hi:step, got {text!r}"
        ) from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad gamma range {text!r}")
    values = []
    g = lo
    while g <= hi + 1e-12:
        values.append(round(g, 10))
        g += step
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nemx",
        description="Tariff design studies: prosumer decisions, break-even "
                    "rates, and long-run solar adoption.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="long-run feedback studies")
    _add_common(run_p)
    run_p.add_argument("--horizon", type=int, default=None,
                       help="override the config horizon (years)")

    sweep_p = sub.add_parser("sweep", help="short-run sweep over adoption levels")
    _add_common(sweep_p)
    sweep_p.add_argument("--gamma", type=_parse_gamma_grid, default=None,
                         metavar="LO:HI:STEP", help="adoption grid override")

    pb_p = sub.add_parser("payback", help="payback and market potential per policy")
    _add_common(pb_p)

    val_p = sub.add_parser("validate", help="validate the configured traces")
    val_p.add_argument("config", type=Path)
    val_p.add_argument("--seed", type=int, default=None)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed_override=args.seed)
    prepared = prepare(config)
    runs = [run_long_run(prepared, rule, args.horizon) for rule in prepared.rules]
    outputs = emit_long_run(runs, args.out, args.format)
    outputs.append(write_manifest(config, args.out, outputs))
    for run in runs:
        print(f"{run.policy}: {run.terminal} ({len(run.records)} records)")
    print(f"wrote {len(outputs)} files to {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed_override=args.seed)
    prepared = prepare(config)
    cells = run_short_run_sweep(prepared, args.gamma)
    outputs = emit_sweep(cells, args.out, args.format)
    outputs.append(write_manifest(config, args.out, outputs))
    dead = sum(1 for c in cells if not c.feasible)
    print(f"{len(cells)} cells ({dead} infeasible) -> {args.out}")
    return 0


def _cmd_payback(args: argparse.Namespace) -> int:
    from .engine import evaluate
    from .rates import RateCase, solve_break_even

    config = load_config(args.config, seed_override=args.seed)
    prepared = prepare(config)
    econ = config.economics
    lines = ["policy,retail_base,annual_saving,payback_years,market_potential"]
    for rule in prepared.rules:
        case = RateCase(
            periods=prepared.periods, gamma=config.gamma0, theta=econ.theta0,
            rule=rule, year=0, system_kw=econ.system_kw,
            bracket=config.rate_bracket, scan_step=config.scan_step,
        )
        try:
            result = solve_break_even(case)
        except DeathSpiralError:
            lines.append(f"{rule.name},--,--,--,--")
            continue
        ev = evaluate(prepared.periods, result.rates, rule.metering)
        saving = prepared.periods.weight * float(
            (ev.pay0[:, None] - ev.pay_pro).mean(axis=1).sum()
        )
        payback = payback_time_from_saving(
            saving, econ.xi0 * econ.system_kw,
            config.adoption.degradation, config.adoption.interest,
            config.adoption.horizon,
        )
        ceiling = market_potential(config.adoption, payback)
        pb = "inf" if payback == float("inf") else str(int(payback))
        lines.append(
            f"{rule.name},{result.base_rate:.4f},{saving:.2f},{pb},{ceiling:.4f}"
        )
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "payback.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    print(f"wrote {path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed_override=args.seed)
    prepared = prepare(config)
    data = prepared.data
    print(f"scenario: {config.name}")
    print(f"devices: {', '.join(data.devices)}")
    print(f"net-billing periods: {data.n_periods} "
          f"({data.net_billing_minutes} min each)")
    print(f"model periods: {prepared.periods.n_periods} "
          f"x {prepared.periods.n_samples} samples "
          f"(weight {prepared.periods.weight:.2f})")
    print(f"policies: {', '.join(r.name for r in prepared.rules)}")
    print("ok")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "payback": _cmd_payback,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except NemxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
