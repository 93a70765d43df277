"""Command-line front end.

    hapsris simulate          [--config PATH] [--seed U64] [--drops N] [--out DIR]
    hapsris sweep             [--direction downlink|uplink] ...
    hapsris feasibility       [--config PATH] [--out DIR]
    hapsris optimize-grouping [--objective ...] ...
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import output
from .config import RunConfig, parse_config
from .engine import Objective, power_report, run_campaign, select_grouping, sweep_tx_power
from .errors import ConfigurationError
from .ris import Direction

log = logging.getLogger("hapsris")


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI config file (defaults if omitted)")
    common.add_argument("--seed", type=_u64, help="override [campaign] master_seed")
    common.add_argument("--drops", type=_positive, help="override [campaign] num_drops")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--workers", type=_positive, help="worker processes for drops")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hapsris",
                                description="HAPS-mounted RIS backhaul Monte Carlo simulator")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one campaign and write CSV/summary")
    sw = sub.add_parser("sweep", parents=[common], help="transmit-power sweep table")
    sw.add_argument("--direction", choices=[d.value for d in Direction], default="downlink")
    sub.add_parser("feasibility", parents=[common], help="power and payload report only")
    og = sub.add_parser("optimize-grouping", parents=[common], help="select L for an objective")
    og.add_argument("--objective", choices=[o.value for o in Objective])
    return p


def _load(args) -> RunConfig:
    cfg = parse_config(args.config)
    spec = cfg.spec
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.drops is not None:
        spec = replace(spec, num_drops=args.drops)
    cfg.spec = spec.validate()
    cfg.out_dir = args.out
    if args.workers is not None:
        cfg.workers = args.workers
    return cfg


def cmd_simulate(cfg: RunConfig) -> None:
    result = run_campaign(cfg.spec, cfg.workers)
    for path in output.emit_results(result, cfg.out_dir):
        log.info("wrote %s", path)
    print(f"wrote {len(result.records)} records to {cfg.out_dir}")


def cmd_sweep(cfg: RunConfig, direction: Direction) -> None:
    rows = sweep_tx_power(cfg.spec, direction, cfg.workers)
    text = output.sweep_csv(rows)
    sys.stdout.write(text)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    output.write_text(cfg.out_dir / f"sweep_{direction.value}.csv", text)


def cmd_feasibility(cfg: RunConfig) -> None:
    schemes = cfg.spec.schemes
    if all(a.label != cfg.reference.label for a in schemes):
        schemes = schemes + (cfg.reference,)
    spec = replace(cfg.spec, schemes=schemes)
    report = power_report(spec)
    text = output.feasibility_text(cfg.reference, report, spec.channel.frequency)
    sys.stdout.write(text)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    output.write_text(cfg.out_dir / "feasibility.txt", text)


def cmd_optimize(cfg: RunConfig, objective: str | None) -> None:
    obj = Objective(objective) if objective else cfg.objective
    sel = select_grouping(cfg.spec, obj, cfg.candidates, cfg.grouping_direction, cfg.workers)
    text = output.grouping_text(sel)
    sys.stdout.write(text)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    output.write_text(cfg.out_dir / "grouping.txt", text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = _load(args)
        if args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "sweep":
            cmd_sweep(cfg, Direction(args.direction))
        elif args.command == "feasibility":
            cmd_feasibility(cfg)
        else:
            cmd_optimize(cfg, args.objective)
    except ConfigurationError as exc:
        print(f"hapsris: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hapsris: I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
