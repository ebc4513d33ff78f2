"""Command-line front end.

Three subcommands:

* ``solve``: load a scenario file, run one scheme, print the allocation.
* ``sweep``: run a Monte Carlo sweep spec into an output directory.
* ``gen``: draw a scenario from a config file and write it to JSON.

Exit codes: 0 on success, 1 when a single solve comes back infeasible,
2 on configuration errors (unreadable files, schema violations, bad
arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .allocator import Allocation, Scheme, solve_analytical, solve_eta, solve_oracle
from .model import Mode
from .scenarios import (Scenario, config_from_dict, cycle_from_dict,
                        generate_scenario, load_scenario, problem_from_scenario,
                        save_scenario, task_from_dict)
from .harness import load_sweep_spec, run_sweep_to_dir

_SOLVERS = {
    Scheme.ANALYTICAL: solve_analytical,
    Scheme.ETA: solve_eta,
    Scheme.ORACLE: solve_oracle,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="melalloc",
        description="Adaptive batch allocation for mobile edge learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one scenario file")
    solve.add_argument("--scenario", required=True, help="scenario JSON file")
    solve.add_argument("--scheme", choices=[s.value for s in Scheme],
                       default=Scheme.ANALYTICAL.value,
                       help="solver to run (default: analytical)")
    solve.add_argument("--mode", choices=[m.value for m in Mode], default=None,
                       help="override the scenario's data-distribution mode")
    solve.add_argument("--json", action="store_true",
                       help="print the allocation as JSON instead of a table")

    sweep = sub.add_parser("sweep", help="run a sweep spec")
    sweep.add_argument("--spec", required=True, help="sweep spec JSON file")
    sweep.add_argument("--out", required=True,
                       help="output directory for records.csv, summary.csv, spec-echo.json")

    gen = sub.add_parser("gen", help="generate a scenario file")
    gen.add_argument("--config", required=True,
                     help="JSON file with config, task, and cycle sections")
    gen.add_argument("--seed", required=True, type=int,
                     help="RNG seed overriding the config's rng_seed")
    gen.add_argument("--out", required=True, help="scenario JSON output path")

    return parser


def _print_human(scenario: Scenario, alloc: Allocation) -> None:
    print(f"scheme      {alloc.scheme.value}")
    print(f"feasible    {'yes' if alloc.feasible else 'no'}")
    print(f"tau         {alloc.tau}")
    print(f"clock       {scenario.cycle.clock:g} s ({scenario.cycle.mode.value} mode)")
    if not alloc.feasible:
        print("no allocation places all samples within the clock")
        return
    print(f"batches     sum {sum(alloc.d_int)}, min {min(alloc.d_int)}, "
          f"max {max(alloc.d_int)}")
    print()
    print(f"{'node':<12}{'batch':>8}  {'time_s':>12}")
    for node, batch, t in zip(scenario.nodes, alloc.d_int, alloc.per_node_time):
        print(f"{node.id:<12}{batch:>8}  {t:>12.6f}")


def _solve_payload(scenario: Scenario, alloc: Allocation) -> dict:
    return {
        "scheme": alloc.scheme.value,
        "feasible": alloc.feasible,
        "tau": alloc.tau,
        "clock_seconds": scenario.cycle.clock,
        "mode": scenario.cycle.mode.value,
        "total_samples": scenario.task.total_samples,
        "node_ids": [n.id for n in scenario.nodes],
        "batch_sizes": list(alloc.d_int),
        "per_node_time_s": list(alloc.per_node_time),
    }


def _cmd_solve(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.mode is not None:
        scenario = replace(scenario, cycle=replace(scenario.cycle, mode=Mode(args.mode)))
    instance = problem_from_scenario(scenario)
    alloc = _SOLVERS[Scheme(args.scheme)](instance)
    if args.json:
        print(json.dumps(_solve_payload(scenario, alloc), indent=2))
    else:
        _print_human(scenario, alloc)
    return 0 if alloc.feasible else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    records = run_sweep_to_dir(spec, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    with open(args.config, encoding="utf-8") as fh:
        data = json.load(fh)
    for section in ("config", "task", "cycle"):
        if section not in data:
            raise ValueError(f"config file is missing the {section!r} section")
    config = replace(config_from_dict(data["config"]), rng_seed=args.seed)
    scenario = generate_scenario(config, task_from_dict(data["task"]),
                                 cycle_from_dict(data["cycle"]))
    save_scenario(scenario, args.out)
    print(f"wrote {Path(args.out)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"solve": _cmd_solve, "sweep": _cmd_sweep, "gen": _cmd_gen}[args.command]
    try:
        return handler(args)
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: missing field {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
