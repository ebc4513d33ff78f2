"""Experiment runner: scheme comparisons swept over fleet size or clock.

A sweep takes a base environment, varies one knob (number of nodes or the
cycle clock) over an ordered value list, and for each value runs a number
of Monte Carlo repetitions. Every repetition draws a fresh scenario from a
seed mixed deterministically out of (base seed, value index, repetition),
so any single run can be reproduced in isolation without replaying the
sweep.

Output is plot-ready CSV, one row per (value, repetition, scheme) in
records.csv and one row per (value, scheme) in summary.csv. Infeasible
runs are first-class records with feasible=false and tau 0, never silent
skips: the feasibility rate is itself a result. Identical specs produce
byte-identical files.

Repetitions are independent (pure functions of their seed) and could run
concurrently; records are assembled in (value index, repetition, scheme)
order regardless, so concurrency could never change the output bytes.
"""

from __future__ import annotations

import csv
import enum
import json
import statistics
from dataclasses import dataclass, replace
from pathlib import Path

from .allocator import Allocation, Scheme, solve_analytical, solve_eta, solve_oracle
from .model import CycleSpec, LearningTask
from .scenarios import (ScenarioConfig, _config_to_dict, _cycle_to_dict,
                        _task_to_dict, config_from_dict, cycle_from_dict,
                        generate_scenario, problem_from_scenario, task_from_dict)

SWEEP_FORMAT = "melalloc-sweep-v1"

# Canonical scheme order; record and summary rows follow it no matter what
# order a sweep spec file lists schemes in.
_SCHEME_ORDER = (Scheme.ANALYTICAL, Scheme.ETA, Scheme.ORACLE)

_SOLVERS = {
    Scheme.ANALYTICAL: solve_analytical,
    Scheme.ETA: solve_eta,
    Scheme.ORACLE: solve_oracle,
}

RECORD_COLUMNS = ("value", "repetition", "seed", "scheme", "tau", "feasible",
                  "time_min_s", "time_max_s", "time_mean_s",
                  "batch_min", "batch_max", "batch_sum")

SUMMARY_COLUMNS = ("value", "scheme", "tau_median", "tau_mean", "tau_min",
                   "tau_max", "feasible_rate")

_MASK64 = (1 << 64) - 1


class SweepVariable(enum.Enum):
    NUM_NODES = "num_nodes"
    CYCLE_CLOCK = "cycle_clock"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: the varied knob, its values, and the base environment.

    values must be strictly increasing; for NUM_NODES they must be
    integers >= 1. The base config's rng_seed acts as the sweep's base
    seed. Schemes are stored deduplicated in canonical order.
    """

    variable: SweepVariable
    values: tuple
    repetitions: int
    config: ScenarioConfig
    task: LearningTask
    cycle: CycleSpec
    schemes: tuple[Scheme, ...] = _SCHEME_ORDER

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not isinstance(self.variable, SweepVariable):
            raise ValueError(f"variable must be a SweepVariable, got {self.variable!r}")
        if not self.values:
            raise ValueError("values must be nonempty")
        for prev, cur in zip(self.values, self.values[1:]):
            if not prev < cur:
                raise ValueError(f"values must be strictly increasing, got {self.values}")
        if self.variable is SweepVariable.NUM_NODES:
            for v in self.values:
                if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    raise ValueError(f"num_nodes values must be integers >= 1, got {v!r}")
        else:
            for v in self.values:
                if not float(v) > 0:
                    raise ValueError(f"cycle_clock values must be > 0, got {v!r}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        requested = set(self.schemes)
        if not requested:
            raise ValueError("schemes must be nonempty")
        for s in requested:
            if not isinstance(s, Scheme):
                raise ValueError(f"schemes entries must be Scheme, got {s!r}")
        object.__setattr__(self, "schemes",
                           tuple(s for s in _SCHEME_ORDER if s in requested))


@dataclass(frozen=True)
class ResultRecord:
    """One scheme's outcome on one drawn scenario.

    Times digest the per-node cycle times (idle nodes count as recorded,
    see Allocation); batch_* digest the integer batch vector. batch_sum
    equals the instance's total_samples exactly whenever feasible.
    """

    value: float
    repetition: int
    seed: int
    scheme: Scheme
    tau: int
    feasible: bool
    time_min_s: float
    time_max_s: float
    time_mean_s: float
    batch_min: int
    batch_max: int
    batch_sum: int


@dataclass(frozen=True)
class SummaryRow:
    """Aggregates over all repetitions of one (value, scheme) cell.

    Infeasible runs stay in the aggregation with tau 0; feasible_rate
    reports their share separately.
    """

    value: float
    scheme: Scheme
    tau_median: float
    tau_mean: float
    tau_min: int
    tau_max: int
    feasible_rate: float


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(base_seed: int, value_index: int, repetition: int) -> int:
    """Derive the 64-bit scenario seed for one (sweep point, repetition).

    Two chained splitmix64 finalizer rounds, folding in the value index
    and then the repetition. Documented so an interesting run can be
    regenerated alone: feed the returned seed to the scenario generator
    with the sweep's per-value config.
    """
    x = _splitmix64((base_seed & _MASK64) ^ (value_index & _MASK64))
    return _splitmix64(x ^ (repetition & _MASK64))


def _record(value, repetition: int, seed: int, alloc: Allocation) -> ResultRecord:
    return ResultRecord(
        value=value,
        repetition=repetition,
        seed=seed,
        scheme=alloc.scheme,
        tau=alloc.tau,
        feasible=alloc.feasible,
        time_min_s=min(alloc.per_node_time),
        time_max_s=max(alloc.per_node_time),
        time_mean_s=statistics.fmean(alloc.per_node_time),
        batch_min=min(alloc.d_int),
        batch_max=max(alloc.d_int),
        batch_sum=sum(alloc.d_int),
    )


def run_sweep(spec: SweepSpec) -> list[ResultRecord]:
    """Run every (value, repetition, scheme) cell and return the records
    in that order. len(result) = len(values) * repetitions * len(schemes)."""
    records = []
    for value_index, value in enumerate(spec.values):
        if spec.variable is SweepVariable.NUM_NODES:
            cycle = spec.cycle
        else:
            cycle = replace(spec.cycle, clock=float(value))
        for repetition in range(spec.repetitions):
            seed = mix_seed(spec.config.rng_seed, value_index, repetition)
            config = replace(spec.config, rng_seed=seed)
            if spec.variable is SweepVariable.NUM_NODES:
                config = replace(config, num_nodes=value)
            scenario = generate_scenario(config, spec.task, cycle)
            instance = problem_from_scenario(scenario)
            for scheme in spec.schemes:
                alloc = _SOLVERS[scheme](instance)
                records.append(_record(value, repetition, seed, alloc))
    return records


def summarize(records: list[ResultRecord]) -> list[SummaryRow]:
    """Aggregate records into one row per (value, scheme).

    Cells appear in first-record order, which for run_sweep output means
    value order crossed with canonical scheme order.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[ResultRecord]] = {}
    for rec in records:
        groups.setdefault((rec.value, rec.scheme), []).append(rec)
    rows = []
    for (value, scheme), group in groups.items():
        taus = [r.tau for r in group]
        rows.append(SummaryRow(
            value=value,
            scheme=scheme,
            tau_median=statistics.median(taus),
            tau_mean=statistics.fmean(taus),
            tau_min=min(taus),
            tau_max=max(taus),
            feasible_rate=sum(r.feasible for r in group) / len(group),
        ))
    return rows


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Scheme):
        return value.value
    return str(value)


def write_records_csv(records: list[ResultRecord], path: str | Path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([_cell(getattr(r, col)) for col in RECORD_COLUMNS])


def write_summary_csv(rows: list[SummaryRow], path: str | Path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_cell(row.value), _cell(row.scheme),
                             _cell(row.tau_median), _cell(row.tau_mean),
                             _cell(row.tau_min), _cell(row.tau_max),
                             _cell(row.feasible_rate)])


def sweep_spec_to_dict(spec: SweepSpec) -> dict:
    return {
        "format": SWEEP_FORMAT,
        "variable": spec.variable.value,
        "values": list(spec.values),
        "repetitions": spec.repetitions,
        "schemes": [s.value for s in spec.schemes],
        "config": _config_to_dict(spec.config),
        "task": _task_to_dict(spec.task),
        "cycle": _cycle_to_dict(spec.cycle),
    }


def sweep_spec_from_dict(data: dict) -> SweepSpec:
    if data.get("format") != SWEEP_FORMAT:
        raise ValueError(f"not a {SWEEP_FORMAT} document: format={data.get('format')!r}")
    return SweepSpec(
        variable=SweepVariable(data["variable"]),
        values=tuple(data["values"]),
        repetitions=data["repetitions"],
        config=config_from_dict(data["config"]),
        task=task_from_dict(data["task"]),
        cycle=cycle_from_dict(data["cycle"]),
        schemes=tuple(Scheme(s) for s in data.get("schemes", [s.value for s in _SCHEME_ORDER])),
    )


def load_sweep_spec(path: str | Path) -> SweepSpec:
    with open(path, encoding="utf-8") as fh:
        return sweep_spec_from_dict(json.load(fh))


def run_sweep_to_dir(spec: SweepSpec, out_dir: str | Path) -> list[ResultRecord]:
    """Run the sweep and write records.csv, summary.csv, and
    spec-echo.json (the parsed spec re-serialized, for provenance) into
    out_dir, creating it if needed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = run_sweep(spec)
    write_records_csv(records, out / "records.csv")
    write_summary_csv(summarize(records), out / "summary.csv")
    echo = json.dumps(sweep_spec_to_dict(spec), indent=2) + "\n"
    (out / "spec-echo.json").write_text(echo, encoding="ascii")
    return records
