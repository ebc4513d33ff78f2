"""Seeded random edge deployments and the reference learning task.

A scenario is a concrete, fully resolved environment: K learners with
positions, CPU speeds, and channel gains inside a disk around the
orchestrator, plus the link parameters, the learning task, and the cycle
spec. Generation is deterministic in the config seed, and scenarios
round-trip through a JSON file format whose field names carry explicit SI
units.

Config-level quantities use radio conventions (dBm, dBm/Hz, dB); they are
converted to linear SI units here, at ingestion, and nowhere else.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .allocator import ProblemInstance
from .model import (CycleSpec, EdgeNode, LearningTask, LinkParams, Mode,
                    compute_coefficients)

SCENARIO_FORMAT = "melalloc-scenario-v1"

# Generator identity is part of the file-format contract: scenarios are
# reproducible only against this algorithm (numpy's default_rng, PCG64,
# seeded with the 64-bit config seed).
RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class CpuProfile:
    """One CPU speed tier and the fraction of the fleet running at it."""

    cpu_frequency_hz: float
    fraction: float

    def __post_init__(self) -> None:
        if not self.cpu_frequency_hz > 0:
            raise ValueError(f"cpu_frequency_hz must be > 0, got {self.cpu_frequency_hz}")
        if not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs for random deployment generation.

    Learners are placed uniformly in a disk of ``area_radius_m`` meters
    around the orchestrator. Path loss in dB at distance r meters is
    ``pathloss_intercept_db + 10 * pathloss_exponent * log10(r)``; setting
    the exponent to 0 gives every learner the same gain. Transmit power
    and noise density are in dBm and dBm/Hz here and converted to watts
    at generation time. ``rng_seed`` must fit in 64 bits.
    """

    num_nodes: int
    area_radius_m: float
    pathloss_intercept_db: float
    pathloss_exponent: float
    bandwidth_hz: float
    tx_power_dbm: float
    noise_density_dbm_per_hz: float
    cpu_profiles: tuple[CpuProfile, ...]
    rng_seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "cpu_profiles", tuple(self.cpu_profiles))
        if self.num_nodes < 1:
            raise ValueError(f"num_nodes must be >= 1, got {self.num_nodes}")
        if not self.area_radius_m > 0:
            raise ValueError(f"area_radius_m must be > 0, got {self.area_radius_m}")
        if not self.bandwidth_hz > 0:
            raise ValueError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if not self.cpu_profiles:
            raise ValueError("need at least one cpu profile")
        total = sum(p.fraction for p in self.cpu_profiles)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"cpu profile fractions must sum to 1, got {total}")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed}")


@dataclass(frozen=True)
class Provenance:
    """Where a scenario came from: config digest and the seed that drew it."""

    config_sha256: str
    seed: int


@dataclass(frozen=True)
class Scenario:
    """A resolved deployment. distances_m[k] is node k's distance to the
    orchestrator at the disk center; gains were derived from it."""

    nodes: tuple[EdgeNode, ...]
    link: LinkParams
    task: LearningTask
    cycle: CycleSpec
    distances_m: tuple[float, ...]
    provenance: Provenance

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "distances_m", tuple(self.distances_m))
        if not self.nodes:
            raise ValueError("scenario needs at least one node")
        if len(self.distances_m) != len(self.nodes):
            raise ValueError("distances_m must have one entry per node")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def pathloss_db(config: ScenarioConfig, distance_m: float) -> float:
    """Log-distance path loss at a given separation."""
    if not distance_m > 0:
        raise ValueError(f"distance_m must be > 0, got {distance_m}")
    return (config.pathloss_intercept_db
            + 10.0 * config.pathloss_exponent * math.log10(distance_m))


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 over the canonical JSON encoding of the config."""
    payload = json.dumps(_config_to_dict(config), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def generate_scenario(config: ScenarioConfig, task: LearningTask,
                      cycle: CycleSpec) -> Scenario:
    """Draw one deployment from the config's seed.

    Placement is uniform in the disk: radius = R * sqrt(u) with u drawn
    uniformly from [0, 1), redrawing u = 0 so no node sits on the
    orchestrator. CPU speeds are assigned by profile order, the first
    ceil(K * fraction) slots per profile truncated to K total, then
    shuffled by the same generator. Draw order (all K radii, then the
    shuffle) is fixed, so output is byte-stable for a given seed.
    """
    rng = np.random.default_rng(config.rng_seed)
    kcount = config.num_nodes

    distances = []
    for _ in range(kcount):
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        distances.append(config.area_radius_m * math.sqrt(u))

    slots: list[float] = []
    for profile in config.cpu_profiles:
        slots.extend([profile.cpu_frequency_hz] * math.ceil(kcount * profile.fraction))
    slots = slots[:kcount]
    order = rng.permutation(kcount)
    frequencies = [slots[i] for i in order]

    tx_watts = dbm_to_watts(config.tx_power_dbm)
    nodes = []
    for k in range(kcount):
        gain = 10.0 ** (-pathloss_db(config, distances[k]) / 10.0)
        nodes.append(EdgeNode(id=f"node-{k:02d}", cpu_frequency=frequencies[k],
                              tx_power=tx_watts, channel_gain=gain))
    link = LinkParams(bandwidth=config.bandwidth_hz,
                      noise_density=dbm_to_watts(config.noise_density_dbm_per_hz))
    return Scenario(nodes=tuple(nodes), link=link, task=task, cycle=cycle,
                    distances_m=tuple(distances),
                    provenance=Provenance(config_sha256=config_hash(config),
                                          seed=config.rng_seed))


def mnist_preset(data_precision: int = 8) -> LearningTask:
    """The reference task: 60,000 samples of 784 features, trained by a
    dense [784, 300, 124, 60, 10] network.

    Model size is the sum of consecutive layer products, 280,440
    coefficients at 32-bit precision; per-iteration cost is one forward
    and backward pass, 1,123,736 floating-point operations per sample.
    The parameter matrix does not grow with the batch, so
    per_sample_model_coeffs is 0 and the task only makes sense in
    task-parallel mode. Pixel depth is 8 bits, overridable for
    experiments with float-encoded features.
    """
    return LearningTask(
        features=784,
        data_precision=data_precision,
        model_precision=32,
        per_sample_model_coeffs=0,
        fixed_model_coeffs=280_440,
        model_complexity=1_123_736,
        total_samples=60_000,
    )


def reference_config(num_nodes: int = 20, rng_seed: int = 0) -> ScenarioConfig:
    """Baseline radio environment for simulations and tests.

    Models a mid-size 802.11-class deployment: 5 MHz per node, 23 dBm
    transmitters, thermal noise floor at -174 dBm/Hz, nodes within 50 m,
    log-distance path loss with a 7 dB intercept and exponent 2.1, and a
    fleet split evenly between 2.4 GHz and 700 MHz CPU classes.
    """
    return ScenarioConfig(
        num_nodes=num_nodes,
        area_radius_m=50.0,
        pathloss_intercept_db=7.0,
        pathloss_exponent=2.1,
        bandwidth_hz=5e6,
        tx_power_dbm=23.0,
        noise_density_dbm_per_hz=-174.0,
        cpu_profiles=(CpuProfile(cpu_frequency_hz=2.4e9, fraction=0.5),
                      CpuProfile(cpu_frequency_hz=7e8, fraction=0.5)),
        rng_seed=rng_seed,
    )


def problem_from_scenario(scenario: Scenario) -> ProblemInstance:
    """Collapse a scenario into the coefficient form the solvers take."""
    coeffs = tuple(
        compute_coefficients(scenario.task, node, scenario.link, scenario.cycle.mode)
        for node in scenario.nodes
    )
    return ProblemInstance(coeffs=coeffs, clock=scenario.cycle.clock,
                           total_samples=scenario.task.total_samples)


def _config_to_dict(config: ScenarioConfig) -> dict:
    return {
        "num_nodes": config.num_nodes,
        "area_radius_m": config.area_radius_m,
        "pathloss_intercept_db": config.pathloss_intercept_db,
        "pathloss_exponent": config.pathloss_exponent,
        "bandwidth_hz": config.bandwidth_hz,
        "tx_power_dbm": config.tx_power_dbm,
        "noise_density_dbm_per_hz": config.noise_density_dbm_per_hz,
        "cpu_profiles": [{"cpu_frequency_hz": p.cpu_frequency_hz,
                          "fraction": p.fraction} for p in config.cpu_profiles],
        "rng_seed": config.rng_seed,
    }


def config_from_dict(data: dict) -> ScenarioConfig:
    profiles = tuple(CpuProfile(cpu_frequency_hz=p["cpu_frequency_hz"],
                                fraction=p["fraction"])
                     for p in data["cpu_profiles"])
    return ScenarioConfig(
        num_nodes=data["num_nodes"],
        area_radius_m=data["area_radius_m"],
        pathloss_intercept_db=data["pathloss_intercept_db"],
        pathloss_exponent=data["pathloss_exponent"],
        bandwidth_hz=data["bandwidth_hz"],
        tx_power_dbm=data["tx_power_dbm"],
        noise_density_dbm_per_hz=data["noise_density_dbm_per_hz"],
        cpu_profiles=profiles,
        rng_seed=data["rng_seed"],
    )


def _task_to_dict(task: LearningTask) -> dict:
    return {
        "features": task.features,
        "data_precision_bits": task.data_precision,
        "model_precision_bits": task.model_precision,
        "per_sample_model_coeffs": task.per_sample_model_coeffs,
        "fixed_model_coeffs": task.fixed_model_coeffs,
        "model_complexity_flops": task.model_complexity,
        "total_samples": task.total_samples,
    }


def task_from_dict(data: dict) -> LearningTask:
    return LearningTask(
        features=data["features"],
        data_precision=data["data_precision_bits"],
        model_precision=data["model_precision_bits"],
        per_sample_model_coeffs=data["per_sample_model_coeffs"],
        fixed_model_coeffs=data["fixed_model_coeffs"],
        model_complexity=data["model_complexity_flops"],
        total_samples=data["total_samples"],
    )


def _cycle_to_dict(cycle: CycleSpec) -> dict:
    return {"clock_seconds": cycle.clock, "mode": cycle.mode.value}


def cycle_from_dict(data: dict) -> CycleSpec:
    return CycleSpec(clock=data["clock_seconds"], mode=Mode(data["mode"]))


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "format": SCENARIO_FORMAT,
        "provenance": {
            "config_sha256": scenario.provenance.config_sha256,
            "seed": scenario.provenance.seed,
            "rng": RNG_ALGORITHM,
        },
        "cycle": _cycle_to_dict(scenario.cycle),
        "task": _task_to_dict(scenario.task),
        "link": {
            "bandwidth_hz": scenario.link.bandwidth,
            "noise_density_w_per_hz": scenario.link.noise_density,
        },
        "nodes": [
            {
                "id": node.id,
                "cpu_frequency_hz": node.cpu_frequency,
                "tx_power_w": node.tx_power,
                "channel_gain_linear": node.channel_gain,
                "distance_m": dist,
            }
            for node, dist in zip(scenario.nodes, scenario.distances_m)
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    if data.get("format") != SCENARIO_FORMAT:
        raise ValueError(f"not a {SCENARIO_FORMAT} document: format={data.get('format')!r}")
    rng = data["provenance"].get("rng")
    if rng != RNG_ALGORITHM:
        raise ValueError(f"scenario was drawn with rng {rng!r}, this build expects {RNG_ALGORITHM!r}")
    nodes = tuple(EdgeNode(id=n["id"], cpu_frequency=n["cpu_frequency_hz"],
                           tx_power=n["tx_power_w"], channel_gain=n["channel_gain_linear"])
                  for n in data["nodes"])
    distances = tuple(n["distance_m"] for n in data["nodes"])
    link = LinkParams(bandwidth=data["link"]["bandwidth_hz"],
                      noise_density=data["link"]["noise_density_w_per_hz"])
    return Scenario(
        nodes=nodes,
        link=link,
        task=task_from_dict(data["task"]),
        cycle=cycle_from_dict(data["cycle"]),
        distances_m=distances,
        provenance=Provenance(config_sha256=data["provenance"]["config_sha256"],
                              seed=data["provenance"]["seed"]),
    )


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write the scenario JSON. Output bytes are a pure function of the
    scenario (two-space indent, repr floats, trailing newline)."""
    text = json.dumps(scenario_to_dict(scenario), indent=2) + "\n"
    Path(path).write_text(text, encoding="ascii")


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
