"""Per-learner time model for synchronous edge learning cycles.

One global cycle consists of: the orchestrator sending a data batch and the
current model to each learner, ``tau`` local training iterations at the
learner, and the learner returning its updated model. For learner k with
batch size ``d_k`` the wall-clock cost of that round trip is

    t_k = c2 * tau * d_k + c1 * d_k + c0

where the coefficient triple (c2, c1, c0) collapses the learner's compute
speed and link rate into seconds-per-sample-iteration, seconds-per-sample,
and a constant model-exchange time.

Unit conventions: times in seconds, rates in bits/s, powers in watts,
frequencies in Hz, channel gains linear. dBm/dB inputs are converted at the
config-ingestion boundary (see ``scenarios``), never here.

Everything in this module is an immutable value or a pure function; sharing
across threads needs no coordination.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Mode(enum.Enum):
    """How training data reaches the learners.

    TASK_PARALLEL: the orchestrator ships both the batch and the model each
    cycle. DISTRIBUTED_DATASETS: data already resides at the learners and
    only the model travels, which drops the per-sample data-transfer term
    from the linear coefficient.
    """

    TASK_PARALLEL = "parallel"
    DISTRIBUTED_DATASETS = "distributed"


@dataclass(frozen=True)
class LearningTask:
    """Dataset and ML-model constants shared by all learners.

    Attributes:
        features: number of features per sample.
        data_precision: bits per feature value.
        model_precision: bits per model coefficient.
        per_sample_model_coeffs: model coefficients tied to each batch sample.
        fixed_model_coeffs: model coefficients independent of the batch.
        model_complexity: floating-point operations per sample per local
            iteration.
        total_samples: dataset size d to be split across learners.
    """

    features: int
    data_precision: int
    model_precision: int
    per_sample_model_coeffs: int
    fixed_model_coeffs: int
    model_complexity: float
    total_samples: int

    def __post_init__(self) -> None:
        if self.features < 1:
            raise ValueError(f"features must be >= 1, got {self.features}")
        if self.total_samples < 1:
            raise ValueError(f"total_samples must be >= 1, got {self.total_samples}")
        if self.model_complexity < 1:
            raise ValueError(f"model_complexity must be >= 1, got {self.model_complexity}")
        for name in ("data_precision", "model_precision", "per_sample_model_coeffs",
                     "fixed_model_coeffs"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class EdgeNode:
    """One learner's compute and radio characteristics.

    Attributes:
        id: opaque identifier.
        cpu_frequency: processor speed dedicated to the task, ops/s.
        tx_power: transmit power, watts.
        channel_gain: power gain to the orchestrator, linear scale.
    """

    id: str
    cpu_frequency: float
    tx_power: float
    channel_gain: float

    def __post_init__(self) -> None:
        if not self.cpu_frequency > 0:
            raise ValueError(f"cpu_frequency must be > 0, got {self.cpu_frequency}")
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be > 0, got {self.tx_power}")
        if not self.channel_gain > 0:
            raise ValueError(f"channel_gain must be > 0, got {self.channel_gain}")


@dataclass(frozen=True)
class LinkParams:
    """Wireless parameters shared by all links: bandwidth (Hz) and noise
    power spectral density (W/Hz)."""

    bandwidth: float
    noise_density: float

    def __post_init__(self) -> None:
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.noise_density > 0:
            raise ValueError(f"noise_density must be > 0, got {self.noise_density}")


@dataclass(frozen=True)
class CycleSpec:
    """Global cycle clock T (seconds) and the data-distribution mode."""

    clock: float
    mode: Mode = Mode.TASK_PARALLEL

    def __post_init__(self) -> None:
        if not self.clock > 0:
            raise ValueError(f"clock must be > 0, got {self.clock}")
        if not isinstance(self.mode, Mode):
            raise ValueError(f"mode must be a Mode, got {self.mode!r}")


@dataclass(frozen=True)
class NodeCoefficients:
    """Per-learner cycle-time coefficients.

    c2 is seconds per sample-iteration (compute), c1 seconds per sample
    (batch and per-sample model transfer), c0 seconds of fixed model
    exchange. c1 must be strictly positive: the allocator's bound
    (clock - c0) / (tau * c2 + c1) and its root equation rely on it.
    """

    c2: float
    c1: float
    c0: float

    def __post_init__(self) -> None:
        if not self.c2 > 0:
            raise ValueError(f"c2 must be > 0, got {self.c2}")
        if not self.c1 > 0:
            raise ValueError(f"c1 must be > 0, got {self.c1}")
        if self.c0 < 0:
            raise ValueError(f"c0 must be >= 0, got {self.c0}")


def link_rate(node: EdgeNode, link: LinkParams) -> float:
    """Shannon-capacity link rate between a node and the orchestrator, bits/s.

    Computes W * log2(1 + P * h / (N0 * W)). The SNR denominator is the
    noise POWER over the allotted band, N0 * W, not the bare spectral
    density; see the units note in the module docstring.
    """
    snr = node.tx_power * node.channel_gain / (link.noise_density * link.bandwidth)
    return link.bandwidth * math.log2(1.0 + snr)


def batch_bits(task: LearningTask, batch_size: int) -> int:
    """Bits needed to ship a batch of ``batch_size`` samples."""
    if batch_size < 0:
        raise ValueError(f"batch_size must be >= 0, got {batch_size}")
    return batch_size * task.features * task.data_precision


def model_bits(task: LearningTask, batch_size: int) -> int:
    """Bits of one learner's parameter matrix for a given batch size.

    The batch-independent part is model_precision * fixed_model_coeffs; the
    per-sample part vanishes for models whose size does not grow with the
    batch (per_sample_model_coeffs == 0).
    """
    if batch_size < 0:
        raise ValueError(f"batch_size must be >= 0, got {batch_size}")
    return task.model_precision * (batch_size * task.per_sample_model_coeffs
                                   + task.fixed_model_coeffs)


def compute_coefficients(task: LearningTask, node: EdgeNode, link: LinkParams,
                         mode: Mode = Mode.TASK_PARALLEL) -> NodeCoefficients:
    """Collapse physical parameters into the (c2, c1, c0) triple.

    c2 = model_complexity / cpu_frequency,
    c1 = (features * data_precision + 2 * model_precision * per_sample_model_coeffs) / rate
         in TASK_PARALLEL mode (the per-sample transfer covers the batch
         download plus the model's per-sample growth both ways),
         or (2 * model_precision * per_sample_model_coeffs) / rate in
         DISTRIBUTED_DATASETS mode,
    c0 = 2 * model_precision * fixed_model_coeffs / rate.

    Raises:
        ValueError: if the chosen mode leaves no per-sample transfer cost at
            all (c1 would be 0), e.g. DISTRIBUTED_DATASETS with
            per_sample_model_coeffs == 0. The allocator cannot bound batch
            sizes at tau = 0 without a positive c1.
    """
    rate = link_rate(node, link)
    per_sample_model = 2 * task.model_precision * task.per_sample_model_coeffs
    if mode is Mode.TASK_PARALLEL:
        per_sample_bits = task.features * task.data_precision + per_sample_model
    elif mode is Mode.DISTRIBUTED_DATASETS:
        per_sample_bits = per_sample_model
    else:
        raise ValueError(f"unknown mode: {mode!r}")
    if per_sample_bits == 0:
        raise ValueError(
            f"mode {mode.value!r} with this task yields zero per-sample transfer "
            "cost (c1 == 0); the allocation model requires c1 > 0"
        )
    return NodeCoefficients(
        c2=task.model_complexity / node.cpu_frequency,
        c1=per_sample_bits / rate,
        c0=2 * task.model_precision * task.fixed_model_coeffs / rate,
    )


def cycle_time(coeffs: NodeCoefficients, tau: int, batch_size: int) -> float:
    """Wall-clock seconds one learner needs for a full cycle.

    Equals send time + tau * per-iteration compute time + return time for
    the coefficients' underlying physical parameters.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if batch_size < 0:
        raise ValueError(f"batch_size must be >= 0, got {batch_size}")
    return coeffs.c2 * tau * batch_size + coeffs.c1 * batch_size + coeffs.c0
