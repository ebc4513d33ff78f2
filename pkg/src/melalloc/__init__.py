"""Adaptive batch allocation for mobile edge learning.

An orchestrator splits a training dataset across wireless edge learners
with heterogeneous compute and link capacities, choosing integer batch
sizes and the number of local iterations per global cycle so every
learner finishes within a shared clock and the iteration count is
maximal. This package provides the time model, the analytical solver
with its exact-oracle and even-split baselines, seeded random scenario
generation, an experiment harness, and a scikit-learn style wrapper.
"""

from .allocator import (Allocation, FeasibilityReport, Infeasible,
                        ProblemInstance, RelaxedSolution, Scheme, SolverTerms,
                        check_feasible, polynomial_coefficients,
                        relaxed_batches, relaxed_capacity, relaxed_tau,
                        solve_analytical, solve_eta, solve_oracle,
                        solve_relaxed, solver_terms)
from .estimator import BatchAllocator
from .harness import (ResultRecord, SummaryRow, SweepSpec, SweepVariable,
                      load_sweep_spec, mix_seed, run_sweep, run_sweep_to_dir,
                      summarize, write_records_csv, write_summary_csv)
from .model import (CycleSpec, EdgeNode, LearningTask, LinkParams, Mode,
                    NodeCoefficients, batch_bits, compute_coefficients,
                    cycle_time, link_rate, model_bits)
from .scenarios import (CpuProfile, Provenance, Scenario, ScenarioConfig,
                        config_hash, dbm_to_watts, generate_scenario,
                        load_scenario, mnist_preset, pathloss_db,
                        problem_from_scenario, reference_config,
                        save_scenario)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BatchAllocator",
    "CpuProfile",
    "CycleSpec",
    "EdgeNode",
    "FeasibilityReport",
    "Infeasible",
    "LearningTask",
    "LinkParams",
    "Mode",
    "NodeCoefficients",
    "ProblemInstance",
    "Provenance",
    "RelaxedSolution",
    "ResultRecord",
    "Scenario",
    "ScenarioConfig",
    "Scheme",
    "SolverTerms",
    "SummaryRow",
    "SweepSpec",
    "SweepVariable",
    "batch_bits",
    "check_feasible",
    "compute_coefficients",
    "config_hash",
    "cycle_time",
    "dbm_to_watts",
    "generate_scenario",
    "link_rate",
    "load_scenario",
    "load_sweep_spec",
    "mix_seed",
    "mnist_preset",
    "model_bits",
    "pathloss_db",
    "polynomial_coefficients",
    "problem_from_scenario",
    "reference_config",
    "relaxed_batches",
    "relaxed_capacity",
    "relaxed_tau",
    "run_sweep",
    "run_sweep_to_dir",
    "save_scenario",
    "solve_analytical",
    "solve_eta",
    "solve_oracle",
    "solve_relaxed",
    "solver_terms",
    "summarize",
    "write_records_csv",
    "write_summary_csv",
]
