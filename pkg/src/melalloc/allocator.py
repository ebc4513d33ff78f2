"""Batch allocation solvers for synchronous edge learning.

Given K learners with cycle-time coefficients (c2, c1, c0), a global clock
T, and d samples to place, find the largest local iteration count tau and
integer batch sizes d_1..d_K with sum d_k = d such that every learner
finishes its cycle within T.

Three schemes are implemented:

* ``solve_analytical``: relax the integers, solve the resulting rational
  root equation for tau, then round down and repair. This is the production
  path.
* ``solve_eta``: split the data as evenly as possible and take whatever tau
  the slowest learner allows. The comparison baseline.
* ``solve_oracle``: exact integer optimum by monotone search over tau.
  Validation only; agrees with ``solve_analytical`` by construction of the
  rounding step (the test suite checks this over thousands of instances).

All functions are pure and all types immutable; instances may be solved
concurrently without coordination.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import NodeCoefficients, cycle_time

_ROOT_REL_TOL = 1e-9      # accept tau when |g(tau) - d| <= this * d
_BRACKET_REL_TOL = 1e-12  # or when the bracket has shrunk to this * (1 + tau)
_TIME_REL_TOL = 1e-9      # slack granted on t_k <= T checks for float roundoff


class Infeasible(Exception):
    """No allocation can place all samples within the clock.

    Raised by the relaxed solver when even tau = 0 cannot fit the data.
    The integer solvers catch it and return a failed Allocation instead,
    since an unservable instance is an answer, not an error.
    """


class Scheme(enum.Enum):
    """Which solver produced an Allocation."""

    ANALYTICAL = "analytical"
    ETA = "eta"
    ORACLE = "oracle"


@dataclass(frozen=True)
class ProblemInstance:
    """One allocation problem: per-learner coefficients, clock, and data size."""

    coeffs: tuple[NodeCoefficients, ...]
    clock: float
    total_samples: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("need at least one learner")
        for entry in self.coeffs:
            if not isinstance(entry, NodeCoefficients):
                raise ValueError(f"coeffs entries must be NodeCoefficients, got {entry!r}")
        if not self.clock > 0:
            raise ValueError(f"clock must be > 0, got {self.clock}")
        if self.total_samples < 1:
            raise ValueError(f"total_samples must be >= 1, got {self.total_samples}")

    @property
    def num_nodes(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class SolverTerms:
    """Per-learner terms of the relaxed problem.

    budgets[k] = (T - c0_k) / c2_k is the sample-iteration headroom the
    clock leaves learner k after the fixed model exchange. overheads[k] =
    c1_k / c2_k converts the per-sample transfer cost into equivalent
    iterations. A learner takes part in allocation only when its budget is
    strictly positive, i.e. T > c0_k; ``active`` holds those indices in
    ascending order.
    """

    budgets: tuple[float, ...]
    overheads: tuple[float, ...]
    active: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.budgets) != len(self.overheads):
            raise ValueError("budgets and overheads must have equal length")
        for k in self.active:
            if not 0 <= k < len(self.budgets):
                raise ValueError(f"active index {k} out of range")
            if not self.budgets[k] > 0:
                raise ValueError(f"active learner {k} has nonpositive budget")
        for b in self.overheads:
            if not b > 0:
                raise ValueError(f"overheads must be > 0, got {b}")


@dataclass(frozen=True)
class RelaxedSolution:
    """Real-valued optimum of the relaxed problem.

    tau_real is the root of the capacity equation, d_real the per-learner
    real batch sizes at that point (capacity bound taken with equality for
    participating learners, 0 for the rest), residual the leftover
    capacity-minus-demand at tau_real.
    """

    tau_real: float
    d_real: tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class Allocation:
    """Integer solver output.

    When feasible: tau >= 1, the batch sizes sum to the instance's
    total_samples, and per_node_time[k] <= clock for every learner that
    was given work. Learners left idle by the analytical and oracle
    schemes exchange nothing, so their recorded time is 0; the even-split
    scheme ships the model to every learner and records c0 for the
    zero-batch ones. When infeasible: tau = 0 and all batch sizes are 0.
    """

    tau: int
    d_int: tuple[int, ...]
    feasible: bool
    scheme: Scheme
    per_node_time: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_int", tuple(self.d_int))
        object.__setattr__(self, "per_node_time", tuple(self.per_node_time))
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if len(self.d_int) != len(self.per_node_time):
            raise ValueError("d_int and per_node_time must have equal length")
        for n in self.d_int:
            if n < 0:
                raise ValueError(f"batch sizes must be >= 0, got {n}")


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint-by-constraint verdict on an Allocation.

    ok is the conjunction; violations carry one human-readable line per
    broken constraint including its margin; flags mark legal-but-degenerate
    cases (currently only "tau_zero").
    """

    ok: bool
    violations: tuple[str, ...]
    flags: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def solver_terms(p: ProblemInstance) -> SolverTerms:
    """Reduce an instance to the budget/overhead form the solvers work in.

    An empty active set is legal output; the integer solvers turn it into
    an infeasible Allocation.
    """
    budgets = []
    overheads = []
    active = []
    for k, c in enumerate(p.coeffs):
        a = (p.clock - c.c0) / c.c2
        budgets.append(a)
        overheads.append(c.c1 / c.c2)
        if a > 0:
            active.append(k)
    return SolverTerms(budgets=tuple(budgets), overheads=tuple(overheads),
                       active=tuple(active))


def relaxed_capacity(terms: SolverTerms, tau: float) -> float:
    """Total real-valued samples schedulable at iteration count tau.

    g(tau) = sum over active learners of budget / (tau + overhead).
    Strictly decreasing in tau, which is what makes the root search below
    and the capacity checks in the integer solvers monotone.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    return sum(terms.budgets[k] / (tau + terms.overheads[k]) for k in terms.active)


def relaxed_tau(terms: SolverTerms, d: int) -> float:
    """Solve g(tau) = d for the unique nonnegative root.

    Bracketed bisection with safeguarded Newton refinement. The returned
    value is the upper end of the final bracket, so it never undershoots
    the true root: flooring it cannot lose an attainable integer tau even
    when the root is exactly an integer.

    Raises:
        Infeasible: the active set is empty or g(0) < d, meaning the data
            cannot fit within the clock at any iteration count.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not terms.active:
        raise Infeasible("no learner has clock headroom for even the model exchange")
    a = [terms.budgets[k] for k in terms.active]
    b = [terms.overheads[k] for k in terms.active]

    def g(tau: float) -> float:
        return sum(ak / (tau + bk) for ak, bk in zip(a, b))

    def g_prime(tau: float) -> float:
        return -sum(ak / (tau + bk) ** 2 for ak, bk in zip(a, b))

    g0 = g(0.0)
    if g0 < d:
        raise Infeasible(
            f"capacity at tau=0 is {g0:.6g} samples, below the {d} required"
        )
    if g0 == d:
        return 0.0

    # g(hi) < d holds for this hi in exact arithmetic; the doubling loop
    # only absorbs float rounding.
    hi = max(a) * len(a) / d
    while g(hi) > d:
        hi *= 2.0
    lo = 0.0
    # invariant from here on: g(lo) >= d >= g(hi), so the root lies in [lo, hi]
    for _ in range(256):
        if hi - lo <= _BRACKET_REL_TOL * (1.0 + hi):
            break
        ghi = g(hi)
        if abs(ghi - d) <= _ROOT_REL_TOL * d:
            break
        slope = g_prime(hi)
        cand = hi - (ghi - d) / slope if slope != 0.0 else None
        if cand is None or not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        if g(cand) >= d:
            lo = cand
            # Newton from the high side lands left of the root on this
            # convex g; one plain bisection step keeps progress guaranteed.
            mid = 0.5 * (lo + hi)
            if g(mid) >= d:
                lo = mid
            else:
                hi = mid
        else:
            hi = cand
    return hi


def polynomial_coefficients(terms: SolverTerms, d: int) -> list[float]:
    """Monomial coefficients (highest degree first) of the cleared-fraction
    form of the capacity equation:

        d * prod_k (tau + b_k)  -  sum_k a_k * prod_{l != k} (tau + b_l)

    over all K learners. The leading coefficient is d. Used only as a
    cross-check on ``relaxed_tau``; the expanded polynomial conditions
    badly for large K, so the rational-form root is authoritative.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    full = np.array([1.0])
    for bk in terms.overheads:
        full = np.convolve(full, [1.0, bk])
    result = d * full
    for k, ak in enumerate(terms.budgets):
        part = np.array([1.0])
        for l, bl in enumerate(terms.overheads):
            if l != k:
                part = np.convolve(part, [1.0, bl])
        result[1:] -= ak * part
    return [float(c) for c in result]


def relaxed_batches(terms: SolverTerms, p: ProblemInstance, tau: float) -> list[float]:
    """Per-learner real batch capacity (T - c0) / (tau * c2 + c1) at tau.

    Participating learners get their capacity bound taken with equality;
    excluded learners get 0. At tau = 0 this is the pure
    communication-limited capacity.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    active = set(terms.active)
    out = []
    for k, c in enumerate(p.coeffs):
        if k in active:
            out.append((p.clock - c.c0) / (tau * c.c2 + c.c1))
        else:
            out.append(0.0)
    return out


def solve_relaxed(p: ProblemInstance) -> RelaxedSolution:
    """Real-valued optimum: root of the capacity equation plus the batch
    sizes it implies.

    Raises:
        Infeasible: propagated from ``relaxed_tau``.
    """
    terms = solver_terms(p)
    tau = relaxed_tau(terms, p.total_samples)
    batches = relaxed_batches(terms, p, tau)
    residual = relaxed_capacity(terms, tau) - p.total_samples
    return RelaxedSolution(tau_real=tau, d_real=tuple(batches), residual=residual)


def _integer_caps(terms: SolverTerms, p: ProblemInstance, tau: int) -> list[int]:
    return [math.floor(x) for x in relaxed_batches(terms, p, float(tau))]


def _infeasible(p: ProblemInstance, scheme: Scheme) -> Allocation:
    return Allocation(tau=0, d_int=(0,) * p.num_nodes, feasible=False,
                      scheme=scheme, per_node_time=(0.0,) * p.num_nodes)


def _water_fill(p: ProblemInstance, tau: int, caps: list[int],
                scheme: Scheme) -> Allocation:
    """Deterministic integer split of the data under per-learner caps.

    Proportional floor first, then the remainder one sample at a time to
    the learner with the most clock slack left, lowest index on ties.
    Caller guarantees sum(caps) >= total_samples.
    """
    d = p.total_samples
    total_cap = sum(caps)
    counts = [min(cap, d * cap // total_cap) for cap in caps]
    assigned = sum(counts)
    while assigned < d:
        best = -1
        best_slack = -math.inf
        for k, cap in enumerate(caps):
            if counts[k] >= cap:
                continue
            slack = p.clock - cycle_time(p.coeffs[k], tau, counts[k] + 1)
            if slack > best_slack:
                best, best_slack = k, slack
        counts[best] += 1
        assigned += 1
    times = [cycle_time(c, tau, n) if n > 0 else 0.0
             for c, n in zip(p.coeffs, counts)]
    return Allocation(tau=tau, d_int=tuple(counts), feasible=True,
                      scheme=scheme, per_node_time=tuple(times))


def solve_analytical(p: ProblemInstance) -> Allocation:
    """Production solver: relax, solve the root equation, floor, repair.

    Pipeline: compute solver terms; find the real root tau*; floor it;
    compute integer per-learner caps at that tau; while the caps cannot
    absorb the data, step tau down by one; finally water-fill the batches.
    Stepping below tau = 1 means the instance only fits with zero
    iterations, which counts as infeasible.
    """
    terms = solver_terms(p)
    try:
        tau_real = relaxed_tau(terms, p.total_samples)
    except Infeasible:
        return _infeasible(p, Scheme.ANALYTICAL)
    tau = math.floor(tau_real)
    while tau >= 1:
        caps = _integer_caps(terms, p, tau)
        if sum(caps) >= p.total_samples:
            return _water_fill(p, tau, caps, Scheme.ANALYTICAL)
        tau -= 1
    return _infeasible(p, Scheme.ANALYTICAL)


def solve_eta(p: ProblemInstance) -> Allocation:
    """Even-split baseline.

    Every learner gets floor(d/K) samples, the first d mod K learners one
    more. tau is the largest iteration count the slowest loaded learner
    still finishes within the clock; the scheme ships the model to every
    learner, so even zero-batch learners must fit their model exchange.
    """
    kcount = p.num_nodes
    d = p.total_samples
    base, extra = divmod(d, kcount)
    counts = [base + 1 if k < extra else base for k in range(kcount)]
    tau_limits = []
    exchange_ok = True
    for c, n in zip(p.coeffs, counts):
        if n == 0:
            if c.c0 > p.clock:
                exchange_ok = False
            continue
        tau_limits.append(math.floor((p.clock - c.c0 - c.c1 * n) / (c.c2 * n)))
    tau = max(0, min(tau_limits))
    if tau < 1 or not exchange_ok:
        return _infeasible(p, Scheme.ETA)
    times = [cycle_time(c, tau, n) for c, n in zip(p.coeffs, counts)]
    return Allocation(tau=tau, d_int=tuple(counts), feasible=True,
                      scheme=Scheme.ETA, per_node_time=tuple(times))


def solve_oracle(p: ProblemInstance) -> Allocation:
    """Exact integer optimum, for validating the analytical solver.

    At fixed tau the constraints separate per learner, so integer
    feasibility is just sum of floor caps >= d, and that predicate is
    nonincreasing in tau. Binary search on tau over [1, hi] where hi is
    the largest tau at which any single learner can still process one
    sample; that bound is independent of the relaxed solution on purpose.
    """
    terms = solver_terms(p)
    if not terms.active:
        return _infeasible(p, Scheme.ORACLE)
    hi = 0
    for k in terms.active:
        c = p.coeffs[k]
        hi = max(hi, math.floor((p.clock - c.c0 - c.c1) / c.c2))
    if hi < 1:
        return _infeasible(p, Scheme.ORACLE)

    def fits(tau: int) -> bool:
        return sum(_integer_caps(terms, p, tau)) >= p.total_samples

    if not fits(1):
        return _infeasible(p, Scheme.ORACLE)
    lo = 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid - 1
    return _water_fill(p, lo, _integer_caps(terms, p, lo), Scheme.ORACLE)


def check_feasible(p: ProblemInstance, alloc: Allocation) -> FeasibilityReport:
    """Re-derive constraint satisfaction from the numbers alone.

    Checks sample conservation, nonnegativity, tau >= 0, and the per-node
    clock constraint. Times for loaded learners are recomputed from the
    coefficients; idle learners keep their recorded time, since whether an
    idle learner exchanges the model is the scheme's convention, not the
    instance's. Clock comparisons grant 1e-9 relative slack to absorb
    float roundoff in the capacity floors.

    tau = 0 with all samples placed is consistent but useless for
    learning; it passes with the "tau_zero" flag rather than failing.
    """
    if len(alloc.d_int) != p.num_nodes:
        raise ValueError(
            f"allocation has {len(alloc.d_int)} entries for {p.num_nodes} learners"
        )
    violations = []
    flags = []
    placed = sum(alloc.d_int)
    if placed != p.total_samples:
        violations.append(
            f"sample_conservation: placed {placed} of {p.total_samples} "
            f"(margin {placed - p.total_samples:+d})"
        )
    for k, n in enumerate(alloc.d_int):
        if n < 0:
            violations.append(f"nonnegative_batch[{k}]: {n} < 0")
    if alloc.tau < 0:
        violations.append(f"nonnegative_tau: {alloc.tau} < 0")
    limit = p.clock * (1.0 + _TIME_REL_TOL)
    for k, (c, n) in enumerate(zip(p.coeffs, alloc.d_int)):
        t = cycle_time(c, alloc.tau, n) if n > 0 else alloc.per_node_time[k]
        if t > limit:
            violations.append(
                f"time_budget[{k}]: {t:.9g} s exceeds clock {p.clock:.9g} s "
                f"by {t - p.clock:.3g} s"
            )
    if alloc.tau == 0 and placed == p.total_samples:
        flags.append("tau_zero")
    return FeasibilityReport(ok=not violations, violations=tuple(violations),
                             flags=tuple(flags))
