"""Unit tests for the allocation solvers.

Golden values come from instances small enough to work through by hand;
the property loops use seeded generators so failures reproduce.
"""

import math

import numpy as np
import pytest

from melalloc import (Allocation, Infeasible, NodeCoefficients,
                      ProblemInstance, Scheme, SolverTerms, check_feasible,
                      cycle_time, polynomial_coefficients, relaxed_batches,
                      relaxed_capacity, relaxed_tau, solve_analytical,
                      solve_eta, solve_oracle, solve_relaxed, solver_terms)


def inst(coeffs, clock, d):
    return ProblemInstance(coeffs=tuple(NodeCoefficients(*c) for c in coeffs),
                           clock=clock, total_samples=d)


# the heterogeneous two-learner instance used throughout: the second
# learner computes at half speed, transfer cost is a vanishing epsilon
# (1e-16 keeps 12/(4 + c1) on the integer side of the floor)
HET = inst([(1.0, 1e-16, 0.0), (2.0, 1e-16, 0.0)], clock=12.0, d=4)


def test_solver_terms_golden():
    terms = solver_terms(inst([(1.0, 1.0, 0.0)], clock=10.0, d=2))
    assert terms.budgets == (10.0,)
    assert terms.overheads == (1.0,)
    assert terms.active == (0,)


def test_solver_terms_excludes_node_without_headroom():
    # model exchange alone exceeds the clock: a < 0, node sidelined
    terms = solver_terms(inst([(1.0, 1.0, 12.0), (2.0, 0.5, 1.0)], clock=10.0, d=5))
    assert terms.budgets[0] < 0
    assert terms.active == (1,)
    assert terms.budgets[1] == pytest.approx(4.5)
    assert terms.overheads[1] == pytest.approx(0.25)


def test_solver_terms_fractional_golden():
    terms = solver_terms(inst([(2.0, 0.5, 1.0)], clock=13.0, d=1))
    assert terms.budgets == (6.0,)
    assert terms.overheads == (0.25,)


def test_solver_terms_empty_active_is_legal():
    terms = solver_terms(inst([(1.0, 1.0, 9.0)], clock=5.0, d=1))
    assert terms.active == ()


def test_relaxed_tau_single_node():
    terms = solver_terms(inst([(1.0, 1.0, 0.0)], clock=10.0, d=2))
    tau = relaxed_tau(terms, 2)
    # 10/(tau+1) = 2 has the exact integer root 4; the search must land
    # on or above it so flooring cannot lose the attainable tau
    assert tau == pytest.approx(4.0, rel=1e-9)
    assert math.floor(tau) == 4


def test_relaxed_tau_equal_overheads():
    terms = SolverTerms(budgets=(12.0, 6.0), overheads=(1.0, 1.0), active=(0, 1))
    assert relaxed_tau(terms, 4) == pytest.approx(3.5, rel=1e-9)


def test_relaxed_tau_infeasible_when_zero_iter_capacity_short():
    # g(0) = a/b = 3 < 4: not even tau = 0 fits the data
    terms = solver_terms(inst([(1.0, 1.0, 1.0)], clock=4.0, d=4))
    assert relaxed_capacity(terms, 0.0) == pytest.approx(3.0)
    with pytest.raises(Infeasible):
        relaxed_tau(terms, 4)


def test_relaxed_tau_infeasible_on_empty_active_set():
    terms = solver_terms(inst([(1.0, 1.0, 9.0)], clock=5.0, d=1))
    with pytest.raises(Infeasible):
        relaxed_tau(terms, 1)


def test_relaxed_tau_residual_within_tolerance():
    rng = np.random.default_rng(7)
    for _ in range(100):
        k = int(rng.integers(1, 15))
        budgets = tuple(float(b) for b in 10.0 ** rng.uniform(0, 5, size=k))
        overheads = tuple(float(b) for b in 10.0 ** rng.uniform(-2, 1, size=k))
        terms = SolverTerms(budgets=budgets, overheads=overheads,
                            active=tuple(range(k)))
        d = max(1, int(relaxed_capacity(terms, 0.0) * rng.uniform(0.05, 0.8)))
        tau = relaxed_tau(terms, d)
        assert abs(relaxed_capacity(terms, tau) - d) <= 1e-9 * d


def test_solve_relaxed_golden():
    # 12/(tau+1) + 6/(tau+1) = 4 at tau = 3.5; batch bounds 8/3 and 4/3
    p = inst([(1.0, 1.0, 0.0), (2.0, 2.0, 0.0)], clock=12.0, d=4)
    sol = solve_relaxed(p)
    assert sol.tau_real == pytest.approx(3.5, rel=1e-9)
    assert sol.d_real[0] == pytest.approx(8 / 3, rel=1e-8)
    assert sol.d_real[1] == pytest.approx(4 / 3, rel=1e-8)
    assert sum(sol.d_real) == pytest.approx(4.0, abs=1e-9 * 4)
    assert abs(sol.residual) <= 1e-9 * 4


def test_polynomial_single_node():
    terms = SolverTerms(budgets=(10.0,), overheads=(1.0,), active=(0,))
    assert polynomial_coefficients(terms, 2) == [2.0, -8.0]


def test_polynomial_two_nodes_golden():
    terms = SolverTerms(budgets=(12.0, 6.0), overheads=(1.0, 1.0), active=(0, 1))
    coeffs = polynomial_coefficients(terms, 4)
    assert coeffs == [4.0, -10.0, -14.0]
    roots = sorted(np.roots(coeffs))
    assert roots[0] == pytest.approx(-1.0)
    assert roots[1] == pytest.approx(3.5)


def test_polynomial_all_zero_budgets_has_no_nonnegative_root():
    terms = SolverTerms(budgets=(0.0, 0.0), overheads=(1.0, 2.0), active=())
    coeffs = polynomial_coefficients(terms, 3)
    # 3(tau+1)(tau+2): poles of the original fraction, all negative
    assert coeffs == [3.0, 9.0, 6.0]
    assert all(r < 0 for r in np.roots(coeffs))


def test_polynomial_leading_coefficient_is_d():
    terms = SolverTerms(budgets=(5.0, 2.0, 0.5), overheads=(0.1, 0.2, 0.3),
                        active=(0, 1, 2))
    assert polynomial_coefficients(terms, 7)[0] == 7.0


def test_relaxed_batches():
    p = inst([(1.0, 1.0, 0.0), (1.0, 2.0, 11.0)], clock=10.0, d=2)
    terms = solver_terms(p)
    assert terms.active == (0,)
    batches = relaxed_batches(terms, p, 4.0)
    assert batches[0] == pytest.approx(2.0)
    assert batches[1] == 0.0
    # tau = 0 gives the pure communication-limited capacity
    assert relaxed_batches(terms, p, 0.0)[0] == pytest.approx(10.0)


def test_analytical_single_node_golden():
    alloc = solve_analytical(inst([(1.0, 1.0, 0.0)], clock=10.0, d=2))
    assert alloc.feasible
    assert alloc.tau == 4
    assert alloc.d_int == (2,)
    assert alloc.scheme is Scheme.ANALYTICAL
    assert alloc.per_node_time == (10.0,)


def test_analytical_homogeneous_pair_golden():
    alloc = solve_analytical(inst([(1.0, 1.0, 0.0)] * 2, clock=13.0, d=4))
    assert alloc.feasible
    assert alloc.tau == 5
    assert alloc.d_int == (2, 2)


def test_analytical_heterogeneous_pair_golden():
    alloc = solve_analytical(HET)
    assert alloc.feasible
    assert alloc.tau == 4
    assert alloc.d_int == (3, 1)
    assert all(t <= 12.0 for t in alloc.per_node_time)


def test_heterogeneous_pair_with_literal_epsilon():
    # with c1 = 1e-9 the capacity 12/(4 + 1e-9) lands just below 3, so
    # the floors drop the whole solution one notch: tau 3, not 4
    p = inst([(1.0, 1e-9, 0.0), (2.0, 1e-9, 0.0)], clock=12.0, d=4)
    a = solve_analytical(p)
    assert (a.tau, a.d_int) == (3, (3, 1))
    assert solve_oracle(p).tau == 3
    assert solve_eta(p).tau == 2


def test_analytical_decrement_repairs_overshoot():
    # relaxed root 17/3 floors to 5 where integer caps only fit 2 of 3
    # samples; one decrement lands on the true optimum tau = 4
    p = inst([(1.0, 1.0, 0.0)] * 2, clock=10.0, d=3)
    assert solve_relaxed(p).tau_real == pytest.approx(17 / 3, rel=1e-9)
    alloc = solve_analytical(p)
    assert alloc.tau == 4
    assert alloc.d_int == (2, 1)  # tie on slack broken toward index 0
    assert solve_oracle(p).tau == 4


def test_analytical_infeasible_returns_zero_allocation():
    alloc = solve_analytical(inst([(1.0, 1.0, 1.0)], clock=4.0, d=4))
    assert not alloc.feasible
    assert alloc.tau == 0
    assert alloc.d_int == (0,)


def test_analytical_excludes_dead_node_but_still_solves():
    p = inst([(1.0, 1.0, 0.0), (1.0, 1.0, 50.0)], clock=10.0, d=2)
    alloc = solve_analytical(p)
    assert alloc.feasible
    assert alloc.d_int == (2, 0)
    assert alloc.per_node_time[1] == 0.0  # idle node exchanges nothing
    assert check_feasible(p, alloc).ok


def test_analytical_tau_zero_case_is_infeasible():
    # data fits at tau = 0 but not tau = 1: reported infeasible
    p = inst([(10.0, 1.0, 0.0)], clock=10.0, d=8)
    with_relax = solve_relaxed(p)
    assert 0 < with_relax.tau_real < 1
    alloc = solve_analytical(p)
    assert not alloc.feasible and alloc.tau == 0


def test_eta_heterogeneous_golden():
    alloc = solve_eta(HET)
    assert alloc.feasible
    assert alloc.tau == 3
    assert alloc.d_int == (2, 2)
    assert alloc.scheme is Scheme.ETA


def test_eta_matches_analytical_on_identical_nodes():
    p = inst([(1.0, 1.0, 0.0)] * 2, clock=13.0, d=4)
    assert solve_eta(p).tau == solve_analytical(p).tau == 5


def test_eta_remainder_goes_to_lowest_indices():
    p = inst([(0.01, 0.01, 0.0)] * 3, clock=50.0, d=7)
    assert solve_eta(p).d_int == (3, 2, 2)


def test_eta_infeasible_when_any_node_cannot_exchange():
    # third learner gets no samples under the even split but still has
    # to receive and return the model, which alone overruns the clock
    p = inst([(1.0, 1.0, 0.0), (1.0, 1.0, 0.0), (1.0, 1.0, 60.0)],
             clock=50.0, d=2)
    alloc = solve_eta(p)
    assert not alloc.feasible and alloc.tau == 0


def test_eta_zero_batch_node_with_headroom_is_fine():
    p = inst([(1.0, 1.0, 0.0), (1.0, 1.0, 0.0), (1.0, 1.0, 40.0)],
             clock=50.0, d=2)
    alloc = solve_eta(p)
    assert alloc.feasible
    assert alloc.d_int == (1, 1, 0)
    assert alloc.per_node_time[2] == 40.0  # ETA still ships the model


def test_eta_infeasible_when_slowest_node_cannot_iterate():
    p = inst([(1.0, 1.0, 0.0), (60.0, 1.0, 0.0)], clock=50.0, d=4)
    assert not solve_eta(p).feasible


def test_oracle_goldens():
    assert solve_oracle(inst([(1.0, 1.0, 0.0)], clock=10.0, d=2)).tau == 4
    het = solve_oracle(HET)
    assert (het.tau, het.d_int) == (4, (3, 1))
    assert het.scheme is Scheme.ORACLE
    assert not solve_oracle(inst([(1.0, 1.0, 1.0)], clock=4.0, d=4)).feasible


def test_oracle_against_exhaustive_scan():
    # independent mini-oracle: try every tau and count capacity by
    # direct inequality, no division
    def brute(p):
        best = 0
        for tau in range(1, 200):
            total = 0
            for c in p.coeffs:
                n = 0
                while cycle_time(c, tau, n + 1) <= p.clock:
                    n += 1
                total += n
            if total >= p.total_samples:
                best = tau
        return best

    rng = np.random.default_rng(11)
    for _ in range(20):
        k = int(rng.integers(1, 4))
        coeffs = [(float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.05, 1.0)),
                   float(rng.uniform(0.0, 3.0))) for _ in range(k)]
        p = inst(coeffs, clock=float(rng.uniform(5.0, 40.0)),
                 d=int(rng.integers(1, 12)))
        expected = brute(p)
        got = solve_oracle(p)
        if expected == 0:
            assert not got.feasible
        else:
            assert got.feasible and got.tau == expected


def test_sandwich_and_dominance_on_random_instances():
    rng = np.random.default_rng(23)
    feasible_seen = infeasible_seen = 0
    for _ in range(200):
        k = int(rng.integers(1, 21))
        coeffs = [(float(10.0 ** rng.uniform(-4, 0)),
                   float(10.0 ** rng.uniform(-5, -1)),
                   float(10.0 ** rng.uniform(-3, 1))) for _ in range(k)]
        d = int(rng.integers(1, 50000))
        p = inst(coeffs, clock=float(rng.uniform(0.5, 40.0)), d=d)
        a, o, e = solve_analytical(p), solve_oracle(p), solve_eta(p)
        assert a.feasible == o.feasible
        if a.feasible:
            feasible_seen += 1
            assert a.tau == o.tau
            assert sum(a.d_int) == d
            assert sum(o.d_int) == d
            if e.feasible:
                assert a.tau >= e.tau
        else:
            infeasible_seen += 1
    # the draw must exercise both branches to mean anything
    assert feasible_seen > 20 and infeasible_seen > 20


def test_water_fill_respects_caps_and_determinism():
    p = inst([(1.0, 0.5, 0.0), (2.0, 0.5, 0.0), (4.0, 0.5, 0.0)],
             clock=30.0, d=17)
    first = solve_analytical(p)
    second = solve_analytical(p)
    assert first == second
    terms = solver_terms(p)
    caps = [math.floor(x) for x in relaxed_batches(terms, p, float(first.tau))]
    assert all(n <= cap for n, cap in zip(first.d_int, caps))


def test_oracle_monotone_in_clock_and_data():
    coeffs = [(0.5, 0.1, 0.2), (1.0, 0.2, 0.1)]
    taus = [solve_oracle(inst(coeffs, clock=t, d=10)).tau
            for t in (5.0, 10.0, 20.0, 40.0, 80.0)]
    assert taus == sorted(taus)
    taus_d = [solve_oracle(inst(coeffs, clock=40.0, d=d)).tau
              for d in (2, 5, 10, 20, 40)]
    assert taus_d == sorted(taus_d, reverse=True)


def test_check_feasible_flags_overload():
    bad = Allocation(tau=4, d_int=(4, 0), feasible=True,
                     scheme=Scheme.ANALYTICAL, per_node_time=(16.0, 0.0))
    report = check_feasible(HET, bad)
    assert not report.ok
    assert any("time_budget[0]" in v for v in report.violations)


def test_check_feasible_accepts_solver_output():
    report = check_feasible(HET, solve_analytical(HET))
    assert report.ok and not report.violations and not report.flags
    assert bool(report)


def test_check_feasible_tau_zero_flag():
    p = inst([(1.0, 1.0, 1.0)], clock=6.0, d=4)
    degenerate = Allocation(tau=0, d_int=(4,), feasible=False,
                            scheme=Scheme.ANALYTICAL, per_node_time=(5.0,))
    report = check_feasible(p, degenerate)
    assert report.ok
    assert report.flags == ("tau_zero",)


def test_check_feasible_conservation_violation():
    p = inst([(1.0, 1.0, 0.0)], clock=10.0, d=2)
    short = Allocation(tau=1, d_int=(1,), feasible=True,
                       scheme=Scheme.ANALYTICAL, per_node_time=(2.0,))
    report = check_feasible(p, short)
    assert not report.ok
    assert any("sample_conservation" in v for v in report.violations)


def test_check_feasible_dimension_mismatch():
    with pytest.raises(ValueError):
        check_feasible(HET, Allocation(tau=1, d_int=(4,), feasible=True,
                                       scheme=Scheme.ETA, per_node_time=(1.0,)))


def test_problem_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance(coeffs=(), clock=10.0, total_samples=1)
    with pytest.raises(ValueError):
        inst([(1.0, 1.0, 0.0)], clock=0.0, d=1)
    with pytest.raises(ValueError):
        inst([(1.0, 1.0, 0.0)], clock=1.0, d=0)
    with pytest.raises(ValueError):
        ProblemInstance(coeffs=((1.0, 1.0, 0.0),), clock=1.0, total_samples=1)


def test_solver_terms_validation():
    with pytest.raises(ValueError):
        SolverTerms(budgets=(1.0,), overheads=(1.0, 2.0), active=(0,))
    with pytest.raises(ValueError):
        SolverTerms(budgets=(-1.0,), overheads=(1.0,), active=(0,))
    with pytest.raises(ValueError):
        SolverTerms(budgets=(1.0,), overheads=(0.0,), active=(0,))
    with pytest.raises(ValueError):
        SolverTerms(budgets=(1.0,), overheads=(1.0,), active=(3,))


def test_allocation_validation():
    with pytest.raises(ValueError):
        Allocation(tau=-1, d_int=(1,), feasible=True, scheme=Scheme.ETA,
                   per_node_time=(1.0,))
    with pytest.raises(ValueError):
        Allocation(tau=1, d_int=(-1,), feasible=True, scheme=Scheme.ETA,
                   per_node_time=(1.0,))
    with pytest.raises(ValueError):
        Allocation(tau=1, d_int=(1, 2), feasible=True, scheme=Scheme.ETA,
                   per_node_time=(1.0,))
