import numpy as np
import pytest
from scipy.optimize import linprog

from vcoop.constants import OracleSuite
from vcoop.optimizer import (
    DenseSimplex,
    Schedule,
    SimplexStatus,
    build_cycle_lp,
    check_schedule,
    max_cycle_delivery,
    run_oracle_suite,
    schedule_theorem1,
    schedule_theorem2,
    solve_cycle_lp,
    transitional_cycle_bounds,
)
from vcoop.scenario import REFERENCE_SCENARIO, HelperConfig, RegimeError, validate_scenario


WRONG_OPTIMUM = "Optimum differs from the reference solver!"
INFEASIBLE = "Schedule violates the cycle constraints!"
SANDWICH_VIOLATED = "LP optimum is outside the transitional bounds!"


def _scenario(w_i_mbps):
    return validate_scenario({**REFERENCE_SCENARIO, "wI_mbps": w_i_mbps})


def _random_configs(count, n_max=8, seed=0, rho2=0.005):
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        configs.append(HelperConfig.from_gaps(rng.exponential(1 / rho2, size=n - 1)))
    return configs


def test_dense_simplex_textbook_problem():
    result = DenseSimplex([3.0, 5.0], [[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]], [4.0, 12.0, 18.0]).solve()
    assert result.status == SimplexStatus.OPTIMAL
    assert result.objective == pytest.approx(36.0)
    assert result.x == pytest.approx([2.0, 6.0])


def test_dense_simplex_unbounded():
    result = DenseSimplex([1.0], [[-1.0]], [1.0]).solve()
    assert result.status == SimplexStatus.UNBOUNDED


def test_dense_simplex_rejects_negative_rhs():
    with pytest.raises(ValueError):
        DenseSimplex([1.0], [[1.0]], [-1.0])


def test_lp_shape():
    lp = build_cycle_lp(HelperConfig.from_gaps([100.0, 200.0, 300.0, 400.0]), _scenario(2.0))
    assert lp.num_vars == 10
    assert lp.num_constraints == 3 * 5 + 2 * 15


def test_empty_cycle():
    cfg = HelperConfig(n=0)
    s = _scenario(2.0)
    lp = build_cycle_lp(cfg, s)
    assert lp.num_constraints == 0
    assert solve_cycle_lp(lp).total_delivered == 0.0
    assert max_cycle_delivery(cfg, s) == 0.0
    assert transitional_cycle_bounds(cfg, s).upper == 0.0


def test_two_helper_transitional_cycle():
    cfg = HelperConfig.from_gaps([300.0])
    s = _scenario(2.0)
    bounds = transitional_cycle_bounds(cfg, s)
    assert bounds.lower == pytest.approx(8.65e7)
    assert bounds.upper == pytest.approx(1.0e8)
    assert solve_cycle_lp(build_cycle_lp(cfg, s)).total_delivered == pytest.approx(1.0e8)
    assert max_cycle_delivery(cfg, s) == pytest.approx(1.0e8)


@pytest.mark.parametrize("w_i_mbps", [1.0, 2.0, 6.0])
def test_dense_simplex_matches_linprog(w_i_mbps):
    s = _scenario(w_i_mbps)
    for cfg in _random_configs(20, seed=int(w_i_mbps * 10)):
        lp = build_cycle_lp(cfg, s)
        reference = linprog(-lp.objective, A_ub=lp.A_ub, b_ub=lp.b_ub, bounds=(0, None), method="highs")
        assert reference.status == 0
        assert solve_cycle_lp(lp).total_delivered == pytest.approx(-reference.fun, rel=1e-6), WRONG_OPTIMUM


@pytest.mark.parametrize("w_i_mbps", [0.5, 1.0, 1.8, 2.0, 3.0, 6.0])
def test_cut_solver_matches_dense_simplex(w_i_mbps):
    s = _scenario(w_i_mbps)
    for cfg in _random_configs(30, n_max=10, seed=int(w_i_mbps * 100)):
        optimum = solve_cycle_lp(build_cycle_lp(cfg, s)).total_delivered
        assert max_cycle_delivery(cfg, s) == pytest.approx(optimum, rel=1e-8), WRONG_OPTIMUM


def test_closed_form_schedules_are_optimal_and_feasible():
    for w_i_mbps, closed_form in ((1.0, schedule_theorem1), (6.0, schedule_theorem2)):
        s = _scenario(w_i_mbps)
        for cfg in _random_configs(30, seed=1):
            schedule = closed_form(cfg, s)
            assert not check_schedule(schedule, cfg, s), INFEASIBLE
            optimum = solve_cycle_lp(build_cycle_lp(cfg, s)).total_delivered
            assert schedule.total_delivered == pytest.approx(optimum, rel=1e-9), WRONG_OPTIMUM


def test_transitional_sandwich():
    s = _scenario(2.0)
    for cfg in _random_configs(30, seed=2):
        bounds = transitional_cycle_bounds(cfg, s)
        optimum = max_cycle_delivery(cfg, s)
        assert not check_schedule(bounds.schedule_for_lower, cfg, s), INFEASIBLE
        assert bounds.lower <= optimum * (1 + 1e-9), SANDWICH_VIOLATED
        assert optimum <= bounds.upper * (1 + 1e-9), SANDWICH_VIOLATED


@pytest.mark.parametrize("scale", [0.5, 3.0])
@pytest.mark.parametrize("w_i_mbps", [1.0, 2.0, 6.0])
def test_cycle_totals_scale_with_the_rates(scale, w_i_mbps):
    s = _scenario(w_i_mbps)
    scaled = s.replace(w_I=scale * s.w_I, w_V=scale * s.w_V)
    for cfg in _random_configs(10, seed=3):
        assert max_cycle_delivery(cfg, scaled) == pytest.approx(scale * max_cycle_delivery(cfg, s), rel=1e-9)
        if w_i_mbps == 2.0:
            bounds, scaled_bounds = transitional_cycle_bounds(cfg, s), transitional_cycle_bounds(cfg, scaled)
            assert scaled_bounds.lower == pytest.approx(scale * bounds.lower, rel=1e-9)
            assert scaled_bounds.upper == pytest.approx(scale * bounds.upper, rel=1e-9)
        else:
            closed_form = schedule_theorem1 if w_i_mbps == 1.0 else schedule_theorem2
            total = closed_form(cfg, s).total_delivered
            assert closed_form(cfg, scaled).total_delivered == pytest.approx(scale * total, rel=1e-9)


def test_check_schedule_reports_violations():
    cfg = HelperConfig.from_gaps([100.0, 2000.0])
    s = _scenario(1.0)
    schedule = schedule_theorem1(cfg, s)
    inflated = Schedule(schedule.d_alloc * 1.1, schedule.y_alloc * 1.1)
    assert check_schedule(inflated, cfg, s)
    assert check_schedule(Schedule([1.0], [1.0]), cfg, s) == ["schedule has 1 helpers but the configuration has 3"]


def test_schedules_check_their_regime():
    cfg = HelperConfig.from_gaps([100.0])
    with pytest.raises(RegimeError):
        schedule_theorem1(cfg, _scenario(2.0))
    with pytest.raises(RegimeError):
        schedule_theorem2(cfg, _scenario(1.0))
    with pytest.raises(RegimeError):
        transitional_cycle_bounds(cfg, _scenario(6.0))


@pytest.mark.parametrize("suite", [OracleSuite.INFRA, OracleSuite.V2V, OracleSuite.TRANSITIONAL])
def test_oracle_suites_pass(suite):
    reports = run_oracle_suite(suite, trials=100, n_max=8, seed=0)
    assert len(reports) == 1
    report = reports[0]
    assert report.passed, report.failures
    assert report.infeasible_schedules == 0
    if suite == OracleSuite.TRANSITIONAL:
        assert report.max_sandwich_violation <= 1e-9
    else:
        assert report.max_rel_deviation <= 1e-9


def test_oracle_suite_all_and_determinism():
    first = run_oracle_suite("all", trials=20, seed=3)
    second = run_oracle_suite("all", trials=20, seed=3)
    assert [r.suite for r in first] == [OracleSuite.INFRA, OracleSuite.V2V, OracleSuite.TRANSITIONAL]
    assert [r.row() for r in first] == [r.row() for r in second]


def test_oracle_rejects_empty_runs():
    with pytest.raises(ValueError):
        run_oracle_suite("infra", trials=0)
    with pytest.raises(ValueError):
        run_oracle_suite("infra", n_max=0)


@pytest.mark.slow
def test_oracle_acceptance_runs():
    for report in run_oracle_suite("all", trials=500, n_max=8, seed=0):
        assert report.passed, report.failures
