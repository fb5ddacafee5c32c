import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

import desk
from trampsched import model as mdl
from trampsched import netgen, pipeline
from trampsched.mip import bnb, lp, simplex
from trampsched.model import LE, BigM, MilpModel, Row, Var

EMPTY_M = BigM({}, {}, {}, {}, 0.0)


def _milp(c, rows, n_bin, n_cont=0, hi_cont=10.0):
    """Hand-made model: rows are (coefs list, sense, rhs)."""
    vars_ = [Var(f"b{j}", ("b", j), 0, 1, True, ()) for j in range(n_bin)]
    vars_ += [Var(f"u{j}", ("u", j), 0, hi_cont, False, ()) for j in range(n_cont)]
    rs = [Row(f"r{i}", "(k)", tuple((j, a) for j, a in enumerate(coefs) if a), sense, rhs, ())
          for i, (coefs, sense, rhs) in enumerate(rows)]
    return MilpModel(vars_, rs, {j: v for j, v in enumerate(c) if v}, EMPTY_M)


def _highs(c, A, lo, hi, lb, ub):
    fin_hi, fin_lo = np.isfinite(hi), np.isfinite(lo)
    A_ub = np.vstack([A[fin_hi], -A[fin_lo]])
    b_ub = np.concatenate([hi[fin_hi], -lo[fin_lo]])
    return linprog(-c, A_ub=A_ub, b_ub=b_ub, bounds=list(zip(lb, ub)), method="highs")


def test_simplex_matches_highs_on_random_bounded_lps():
    rng = np.random.default_rng(11)
    solved = 0
    for _ in range(150):
        m, n = rng.integers(1, 10), rng.integers(1, 10)
        A = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.6)
        c = rng.normal(size=n)
        lo = np.where(rng.random(m) < 0.5, -np.inf, rng.normal(size=m) - 2)
        hi = np.where(rng.random(m) < 0.3, np.inf, rng.normal(size=m) + 2)
        lb, ub = -rng.random(n), rng.random(n) * 3
        r = simplex.solve(c, A, lo, hi, lb, ub)
        h = _highs(c, A, lo, hi, lb, ub)
        if h.status == 0:
            solved += 1
            assert r.status == simplex.OPTIMAL
            assert r.value == pytest.approx(-h.fun, rel=1e-7, abs=1e-7)
            act = A @ r.x
            assert np.all(act <= hi + 1e-7) and np.all(act >= lo - 1e-7)
            assert np.all(r.x >= lb - 1e-9) and np.all(r.x <= ub + 1e-9)
        else:
            assert h.status == 2 and r.status == simplex.INFEASIBLE
    assert solved > 50


def test_warm_start_after_bound_change():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(80):
        m, n = rng.integers(2, 10), rng.integers(2, 10)
        A = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.6)
        c = rng.normal(size=n)
        act = A @ rng.uniform(0, 3, n)
        lo = np.where(rng.random(m) < 0.5, act - rng.uniform(0, 2, m), -np.inf)
        hi = np.where(rng.random(m) < 0.7, act + rng.uniform(0, 2, m), np.inf)
        lb, ub = np.zeros(n), np.full(n, 5.0)
        r = simplex.solve(c, A, lo, hi, lb, ub)
        assert r.status == simplex.OPTIMAL
        again = simplex.solve(c, A, lo, hi, lb, ub, basis=r.basis)
        assert again.iterations == 0 and again.value == pytest.approx(r.value)
        j = int(rng.integers(n))
        ub2 = ub.copy()
        ub2[j] = np.floor(r.x[j])
        warm = simplex.solve(c, A, lo, hi, lb, ub2, basis=r.basis)
        cold = simplex.solve(c, A, lo, hi, lb, ub2)
        assert warm.status == cold.status
        if cold.status == simplex.OPTIMAL:
            checked += 1
            assert warm.value == pytest.approx(cold.value, rel=1e-7, abs=1e-7)
    assert checked > 40


def test_crossed_bounds_are_infeasible():
    r = simplex.solve(np.ones(2), np.ones((1, 2)), np.array([0.0]), np.array([1.0]),
                      np.array([0.0, 2.0]), np.array([1.0, 1.0]))
    assert r.status == simplex.INFEASIBLE


def test_zero_row_infeasible():
    # 0 * x = 1
    m = _milp([1.0], [([0.0], "=", 1.0)], n_bin=0, n_cont=1)
    data = lp.LpData.from_model(m)
    for engine in ("simplex", "highs"):
        assert lp.solve_lp(data, engine=engine).status == lp.INFEASIBLE
    assert bnb.solve(m).status == bnb.INFEASIBLE


def test_empty_model():
    m = MilpModel([], [], {}, EMPTY_M, obj_const=3.5)
    res = bnb.solve(m)
    assert res.status == bnb.OPTIMAL
    assert res.value == 3.5


def test_unbounded_lp():
    m = MilpModel([Var("u", ("u", 0), 0, np.inf, False, ())], [], {0: 1.0}, EMPTY_M)
    assert bnb.solve(m).status == bnb.UNBOUNDED


def test_knapsack_against_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = 8
        val = rng.integers(1, 30, n).astype(float)
        wt = rng.integers(1, 15, n).astype(float)
        cap = float(wt.sum() // 2)
        m = _milp(list(val), [(list(wt), LE, cap)], n_bin=n)
        best = max(sum(val[j] for j in S) for k in range(n + 1) for S in itertools.combinations(range(n), k)
                   if sum(wt[j] for j in S) <= cap)
        for branching in ("most-fractional", "pseudo-cost"):
            res = bnb.solve(m, bnb.SolverOptions(branching=branching))
            assert res.status == bnb.OPTIMAL
            assert res.value == pytest.approx(best)
            assert m.is_feasible(res.x)


def test_mixed_model_with_continuous_columns():
    # max 3b0 + 2b1 + u  s.t.  u <= 4 b0 + 1,  b0 + b1 <= 1,  u <= 10
    m = _milp([3.0, 2.0, 1.0], [([-4.0, 0.0, 1.0], LE, 1.0), ([1.0, 1.0, 0.0], LE, 1.0)], n_bin=2, n_cont=1)
    res = bnb.solve(m)
    assert res.status == bnb.OPTIMAL
    assert res.value == pytest.approx(8.0)
    assert res.x[0] == pytest.approx(1.0)


def test_one_window_optimum_closed_form():
    # 500 pallets * 10, fee 50, rent 55 h, fuel 30, draft fuel 20 * 5 / 5
    solved = pipeline.solve_instance(desk.one_window())
    assert solved.result.status == bnb.OPTIMAL
    assert solved.result.value == pytest.approx(5000 - 50 - 55 - 30 - 20)


def test_lp_bound_dominates_milp():
    for seed in (1, 2, 3):
        inst = netgen.generate(netgen.family_from_name("S2B2W2C3", 500, seed))
        _, _, m = pipeline.prepare(inst)
        value, _, _, status = lp.lp_solve(m, engine="highs")
        s = bnb.solve(m, start=mdl.idle_assignment(m, inst))
        assert status == lp.OPTIMAL and s.status == bnb.OPTIMAL
        assert value >= s.value - 1e-6 * max(1.0, abs(s.value))
        assert lp.lp_solve(m, engine="simplex")[0] == pytest.approx(value, rel=1e-7)


def test_bound_trace_is_monotone():
    inst = netgen.generate(netgen.family_from_name("S3B2W2C4", 800, 2), netgen.GeneratorConfig(windows_per_vessel=2))
    _, _, m = pipeline.prepare(inst)
    res = bnb.solve(m, start=mdl.idle_assignment(m, inst))
    tr = res.bound_trace
    assert tr and all(b <= a + 1e-6 * max(1.0, abs(a)) for a, b in zip(tr, tr[1:]))
    assert res.bound >= res.value - 1e-6


def test_time_limit_returns_incumbent():
    inst = netgen.generate(netgen.family_from_name("S6B3W2C8", 6000, 1))
    _, _, m = pipeline.prepare(inst)
    res = bnb.solve(m, bnb.SolverOptions(time_limit_s=0.5), start=mdl.idle_assignment(m, inst))
    assert res.status in (bnb.FEASIBLE, bnb.OPTIMAL)
    assert res.x is not None and m.is_feasible(res.x)
    assert res.wall_s < 3.0


def test_rel_gap():
    assert bnb.rel_gap(110.0, 100.0) == pytest.approx(0.1)
    assert bnb.rel_gap(-90.0, -100.0) == pytest.approx(0.1)
    assert bnb.rel_gap(5.0, 0.0) == pytest.approx(5e9)
    assert bnb.rel_gap(1.0, float("-inf")) == float("inf")


def test_options_validation(monkeypatch):
    with pytest.raises(ValueError):
        bnb.SolverOptions(time_limit_s=0)
    with pytest.raises(ValueError):
        bnb.SolverOptions(branching="random")
    monkeypatch.setenv(bnb.TIME_ENV, "7.5")
    assert bnb.SolverOptions.from_env().time_limit_s == 7.5
