import numpy as np
import pytest

import desk
from trampsched import model as mdl
from trampsched import netgen, network, pipeline
from trampsched.schedule import Schedule
from trampsched.validate import OracleLimits, brute_force_optimum, objective_recompute, vessel_benefits


def _model(inst, reduce=False):
    net = network.build(inst)
    if reduce:
        net, _ = network.reduce(net, inst)
    return mdl.build_model(net, inst)


def test_one_window_variable_count():
    m = _model(desk.one_window())
    c = m.counts()
    assert (c["x"], c["t"], c["d"], c["p"], c["s"]) == (3, 3, 1, 1, 1)
    assert m.n_vars == 9
    assert "y" not in c


def test_fig1_docking_order_variables():
    m = _model(desk.fig1())
    # two ordered variables per shared window, four shared windows
    assert m.counts()["y"] == 8
    assert m.row_counts()["(9)"] == 8
    assert m.row_counts()["(10)"] == 4


def test_big_m_values():
    m = _model(desk.one_window())
    bm = m.big_m
    assert bm.m1[("V1", "W1", "D")] == pytest.approx(5.0)  # 500 pallets * 0.01 m, under the 15 m allowance
    assert bm.m2 == {"C1": 500.0}
    assert bm.m3["V1"] == bm.m4["V1"] == pytest.approx(200 + 30 + 25)
    assert bm.m5 == 200.0


def test_big_m_capped_by_berth_allowance():
    m = _model(desk.check_desk())
    assert m.big_m.m1[("V1", "W1", "D")] == pytest.approx(1.0)  # cargo 1000 * 0.001 m, allowance 0.5 m is at W1 only
    assert m.big_m.m1[("V2", "W", "D")] == pytest.approx(1.0)


def test_one_window_objective_coefficients():
    m = _model(desk.one_window())
    assert m.obj[m.col("x", "V1", "O", "W1")] == pytest.approx(-10 - 50)
    assert m.obj[m.col("x", "V1", "W1", "D")] == pytest.approx(-20)
    assert m.obj[m.col("d", "V1", "W1", "D")] == pytest.approx(-20 / 5)
    assert m.obj[m.col("p", "W1", "C1")] == pytest.approx(10)
    assert m.obj[m.col("s", "C1")] == pytest.approx(-2)
    assert m.obj[m.col("t", "V1", "O")] == pytest.approx(1)
    assert m.obj[m.col("t", "V1", "D")] == pytest.approx(-1)


@pytest.mark.parametrize("make", [desk.one_window, desk.fig1, desk.double_dock, desk.three_vessels, desk.check_desk])
def test_idle_assignment_feasible_and_closed_form(make):
    inst = make()
    m = _model(inst)
    x = mdl.idle_assignment(m, inst)
    assert m.is_feasible(x)
    assert m.objective(x) == pytest.approx(pipeline.idle_value(inst))
    assert pipeline.idle_value(desk.one_window()) == pytest.approx(-2 * 30 - 2 * 500)


def test_desk_schedule_maps_to_feasible_point():
    inst = desk.check_desk()
    m = _model(inst)
    sched = desk.check_desk_schedule()
    x = mdl.assignment_from_schedule(m, inst, sched)
    assert m.max_violation(x) < 1e-9
    assert m.objective(x) == pytest.approx(objective_recompute(inst, sched))
    assert objective_recompute(inst, sched) == pytest.approx(8117)
    back = mdl.extract_schedule(m, inst, x)
    assert back.orders == {"W": ["V2", "V3"]}
    assert back.vessels["V3"].dockings[0].arrive_h == 20.0


def test_fix_vessel_pins_only_that_vessel():
    inst = desk.check_desk()
    m = _model(inst)
    sched = desk.check_desk_schedule()
    fixed = mdl.fix_vessel(m, "V2", sched, inst)
    x = mdl.assignment_from_schedule(m, inst, sched)
    for j, var in enumerate(fixed.vars):
        if var.vessels == ("V2",):
            assert fixed.vars[j].lo == fixed.vars[j].hi == pytest.approx(x[j])
        else:
            assert (var.lo, var.hi) == (m.vars[j].lo, m.vars[j].hi)
    # the fixed vessel's benefit is the same in the model and the validator
    assert fixed.vessel_benefits(x)["V2"] == pytest.approx(vessel_benefits(inst, sched)["V2"])


def test_fix_vessel_rejects_mismatch():
    inst = desk.check_desk()
    m = _model(inst)
    bad = desk.broken_schedules()["(11)"]
    with pytest.raises(mdl.ScheduleMismatch, match="mismatch"):
        mdl.fix_vessel(m, "V1", bad, inst)


def test_fix_vessel_rejects_unknown_arc():
    inst = desk.one_window(window=(0.0, 5.0), gamma=1.0)
    m = _model(inst, reduce=True)  # W1 is gone
    s = Schedule.idle(inst)
    s.vessels["V1"].route = ["O", "W1", "D"]
    with pytest.raises(mdl.ScheduleMismatch):
        mdl.fix_vessel(m, "V1", s, inst)


def test_drop_sequencing():
    inst = desk.check_desk()
    m = _model(inst)
    assert m.row_counts()["(9)"] == 2 and m.row_counts()["(10)"] == 1
    d = mdl.drop_sequencing(m, ["V3"])
    assert "(9)" not in d.row_counts() and "y" not in d.counts()
    assert d.n_vars == m.n_vars - 2
    assert mdl.drop_sequencing(m, ["V1"]).n_rows == m.n_rows
    w = mdl.drop_sequencing_within(m, ["V2", "V3"])
    assert w.n_rows == m.n_rows - 3
    assert mdl.drop_sequencing_within(m, ["V1", "V2"]) is m


def test_restrict():
    inst = desk.check_desk()
    m = _model(inst)
    r = mdl.restrict(m, ["V1"])
    assert r.vessels() == ["V1"]
    assert all(v.vessels == ("V1",) for v in r.vars)
    assert mdl.restrict(m, ["V2", "V3"]).counts()["y"] == 2


def test_extract_rejects_cycle_and_fraction():
    inst = desk.fig1()
    m = _model(inst)
    x = mdl.idle_assignment(m, inst)
    x[m.col("x", "V1", "W1a", "W1b")] = 1.0
    x[m.col("x", "V1", "W1b", "W1a")] = 1.0
    with pytest.raises(mdl.ExtractionError, match="disconnected"):
        mdl.extract_schedule(m, inst, x)
    y = mdl.idle_assignment(m, inst)
    y[m.col("x", "V2", "O", "D")] = 0.5
    with pytest.raises(mdl.ExtractionError, match="fractional"):
        mdl.extract_schedule(m, inst, y)


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6])
def test_big_m_admits_oracle_optimum(seed):
    # the oracle's optimal schedule must be a feasible point of the model
    spec = netgen.family_from_name("S2B2W1C3", 300 + 11 * seed, seed)
    inst = netgen.generate(spec)
    f, sched = brute_force_optimum(inst, OracleLimits())
    for reduce in (False, True):
        m = _model(inst, reduce)
        x = mdl.assignment_from_schedule(m, inst, sched)
        assert m.max_violation(x) < 1e-6
        assert m.objective(x) == pytest.approx(f, abs=1e-6)


def test_extract_round_trip_objective():
    inst = desk.three_vessels()
    m = _model(inst)
    f, sched = brute_force_optimum(inst, OracleLimits(max_vessels=3))
    x = mdl.assignment_from_schedule(m, inst, sched)
    back = mdl.extract_schedule(m, inst, x)
    assert objective_recompute(inst, back) == pytest.approx(f)
    assert np.allclose(mdl.assignment_from_schedule(m, inst, back), x)
