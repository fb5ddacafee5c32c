import copy
import json

import numpy as np
import pytest

import desk
from trampsched import model as mdl
from trampsched import netgen, network, pipeline
from trampsched.instance import instance_from_dict, instance_to_dict
from trampsched.schedule import Schedule
from trampsched.validate import (FAMILIES, InfeasibleSchedule, LimitsExceeded, OracleLimits, brute_force_optimum,
                                 check_schedule, count_orders, objective_recompute, objective_terms,
                                 vessel_benefits)


def test_desk_schedule_is_valid():
    inst = desk.check_desk()
    rep = check_schedule(inst, desk.check_desk_schedule())
    assert rep.ok, [str(v) for v in rep.violations]


@pytest.mark.parametrize("family", FAMILIES)
def test_each_family_caught_alone(family):
    inst = desk.check_desk()
    rep = check_schedule(inst, desk.broken_schedules()[family])
    assert rep.families() == {family}
    assert all(v.slack < 0 for v in rep.violations)


def test_broken_suite_covers_every_family():
    assert sorted(desk.broken_schedules(), key=lambda f: int(f[1:-1])) == list(FAMILIES)


@pytest.mark.parametrize("make", [desk.one_window, desk.fig1, desk.double_dock, desk.three_vessels, desk.check_desk])
def test_idle_fleet_is_valid(make):
    inst = make()
    s = Schedule.idle(inst)
    assert check_schedule(inst, s).ok
    assert objective_recompute(inst, s) == pytest.approx(pipeline.idle_value(inst))


def test_objective_terms_of_desk_schedule():
    inst = desk.check_desk()
    t = objective_terms(inst, desk.check_desk_schedule())
    # V1: 500 pallets at 4, fee 100, 15 h rented, 10 h sailing, no draft fuel on a zero-length leg
    assert t["V1"] == pytest.approx({"income": 2000.0, "fees": -100.0, "rent": -15.0, "fuel": -10.0,
                                     "draft_fuel": 0.0, "compensation": -500.0})
    assert sum(vessel_benefits(inst, desk.check_desk_schedule()).values()) == pytest.approx(8117.0)


def test_income_is_linear_in_price():
    inst = desk.check_desk()
    sched = desk.check_desk_schedule()
    base = objective_terms(inst, sched)
    doc = instance_to_dict(inst)
    for c in doc["contracts"]:
        c["income_per_pallet"] *= 2
    doubled = instance_from_dict(doc)
    twice = objective_terms(doubled, sched)
    for vid in base:
        assert twice[vid]["income"] == pytest.approx(2 * base[vid]["income"])
        assert twice[vid]["rent"] == base[vid]["rent"]


def test_recompute_refuses_invalid():
    inst = desk.check_desk()
    with pytest.raises(InfeasibleSchedule):
        objective_recompute(inst, desk.broken_schedules()["(13)"])


def test_report_json():
    rep = check_schedule(desk.check_desk(), desk.broken_schedules()["(14)"])
    doc = json.loads(rep.to_json())
    assert doc["violations"][0]["family"] == "(14)"
    assert doc["violations"][0]["slack"] == pytest.approx(-1.0)


def test_order_count():
    inst = desk.three_vessels()
    assert count_orders(inst, {"V1": ("W1",), "V2": ("W",), "V3": ("W",)}) == 2
    assert count_orders(inst, {"V1": (), "V2": (), "V3": ()}) == 1
    inst2 = desk.fig1()
    assert count_orders(inst2, {"V1": ("W1a", "W2a"), "V2": ("W2a", "W1a")}) == 4


def test_oracle_limits():
    with pytest.raises(LimitsExceeded):
        brute_force_optimum(desk.fig1())
    with pytest.raises(LimitsExceeded):
        brute_force_optimum(desk.three_vessels())


def test_oracle_small_cases():
    assert brute_force_optimum(desk.one_window())[0] == pytest.approx(4845.0)
    f, s = brute_force_optimum(desk.double_dock())
    assert f == pytest.approx(19836.0)
    assert s.vessels["V1"].route == ["O", "W1", "W2", "D"]
    assert objective_recompute(desk.double_dock(), s) == pytest.approx(f)
    f3, s3 = brute_force_optimum(desk.three_vessels(), OracleLimits(max_vessels=3))
    assert f3 == pytest.approx(6800.0)


def _perturb(sched, rng, dp):
    """Shift one time or one load of a schedule; drafts are kept consistent with the loads."""
    s = copy.deepcopy(sched)
    vs = s.vessels[sorted(s.vessels)[rng.integers(len(s.vessels))]]
    what = rng.integers(4)
    step = float(rng.choice([-3.0, -0.5, 0.5, 3.0]))
    if what == 0:
        vs.depart_h = max(0.0, vs.depart_h + step)
    elif what == 1:
        vs.finish_h = max(0.0, vs.finish_h + step)
    elif vs.dockings:
        d = vs.dockings[rng.integers(len(vs.dockings))]
        if what == 2:
            d.arrive_h = max(0.0, d.arrive_h + step)
        elif d.loads:
            c = sorted(d.loads)[0]
            q = min(max(0.0, d.loads[c] + 20 * step), d.loads[c] + s.shortfall[c])
            s.shortfall[c] -= q - d.loads[c]
            d.loads[c] = q
            cum = 0.0
            for a, b in zip(vs.route[1:], vs.route[2:]):
                cum += vs.docking(a).pallets * dp
                vs.drafts[(a, b)] = cum
    return s


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_validator_agrees_with_model(seed):
    inst = netgen.generate(netgen.family_from_name("S2B2W1C3", 400 + seed, seed))
    net = network.build(inst)
    m = mdl.build_model(net, inst)
    _, opt = brute_force_optimum(inst)
    opt.recompute_orders()
    rng = np.random.default_rng(seed)
    seen = set()
    for _ in range(60):
        s = _perturb(opt, rng, inst.draft_per_pallet_m)
        x = mdl.assignment_from_schedule(m, inst, s)
        ok_model = m.is_feasible(x, tol=1e-6)
        ok_check = check_schedule(inst, s).ok
        assert ok_model == ok_check, [str(v) for v in check_schedule(inst, s).violations]
        if ok_check:
            assert m.objective(x) == pytest.approx(objective_recompute(inst, s), abs=1e-6)
        seen.add(ok_check)
    assert seen == {True, False}
