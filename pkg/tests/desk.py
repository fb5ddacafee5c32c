"""Small hand-built instances and schedules shared by the tests."""

from __future__ import annotations

import copy

from trampsched.instance import BerthSpec, ContractSpec, TimeWindowSpec, VesselSpec, make_instance
from trampsched.schedule import Docking, Schedule, VesselSchedule


def one_window(sail_in=10.0, sail_out=20.0, window=(10.0, 100.0), gamma=0.05, g=500, psi=10.0, sigma=2.0,
               fee=50.0, berth_draft=20.0, light=5.0, dp=0.01, due=200.0, capacity=1000, rent=1.0, fuel=1.0):
    """One vessel, one berth with one window, one contract."""
    inst = make_instance(
        [VesselSpec("V1", "P0", light, capacity, rent, fuel)],
        [ContractSpec("C1", "V1", "P2", g, psi, sigma, due)],
        [BerthSpec("B1", "P1", berth_draft)],
        [TimeWindowSpec("W1", "B1", window[0], window[1], fee, gamma)],
        {("P0", "P1"): sail_in, ("P1", "P2"): sail_out, ("P0", "P2"): sail_in + sail_out},
        dp,
    )
    return inst


def fig1():
    """Two vessels, two berths with two windows each, every window open to both vessels."""
    vessels = [VesselSpec("V1", "O1", 6.0, 800, 2.0, 3.0), VesselSpec("V2", "O2", 6.5, 800, 2.0, 3.0)]
    contracts = [ContractSpec("C1", "V1", "D1", 400, 12.0, 3.0, 150.0),
                 ContractSpec("C2", "V2", "D2", 500, 11.0, 3.0, 160.0)]
    berths = [BerthSpec("B1", "T1", 10.0), BerthSpec("B2", "T2", 9.0)]
    windows = [TimeWindowSpec("W1a", "B1", 0.0, 30.0, 300.0, 0.04),
               TimeWindowSpec("W1b", "B1", 40.0, 80.0, 300.0, 0.04),
               TimeWindowSpec("W2a", "B2", 5.0, 35.0, 250.0, 0.05),
               TimeWindowSpec("W2b", "B2", 45.0, 90.0, 250.0, 0.05)]
    sailing = {("O1", "T1"): 8.0, ("O1", "T2"): 12.0, ("O2", "T1"): 10.0, ("O2", "T2"): 6.0,
               ("T1", "T2"): 5.0, ("T1", "D1"): 20.0, ("T2", "D1"): 18.0, ("T1", "D2"): 15.0,
               ("T2", "D2"): 22.0, ("O1", "D1"): 30.0, ("O2", "D2"): 28.0, ("O1", "O2"): 15.0,
               ("D1", "D2"): 25.0, ("O1", "D2"): 26.0, ("O2", "D1"): 27.0}
    return make_instance(vessels, contracts, berths, windows, sailing, 0.005)


def double_dock():
    """One berth with windows [10,20] and [30,40]; a full load needs 20 h, more than either window."""
    return make_instance(
        [VesselSpec("V1", "O", 5.0, 2500, 1.0, 1.0)],
        [ContractSpec("C1", "V1", "Q", 2000, 10.0, 5.0, 100.0)],
        [BerthSpec("B1", "P", 20.0)],
        [TimeWindowSpec("W1", "B1", 10.0, 20.0, 50.0, 0.01),
         TimeWindowSpec("W2", "B1", 30.0, 40.0, 50.0, 0.01)],
        {("O", "P"): 5.0, ("P", "Q"): 10.0, ("O", "Q"): 15.0},
        0.001,
    )


def three_vessels():
    """V1 alone at W1; V2 and V3 compete for W (window [0, 28], 10 h of loading each).

    Alone, the benefits are V1 2000, V2 3000 and V3 2500. Once V2 holds W over
    [10, 20], V3 can only load 800 pallets in [20, 28] and its benefit drops
    to 1800, below V1's.
    """
    vessels = [VesselSpec("V1", "O1", 5.0, 1000, 1.0, 1.0, windows=("W1",)),
               VesselSpec("V2", "O2", 5.0, 1000, 1.0, 1.0, windows=("W",)),
               VesselSpec("V3", "O3", 5.0, 1000, 1.0, 1.0, windows=("W",))]
    # destination at the terminal itself, so the last leg has no sailing or draft fuel
    contracts = [ContractSpec("C1", "V1", "P", 1000, 3.01, 0.0, 100.0),
                 ContractSpec("C2", "V2", "P", 1000, 4.01, 0.0, 100.0),
                 ContractSpec("C3", "V3", "P", 1000, 3.51, 0.0, 100.0)]
    berths = [BerthSpec("B1", "P", 20.0), BerthSpec("B2", "P", 20.0)]
    windows = [TimeWindowSpec("W1", "B1", 0.0, 100.0, 980.0, 0.01),
               TimeWindowSpec("W", "B2", 0.0, 28.0, 980.0, 0.01)]
    sailing = {("O1", "P"): 10.0, ("O2", "P"): 10.0, ("O3", "P"): 10.0,
               ("O1", "O2"): 10.0, ("O1", "O3"): 10.0, ("O2", "O3"): 10.0}
    return make_instance(vessels, contracts, berths, windows, sailing, 0.001)


# -- validator suite -------------------------------------------------------------


def check_desk():
    """Three vessels with a tight draft allowance at W1 and a shared window W."""
    vessels = [VesselSpec("V1", "O1", 5.0, 2000, 1.0, 1.0, windows=("W1",)),
               VesselSpec("V2", "O2", 5.0, 2000, 1.0, 1.0, windows=("W",)),
               VesselSpec("V3", "O3", 5.0, 2000, 1.0, 1.0, windows=("W",))]
    contracts = [ContractSpec("C1", "V1", "P", 1000, 4.0, 1.0, 60.0),
                 ContractSpec("C2", "V2", "P", 1000, 4.0, 1.0, 100.0),
                 ContractSpec("C3", "V3", "P", 1000, 4.0, 1.0, 100.0)]
    berths = [BerthSpec("B1", "P", 5.5), BerthSpec("B2", "P", 20.0)]  # V1 may carry 0.5 m = 500 pallets
    windows = [TimeWindowSpec("W1", "B1", 12.0, 100.0, 100.0, 0.01),
               TimeWindowSpec("W", "B2", 0.0, 28.0, 100.0, 0.01)]
    sailing = {("O1", "P"): 10.0, ("O2", "P"): 10.0, ("O3", "P"): 10.0,
               ("O1", "O2"): 10.0, ("O1", "O3"): 10.0, ("O2", "O3"): 10.0}
    return make_instance(vessels, contracts, berths, windows, sailing, 0.001)


def check_desk_schedule() -> Schedule:
    """A feasible schedule of check_desk: V1 loads up to its draft allowance, V3 follows V2 at W."""
    return Schedule(
        vessels={
            "V1": VesselSchedule("V1", ["O", "W1", "D"], [Docking("W1", 12.0, {"C1": 500.0})],
                                 2.0, 17.0, {("W1", "D"): 0.5}),
            "V2": VesselSchedule("V2", ["O", "W", "D"], [Docking("W", 10.0, {"C2": 1000.0})],
                                 0.0, 20.0, {("W", "D"): 1.0}),
            "V3": VesselSchedule("V3", ["O", "W", "D"], [Docking("W", 20.0, {"C3": 800.0})],
                                 10.0, 28.0, {("W", "D"): 0.8}),
        },
        shortfall={"C1": 500.0, "C2": 0.0, "C3": 200.0},
        orders={"W": ["V2", "V3"]},
    )


def broken_schedules() -> dict[str, Schedule]:
    """One schedule per constraint family (2)..(14), each breaking only that family."""
    base = check_desk_schedule()
    out: dict[str, Schedule] = {}

    def variant(family):
        s = copy.deepcopy(base)
        out[family] = s
        return s

    s = variant("(2)")  # loads plus shortfall no longer add up
    s.shortfall["C2"] = 10.0
    s = variant("(3)")  # route does not reach the destination
    s.vessels["V1"].route = ["O", "W1"]
    s = variant("(4)")  # recorded draft disagrees with the load carried
    s.vessels["V2"].drafts[("W", "D")] = 0.7
    s = variant("(5)")  # draft recorded on the origin leg
    s.vessels["V1"].drafts[("O", "W1")] = 0.2
    s = variant("(6)")  # 100 pallets loaded at a window the vessel never visits
    v1 = s.vessels["V1"]
    v1.dockings[0].loads["C1"] = 400.0
    v1.dockings.append(Docking("W", 5.0, {"C1": 100.0}))
    v1.drafts[("W1", "D")] = 0.4
    s = variant("(7)")  # leaves the origin too late for the recorded arrival
    s.vessels["V1"].depart_h = 3.0
    s = variant("(8)")  # reaches the destination before loading ends
    s.vessels["V2"].finish_h = 19.0
    s = variant("(9)")  # V3 starts while V2 is still loading
    s.vessels["V3"].depart_h = 5.0
    s.vessels["V3"].dockings[0].arrive_h = 15.0
    s.vessels["V3"].finish_h = 28.0
    s = variant("(10)")  # docking order at W leaves out V3
    s.orders["W"] = ["V2"]
    s = variant("(11)")  # more draft than the berth admits
    v1 = s.vessels["V1"]
    v1.dockings[0].loads["C1"] = 600.0
    v1.drafts[("W1", "D")] = 0.6
    v1.finish_h = 18.0
    s.shortfall["C1"] = 400.0
    s = variant("(12)")  # arrives before W1 opens
    v1 = s.vessels["V1"]
    v1.depart_h = 1.0
    v1.dockings[0].arrive_h = 11.0
    v1.finish_h = 16.0
    s = variant("(13)")  # V3 keeps loading after W closes
    v3 = s.vessels["V3"]
    v3.dockings[0].loads["C3"] = 810.0
    v3.drafts[("W", "D")] = 0.81
    v3.finish_h = 28.1
    s.shortfall["C3"] = 190.0
    s = variant("(14)")  # reaches the destination after the due date of C1
    s.vessels["V1"].finish_h = 61.0
    return out
