import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import desk
from trampsched import netgen, network
from trampsched.instance import BerthSpec, ContractSpec, TimeWindowSpec, VesselSpec, make_instance


def _two_windows(w1, w2, gamma=0.5):
    """One vessel, berths at T1 and T2 (5 h apart), origin 10 h from T1 and 4 h from T2."""
    return make_instance(
        [VesselSpec("V1", "O", 5.0, 1000, 1.0, 1.0)],
        [ContractSpec("C1", "V1", "D", 100, 10.0, 1.0, 200.0)],
        [BerthSpec("B1", "T1", 20.0), BerthSpec("B2", "T2", 20.0)],
        [TimeWindowSpec("W1", "B1", w1[0], w1[1], 10.0, gamma),
         TimeWindowSpec("W2", "B2", w2[0], w2[1], 10.0, gamma)],
        {("O", "T1"): 10.0, ("O", "T2"): 4.0, ("T1", "T2"): 5.0, ("T1", "D"): 10.0, ("T2", "D"): 10.0,
         ("O", "D"): 20.0},
        0.001,
    )


def test_fig1_counts():
    net = network.build(desk.fig1())
    for vid in ("V1", "V2"):
        vn = net[vid]
        assert len(vn.nodes) == 6
        # 4 out of O, 12 between windows, 4 into D, and O -> D
        assert len(vn.arcs) == 21
        assert len(vn.draft_arcs) == 16
    assert net.counts() == {"nodes": 12, "arcs": 42, "draft_arcs": 32}
    assert net.shared_windows("V1", "V2") == ("W1a", "W1b", "W2a", "W2b")


def test_one_window_network():
    vn = network.build(desk.one_window())["V1"]
    assert [n.label for n in vn.nodes] == ["O", "W1", "D"]
    assert sorted(a.key for a in vn.arcs) == [("O", "D"), ("O", "W1"), ("W1", "D")]
    assert vn.arc("O", "W1").sail_hours == 10.0
    assert [a.key for a in vn.draft_arcs] == [("W1", "D")]


def test_window_removed_when_closing_before_first_pallet():
    inst = desk.one_window(sail_in=10.0, window=(0.0, 10.0), gamma=1.0)
    net, rep = network.reduce(network.build(inst), inst)
    assert net["V1"].windows == ()
    assert sorted(a.key for a in net["V1"].arcs) == [("O", "D")]
    assert rep.nodes_removed == 1
    assert rep.removals[0].rule == network.RULE_SERVICE
    assert {r.rule for r in rep.removals[1:]} == {network.RULE_CASCADE}


def test_window_kept_when_open_long_enough():
    inst = desk.one_window(sail_in=10.0, window=(0.0, 100.0), gamma=1.0)
    net, rep = network.reduce(network.build(inst), inst)
    assert net["V1"].windows == ("W1",)
    assert rep.removals == []


def test_late_arc_removed_but_window_kept():
    # W2 is reachable straight from O (t=4) but not via W1 (opens at 10, +5 h sail = 15 > 14.5)
    inst = _two_windows((10.0, 50.0), (0.0, 15.0))
    net, rep = network.reduce(network.build(inst), inst)
    keys = {a.key for a in net["V1"].arcs}
    assert ("O", "W2") in keys
    assert ("W1", "W2") not in keys
    assert ("W2", "W1") in keys
    assert [(r.rule, r.item) for r in rep.removals] == [(network.RULE_LATE_ARC, "V1:W1>W2")]


def test_cascade_removes_incident_arcs():
    inst = _two_windows((0.0, 5.0), (0.0, 50.0))  # O -> T1 takes 10 h, W1 closes at 5
    net, rep = network.reduce(network.build(inst), inst)
    assert net["V1"].windows == ("W2",)
    cascaded = sorted(r.item for r in rep.removals if r.rule == network.RULE_CASCADE)
    assert cascaded == ["V1:O>W1", "V1:W1>D", "V1:W1>W2", "V1:W2>W1"]


def test_min_pallets_threshold():
    inst = desk.one_window(sail_in=10.0, window=(0.0, 20.0), gamma=1.0)
    kept, _ = network.reduce(network.build(inst), inst, min_pallets=5)
    gone, _ = network.reduce(network.build(inst), inst, min_pallets=10)
    assert kept["V1"].windows == ("W1",)
    assert gone["V1"].windows == ()


def test_earliest_arrival():
    inst = _two_windows((10.0, 50.0), (0.0, 50.0))
    net = network.build(inst)
    assert network.earliest_arrival(net, "V1", "O") == 0.0
    assert network.earliest_arrival(net, "V1", "W2") == 4.0
    assert network.earliest_arrival(net, "V1", "W1") == 9.0  # via W2, 4 + 5
    assert network.earliest_arrival(net, "V1", "D") == 14.0
    assert math.isinf(network.earliest_arrival(net, "V1", "W9"))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), v=st.integers(1, 4), b=st.integers(1, 3), w=st.integers(1, 3))
def test_reduction_is_a_fixed_point(seed, v, b, w):
    inst = netgen.generate(netgen.FamilySpec(v, b, w, v + 1, 200 * (v + 1), seed))
    full = network.build(inst)
    once, rep = network.reduce(full, inst)
    twice, rep2 = network.reduce(once, inst)
    assert network.arc_set(twice) == network.arc_set(once)
    assert rep2.removals == []
    assert network.arc_set(once) <= network.arc_set(full)
    # removed items are accounted for exactly once
    assert rep.arcs_removed == len(network.arc_set(full)) - len(network.arc_set(once))
    # every kept window is reachable and every kept arc has a live tail and head
    for vn in once.vessels.values():
        live = set(vn.nodes)
        assert all(a.tail in live and a.head in live for a in vn.arcs)
        for n in vn.window_nodes:
            assert vn.predecessors(n)


@pytest.mark.parametrize("family", ["S2B2W2C3", "S3B2W3C4"])
def test_every_vessel_keeps_the_direct_arc(family):
    inst = netgen.generate(netgen.family_from_name(family, 600, 1))
    net, _ = network.reduce(network.build(inst), inst)
    for vn in net.vessels.values():
        assert vn.arc("O", "D") is not None
