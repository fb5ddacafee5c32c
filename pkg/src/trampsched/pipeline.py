"""build -> reduce -> model -> branch-and-bound, as one call."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model as mdl
from . import network
from .instance import Instance
from .mip import bnb
from .schedule import Schedule


@dataclass
class Solved:
    inst: Instance
    net: network.ExpandedNetwork
    reduction: network.ReductionReport | None
    model: mdl.MilpModel
    result: bnb.SolveResult
    schedule: Schedule | None


def prepare(inst: Instance, reduce: bool = True, min_pallets: float = 1.0):
    net = network.build(inst)
    report = None
    if reduce:
        net, report = network.reduce(net, inst, min_pallets=min_pallets)
    return net, report, mdl.build_model(net, inst)


def solve_instance(inst: Instance, options: bnb.SolverOptions | None = None,
                   reduce: bool = True) -> Solved:
    net, report, m = prepare(inst, reduce=reduce)
    start = mdl.idle_assignment(m, inst)
    res = bnb.solve(m, options, start=start)
    sched = mdl.extract_schedule(m, inst, res.x) if res.x is not None else None
    return Solved(inst, net, report, m, res, sched)


def model_value_of(m: mdl.MilpModel, inst: Instance, sched: Schedule) -> float:
    return float(m.objective(mdl.assignment_from_schedule(m, inst, sched)))


def idle_value(inst: Instance) -> float:
    """Closed-form objective of the idle fleet."""
    total = 0.0
    for v in inst.vessels:
        pi = inst.sail(v.origin_port, inst.destination_port(v.id))
        total -= (v.fuel_rate + v.rent_rate) * pi
    total -= sum(c.compensation_per_pallet * c.size_pallets for c in inst.contracts)
    return float(np.float64(total))
