"""Two-phase fix-and-reoptimize heuristic.

Phase 1 drops the docking-order rows, solves every free vessel on its own,
fixes the one with the largest benefit and repeats with the order rows between
fixed and free vessels put back. Phase 2 re-optimizes pairs of vessels, one
with a high spare-capacity ratio and one with a low ratio, with everyone else
held fixed, restarting the scan after every improvement.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import model as mdl
from .instance import Instance
from .mip import bnb
from .mip.lp import lp_solve
from .network import ExpandedNetwork
from .schedule import Schedule, take_vessels
from .validate import vessel_benefits

log = logging.getLogger(__name__)

IMPROVE_TOL = 1e-9


@dataclass
class HeuristicOptions:
    time_limit_s: float = 1800.0
    branching: str = "pseudo-cost"
    lp_engine: str = "auto"
    rel_gap_target: float = 1e-6
    compute_bound: bool = True

    def solver(self, time_left: float) -> bnb.SolverOptions:
        return bnb.SolverOptions(time_limit_s=max(1e-3, time_left), rel_gap_target=self.rel_gap_target,
                                 branching=self.branching, lp_engine=self.lp_engine)


@dataclass
class IterationLog:
    label: str
    vessels: list[str]
    benefits: dict[str, float]
    chosen: str | None = None
    improved: bool | None = None
    delta: float = 0.0
    timeouts: list[str] = field(default_factory=list)

    def line(self) -> str:
        ben = ", ".join(f"{v}={b:.2f}" for v, b in sorted(self.benefits.items()))
        if self.chosen is not None:
            return f"{self.label}: benefits {{{ben}}} -> fix {self.chosen}"
        tag = f"improved {self.delta:+.2f}" if self.improved else "no improvement"
        return f"{self.label}: pair ({', '.join(self.vessels)}) {{{ben}}} {tag}"


@dataclass
class HeuristicReport:
    iterations: list[IterationLog] = field(default_factory=list)
    fixing_order: list[str] = field(default_factory=list)
    pairs_evaluated: list[tuple[str, str]] = field(default_factory=list)
    benefits_h1: dict[str, float] = field(default_factory=dict)
    benefits_h2: dict[str, float] = field(default_factory=dict)
    f_h1: float = math.nan
    f_h2: float = math.nan
    bound: float = math.inf
    h1_s: float = 0.0
    h2_s: float = 0.0
    ht_s: float = 0.0
    timeouts: list[str] = field(default_factory=list)

    def trace(self) -> list[str]:
        return [it.line() for it in self.iterations]

    def to_json(self) -> str:
        doc = asdict(self)
        doc["pairs_evaluated"] = [list(p) for p in self.pairs_evaluated]
        doc["bound"] = None if not np.isfinite(self.bound) else self.bound
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- ratio -------------------------------------------------------------------


@dataclass(frozen=True)
class RatioEntry:
    vessel: str
    spare_pallets: float  # remaining capacity
    mean_bandwidth_h: float  # average remaining bandwidth over accessible windows
    ratio: float


def ratio(vessel: str, schedule: Schedule, inst: Instance) -> RatioEntry:
    v = inst.vessel(vessel)
    vs = schedule.vessels[vessel]
    spare = v.capacity_pallets - vs.pallets
    bands = []
    for wid in inst.accessible_windows(vessel):
        bands.append(inst.window(wid).bandwidth_h - vs.loading_hours(inst, wid))
    mean = float(np.mean(bands)) if bands else 0.0
    r = math.inf if mean <= 0 else spare / mean
    return RatioEntry(vessel, spare, mean, r)


# -- phase 1 -------------------------------------------------------------------


class _Clock:
    def __init__(self, limit: float, start: float | None = None):
        self.t0 = time.perf_counter() if start is None else start
        self.deadline = self.t0 + limit

    def left(self) -> float:
        return self.deadline - time.perf_counter()


def _sub_model(base: mdl.MilpModel, keep: Iterable[str], fixed: Iterable[str]) -> mdl.MilpModel:
    """Columns/rows of the kept vessels, order rows among fixed vessels removed."""
    sub = mdl.restrict(base, keep)
    return mdl.drop_sequencing_within(sub, fixed)


def _solve_sub(sub: mdl.MilpModel, inst: Instance, start_sched: Schedule, opts: HeuristicOptions,
               clock: _Clock) -> tuple[Schedule | None, bool]:
    """Best schedule of a sub-model (None on timeout) and whether it was proven optimal."""
    if clock.left() <= 0:
        return None, False
    start = mdl.assignment_from_schedule(sub, inst, start_sched)
    res = bnb.solve(sub, opts.solver(clock.left()), start=start)
    if res.status != bnb.OPTIMAL or res.x is None:
        return None, False
    return mdl.extract_schedule(sub, inst, res.x), True


def phase1(inst: Instance, net: ExpandedNetwork, options: HeuristicOptions | None = None,
           report: HeuristicReport | None = None, clock: _Clock | None = None,
           base: mdl.MilpModel | None = None) -> tuple[Schedule, dict[str, float], HeuristicReport]:
    opts = options or HeuristicOptions()
    rep = report or HeuristicReport()
    clock = clock or _Clock(opts.time_limit_s)
    t0 = time.perf_counter()
    base = base or mdl.build_model(net, inst)
    current = Schedule.idle(inst)
    pinned = base
    fixed: list[str] = []
    free = sorted(net.vessels, key=_vid_key)
    cache: dict[str, tuple[Schedule, float]] = {}
    k = 0
    while free:
        k += 1
        cands: dict[str, tuple[Schedule, float]] = {}
        timeouts = []
        for v in free:
            if v in cache:
                cands[v] = cache[v]
                continue
            if clock.left() > 0:
                sub = _sub_model(pinned, fixed + [v], fixed)
                sched, ok = _solve_sub(sub, inst, current, opts, clock)
            else:
                sched, ok = None, False
            if not ok:
                # timed-out sub-solve: the vessel stays idle in this phase
                timeouts.append(v)
                sched = take_vessels(current, Schedule.idle(inst), inst, {v})
            full = take_vessels(current, sched, inst, {v})
            cands[v] = (full, vessel_benefits(inst, full)[v])
            if ok:
                cache[v] = cands[v]
        benefits = {v: cands[v][1] for v in free}
        # argmax, ties to the smallest vessel id
        top = max(benefits.values())
        best = min((v for v in free if benefits[v] == top), key=_vid_key)
        rep.iterations.append(IterationLog(f"IT 1.{k}", list(free), benefits, chosen=best,
                                           timeouts=timeouts))
        rep.timeouts.extend(f"phase1:{v}" for v in timeouts)
        current = take_vessels(current, cands[best][0], inst, {best})
        if clock.left() > 0:
            pinned = mdl.fix_vessel(pinned, best, current, inst)
        fixed.append(best)
        free.remove(best)
        rep.fixing_order.append(best)
        # results of vessels sharing a window with the newly fixed one are stale
        for v in list(cache):
            if net.shared_windows(v, best):
                del cache[v]
    current.recompute_orders()
    rep.benefits_h1 = vessel_benefits(inst, current)
    rep.f_h1 = float(sum(rep.benefits_h1.values()))
    rep.h1_s = time.perf_counter() - t0
    return current, rep.benefits_h1, rep


def _vid_key(v: str) -> tuple:
    # V2 before V10
    head = v.rstrip("0123456789")
    tail = v[len(head):]
    return (head, int(tail) if tail else -1, v)


# -- phase 2 -------------------------------------------------------------------


def pair_scan(vessels: Iterable[str], ratios: Callable[[], Mapping[str, float]],
              evaluate: Callable[[str, str], bool],
              expired: Callable[[], bool] = lambda: False) -> list[tuple[str, str, bool]]:
    """Ratio-guided scan; returns the evaluated pairs in order with their outcome.

    L1 lists vessels by decreasing ratio, L2 by increasing ratio. A pair
    (L1[i], L2[j]) is evaluated unless it already failed to improve or the
    first vessel's ratio is not strictly larger. An improvement restarts the
    scan from freshly sorted lists.
    """
    vs = sorted(vessels, key=_vid_key)
    tau: set[frozenset[str]] = set()
    done: list[tuple[str, str, bool]] = []
    while True:
        R = dict(ratios())
        L1 = sorted(vs, key=lambda v: (-R[v], _vid_key(v)))
        L2 = sorted(vs, key=lambda v: (R[v], _vid_key(v)))
        restart = False
        for a in L1:
            for b in L2:
                if a == b or frozenset((a, b)) in tau or not R[a] > R[b]:
                    continue
                if expired():
                    return done
                ok = bool(evaluate(a, b))
                done.append((a, b, ok))
                if ok:
                    restart = True
                    break
                tau.add(frozenset((a, b)))
            if restart:
                break
        if not restart:
            return done


def phase2(inst: Instance, net: ExpandedNetwork, start: Schedule,
           options: HeuristicOptions | None = None, report: HeuristicReport | None = None,
           clock: _Clock | None = None, base: mdl.MilpModel | None = None
           ) -> tuple[Schedule, HeuristicReport]:
    opts = options or HeuristicOptions()
    rep = report or HeuristicReport()
    clock = clock or _Clock(opts.time_limit_s)
    t0 = time.perf_counter()
    base = base or mdl.build_model(net, inst)
    state = {"sched": start}
    vids = sorted(net.vessels, key=_vid_key)
    counter = [0]

    def ratios() -> dict[str, float]:
        return {v: ratio(v, state["sched"], inst).ratio for v in vids}

    def evaluate(a: str, b: str) -> bool:
        counter[0] += 1
        cur = state["sched"]
        others = [v for v in vids if v not in (a, b)]
        pinned = base
        for v in others:
            pinned = mdl.fix_vessel(pinned, v, cur, inst)
        sub = mdl.drop_sequencing_within(pinned, others)
        before = vessel_benefits(inst, cur)
        old = before[a] + before[b]
        sched, ok = _solve_sub(sub, inst, cur, opts, clock)
        label = f"IT 2.{counter[0]}"
        if not ok:
            rep.timeouts.append(f"phase2:{a},{b}")
            rep.iterations.append(IterationLog(label, [a, b], {a: before[a], b: before[b]},
                                               improved=False, timeouts=[a, b]))
            return False
        cand = take_vessels(cur, sched, inst, {a, b})
        after = vessel_benefits(inst, cand)
        new = after[a] + after[b]
        improved = new > old + IMPROVE_TOL * max(1.0, abs(old))
        rep.iterations.append(IterationLog(label, [a, b], {a: after[a], b: after[b]},
                                           improved=improved, delta=new - old))
        if improved:
            state["sched"] = cand
        return improved

    done = pair_scan(vids, ratios, evaluate, expired=lambda: clock.left() <= 0)
    if clock.left() <= 0 and not any(t.startswith("phase2") for t in rep.timeouts):
        rep.timeouts.append("phase2:time-limit")
    rep.pairs_evaluated = [(a, b) for a, b, _ in done]
    final = state["sched"]
    final.recompute_orders()
    rep.benefits_h2 = vessel_benefits(inst, final)
    rep.f_h2 = float(sum(rep.benefits_h2.values()))
    rep.h2_s = time.perf_counter() - t0
    return final, rep


def run(inst: Instance, net: ExpandedNetwork, options: HeuristicOptions | None = None
        ) -> tuple[Schedule, Schedule, HeuristicReport]:
    """Both phases under one global time limit; returns (phase-1 schedule, final schedule, report)."""
    opts = options or HeuristicOptions()
    clock = _Clock(opts.time_limit_s)
    rep = HeuristicReport()
    base = mdl.build_model(net, inst)
    if opts.compute_bound:
        value, _, _, status = lp_solve(base, engine="highs", time_limit=max(1e-3, clock.left()))
        if status == "optimal":
            rep.bound = float(value)
    s1, _, rep = phase1(inst, net, opts, rep, clock, base)
    s1_copy = Schedule.from_dict(s1.to_dict())
    s2, rep = phase2(inst, net, s1, opts, rep, clock, base)
    rep.ht_s = rep.h1_s + rep.h2_s
    return s1_copy, s2, rep
