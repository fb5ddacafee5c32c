"""Sparse MILP for the tramp-ship scheduling problem over an expanded network.

Arc orientation is fixed throughout: for node i, "out" arcs leave i and "in"
arcs enter i. A vessel docks at a window node iff one of its in-arcs is used.

Variable families::

    x[v,i>j]  binary   vessel v sails arc (i, j)
    d[v,i>j]  >= 0     draft increase carried on a draft-subnetwork arc
    t[v,i]    >= 0     arrival (service start) time of v at node i
    p[w,c]    >= 0     pallets of contract c loaded in window w
    s[c]      >= 0     pallets of contract c left behind
    y[v1,v2,w] binary  v1 is served before v2 in shared window w

Rows carry the tag of their constraint family, "(2)" through "(14)".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .instance import Instance, vessel_window_draft_cap
from .network import DEST, ORIGIN, ArcRef, ExpandedNetwork
from .schedule import Docking, Schedule, VesselSchedule

LE, GE, EQ = "<=", ">=", "="
FEAS_TOL = 1e-6
INT_TOL = 1e-6
SEQUENCING_TAGS = ("(9)", "(10)")


class ScheduleMismatch(ValueError):
    pass


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str
    key: tuple
    lo: float
    hi: float
    binary: bool
    vessels: tuple[str, ...]

    @property
    def family(self) -> str:
        return self.key[0]


@dataclass(frozen=True)
class Row:
    name: str
    tag: str
    coefs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    vessels: tuple[str, ...]

    def activity(self, x: Sequence[float]) -> float:
        return sum(a * x[j] for j, a in self.coefs)

    def violation(self, x: Sequence[float]) -> float:
        lhs = self.activity(x)
        if self.sense == LE:
            return max(0.0, lhs - self.rhs)
        if self.sense == GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class BigM:
    m1: Mapping[tuple[str, str, str], float]  # (vessel, tail, head)
    m2: Mapping[str, float]                   # contract
    m3: Mapping[str, float]                   # vessel
    m4: Mapping[str, float]                   # vessel
    m5: float


@dataclass
class MilpModel:
    vars: list[Var]
    rows: list[Row]
    obj: dict[int, float]
    big_m: BigM
    obj_const: float = 0.0
    sense: str = "max"
    name: str = "TSSP"
    index: dict[tuple, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            self.index = {v.key: j for j, v in enumerate(self.vars)}

    @property
    def n_vars(self) -> int:
        return len(self.vars)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_nonzeros(self) -> int:
        return sum(len(r.coefs) for r in self.rows)

    def col(self, *key) -> int:
        return self.index[tuple(key)]

    def has(self, *key) -> bool:
        return tuple(key) in self.index

    def objective(self, x: Sequence[float]) -> float:
        return self.obj_const + sum(c * x[j] for j, c in self.obj.items())

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.vars:
            out[v.family] = out.get(v.family, 0) + 1
        out["vars"] = self.n_vars
        out["rows"] = self.n_rows
        out["binaries"] = sum(v.binary for v in self.vars)
        out["nonzeros"] = self.n_nonzeros
        return out

    def row_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.tag] = out.get(r.tag, 0) + 1
        return out

    def max_violation(self, x: Sequence[float]) -> float:
        worst = 0.0
        for r in self.rows:
            worst = max(worst, r.violation(x))
        for j, v in enumerate(self.vars):
            worst = max(worst, v.lo - x[j], x[j] - v.hi)
        return worst

    def violated_rows(self, x: Sequence[float], tol: float = FEAS_TOL) -> list[tuple[Row, float]]:
        return [(r, r.violation(x)) for r in self.rows if r.violation(x) > tol]

    def is_feasible(self, x: Sequence[float], tol: float = FEAS_TOL) -> bool:
        if self.max_violation(x) > tol:
            return False
        return all(abs(x[j] - round(x[j])) <= INT_TOL for j, v in enumerate(self.vars) if v.binary)

    def vessel_benefits(self, x: Sequence[float]) -> dict[str, float]:
        """Objective split by owning vessel (sequencing variables carry no cost)."""
        out: dict[str, float] = {}
        for j, c in self.obj.items():
            for vid in self.vars[j].vessels[:1]:
                out[vid] = out.get(vid, 0.0) + c * x[j]
        return out

    def with_bounds(self, bounds: Mapping[int, tuple[float, float]]) -> "MilpModel":
        vars_ = list(self.vars)
        for j, (lo, hi) in bounds.items():
            vars_[j] = replace(vars_[j], lo=lo, hi=hi)
        return MilpModel(vars_, self.rows, self.obj, self.big_m, self.obj_const, self.sense,
                         self.name, self.index)

    def relaxed(self) -> "MilpModel":
        vars_ = [replace(v, binary=False) if v.binary else v for v in self.vars]
        return MilpModel(vars_, self.rows, self.obj, self.big_m, self.obj_const, self.sense,
                         self.name, self.index)

    def vessels(self) -> list[str]:
        return sorted({v for var in self.vars for v in var.vessels})


# -- big-M constants ---------------------------------------------------------


def _load_hours(inst: Instance, vid: str, wid: str) -> float:
    return inst.window(wid).load_time_per_pallet_h * inst.cargo_pallets(vid)


def compute_big_m(net: ExpandedNetwork, inst: Instance) -> BigM:
    H = inst.horizon_h
    m1: dict[tuple[str, str, str], float] = {}
    m3: dict[str, float] = {}
    m4: dict[str, float] = {}
    for vid, vn in net.vessels.items():
        cargo = inst.draft_per_pallet_m * inst.cargo_pallets(vid)
        for a in vn.draft_arcs:
            cap = cargo
            if a.head.is_window:
                cap = min(cargo, vessel_window_draft_cap(inst, vid, a.head.window))  # type: ignore[arg-type]
            m1[(vid, *a.key)] = cap
        max_sail = max((a.sail_hours for a in vn.arcs), default=0.0)
        max_load = max((_load_hours(inst, vid, w) for w in vn.windows), default=0.0)
        m3[vid] = m4[vid] = H + max_sail + max_load
    m2 = {c.id: float(c.size_pallets) for c in inst.contracts}
    return BigM(m1, m2, m3, m4, float(H))


# -- construction ------------------------------------------------------------


class _Builder:
    def __init__(self) -> None:
        self.vars: list[Var] = []
        self.rows: list[Row] = []
        self.obj: dict[int, float] = {}
        self.index: dict[tuple, int] = {}

    def var(self, name: str, key: tuple, lo: float, hi: float, binary: bool,
            vessels: tuple[str, ...], cost: float = 0.0) -> int:
        j = len(self.vars)
        self.vars.append(Var(name, key, float(lo), float(hi), binary, vessels))
        self.index[key] = j
        if cost:
            self.obj[j] = self.obj.get(j, 0.0) + cost
        return j

    def cost(self, j: int, c: float) -> None:
        if c:
            self.obj[j] = self.obj.get(j, 0.0) + c

    def row(self, name: str, tag: str, terms: Iterable[tuple[int, float]], sense: str,
            rhs: float, vessels: tuple[str, ...]) -> None:
        acc: dict[int, float] = {}
        for j, a in terms:
            acc[j] = acc.get(j, 0.0) + a
        coefs = tuple((j, a) for j, a in sorted(acc.items()) if a != 0.0)
        assert math.isfinite(rhs), name
        self.rows.append(Row(name, tag, coefs, sense, float(rhs), vessels))


def _arc_name(a: ArcRef) -> str:
    return f"{a.tail.vessel},{a.tail.label}>{a.head.label}"


def build_model(net: ExpandedNetwork, inst: Instance | None = None,
                sequencing: bool = True) -> MilpModel:
    """Assemble objective and constraint families (2)-(14) over a (reduced) network."""
    inst = inst or net.inst
    bm = compute_big_m(net, inst)
    H = inst.horizon_h
    dp = inst.draft_per_pallet_m
    b = _Builder()

    for vid in sorted(net.vessels):
        vn = net.vessels[vid]
        v = inst.vessel(vid)
        contracts = inst.contracts_of(vid)
        own = (vid,)
        assert any(a.tail == vn.origin and a.head == vn.dest for a in vn.arcs), \
            f"vessel {vid} has no origin-destination arc"

        x = {a.key: b.var(f"x[{_arc_name(a)}]", ("x", vid, *a.key), 0, 1, True, own,
                          -v.fuel_rate * a.sail_hours) for a in vn.arcs}
        t = {n.label: b.var(f"t[{vid},{n.label}]", ("t", vid, n.label), 0, H, False, own)
             for n in vn.nodes}
        b.cost(t["O"], v.rent_rate)
        b.cost(t["D"], -v.rent_rate)
        d = {}
        for a in vn.draft_arcs:
            d[a.key] = b.var(f"d[{_arc_name(a)}]", ("d", vid, *a.key), 0, bm.m1[(vid, *a.key)],
                             False, own, -v.fuel_rate * a.sail_hours / v.light_draft_m)
        p = {}
        for n in vn.window_nodes:
            w = n.window
            for c in contracts:
                p[(w, c.id)] = b.var(f"p[{w},{c.id}]", ("p", w, c.id), 0, c.size_pallets, False, own,
                                     inst.income(c.id, w))  # type: ignore[arg-type]
        s = {c.id: b.var(f"s[{c.id}]", ("s", c.id), 0, c.size_pallets, False, own,
                         -c.compensation_per_pallet) for c in contracts}

        out_arcs: dict[str, list[ArcRef]] = {n.label: [] for n in vn.nodes}
        in_arcs: dict[str, list[ArcRef]] = {n.label: [] for n in vn.nodes}
        for a in vn.arcs:
            out_arcs[a.tail.label].append(a)
            in_arcs[a.head.label].append(a)

        # docking fee on every arc entering a window node
        for n in vn.window_nodes:
            fee = inst.fee(n.window, vid)  # type: ignore[arg-type]
            for a in in_arcs[n.label]:
                b.cost(x[a.key], -fee)

        # (2) contract balance
        for c in contracts:
            terms = [(p[(n.window, c.id)], 1.0) for n in vn.window_nodes]
            b.row(f"c2[{c.id}]", "(2)", terms + [(s[c.id], 1.0)], EQ, c.size_pallets, own)

        # (3) unit flow origin -> destination
        for n in vn.nodes:
            rhs = 1.0 if n.kind == ORIGIN else (-1.0 if n.kind == DEST else 0.0)
            terms = [(x[a.key], 1.0) for a in out_arcs[n.label]]
            terms += [(x[a.key], -1.0) for a in in_arcs[n.label]]
            b.row(f"c3[{vid},{n.label}]", "(3)", terms, EQ, rhs, own)

        # (4) draft balance on the draft subnetwork
        for n in vn.window_nodes:
            terms = [(d[a.key], 1.0) for a in out_arcs[n.label] if a.in_draft_subnet]
            terms += [(d[a.key], -1.0) for a in in_arcs[n.label] if a.in_draft_subnet]
            terms += [(p[(n.window, c.id)], -dp) for c in contracts]
            b.row(f"c4[{vid},{n.label}]", "(4)", terms, EQ, 0.0, own)
        terms = [(d[a.key], 1.0) for a in in_arcs["D"] if a.in_draft_subnet]
        terms += [(s[c.id], dp) for c in contracts]
        b.row(f"c4[{vid},D]", "(4)", terms, EQ, dp * sum(c.size_pallets for c in contracts), own)

        # (5) draft only on sailed arcs
        for a in vn.draft_arcs:
            b.row(f"c5[{_arc_name(a)}]", "(5)", [(d[a.key], 1.0), (x[a.key], -bm.m1[(vid, *a.key)])],
                  LE, 0.0, own)

        # (6) loading only where the vessel docks
        for n in vn.window_nodes:
            for c in contracts:
                terms = [(p[(n.window, c.id)], 1.0)]
                terms += [(x[a.key], -bm.m2[c.id]) for a in in_arcs[n.label]]
                b.row(f"c6[{n.window},{c.id}]", "(6)", terms, LE, 0.0, own)

        # (7) timing on arcs leaving the origin; (8) on arcs leaving a window
        for a in vn.arcs:
            i, j = a.tail.label, a.head.label
            if a.tail.kind == ORIGIN:
                M = bm.m3[vid]
                terms = [(t[j], 1.0), (t[i], -1.0), (x[a.key], -M)]
                b.row(f"c7[{_arc_name(a)}]", "(7)", terms, GE, a.sail_hours - M, own)
            elif a.tail.is_window:
                M = bm.m4[vid]
                w = inst.window(a.tail.window)  # type: ignore[arg-type]
                terms = [(t[j], 1.0), (t[i], -1.0), (x[a.key], -M)]
                terms += [(p[(a.tail.window, c.id)], -w.load_time_per_pallet_h) for c in contracts]
                b.row(f"c8[{_arc_name(a)}]", "(8)", terms, GE, a.sail_hours - M, own)

        for n in vn.window_nodes:
            w = inst.window(n.window)  # type: ignore[arg-type]
            load = [(p[(n.window, c.id)], w.load_time_per_pallet_h) for c in contracts]
            # (11) arrival draft plus new load within the berth's allowance
            terms = [(d[a.key], 1.0) for a in in_arcs[n.label] if a.in_draft_subnet]
            terms += [(p[(n.window, c.id)], dp) for c in contracts]
            b.row(f"c11[{vid},{n.label}]", "(11)", terms, LE,
                  vessel_window_draft_cap(inst, vid, n.window), own)  # type: ignore[arg-type]
            # (12)-(13) service inside the window
            terms = [(t[n.label], 1.0)] + [(x[a.key], -w.lower_h) for a in in_arcs[n.label]]
            b.row(f"c12[{vid},{n.label}]", "(12)", terms, GE, 0.0, own)
            b.row(f"c13[{vid},{n.label}]", "(13)", [(t[n.label], 1.0)] + load, LE, w.upper_h, own)

        # (14) due date at the destination
        b.row(f"c14[{vid}]", "(14)", [(t["D"], 1.0)], LE, inst.due_date(vid), own)

    if sequencing:
        _add_sequencing(b, net, inst, bm)

    return MilpModel(b.vars, b.rows, b.obj, bm, index=b.index)


def _add_sequencing(b: _Builder, net: ExpandedNetwork, inst: Instance, bm: BigM,
                    pairs: Iterable[tuple[str, str]] | None = None) -> None:
    vids = sorted(net.vessels)
    into: dict[tuple[str, str], list[int]] = {}
    for vid in vids:
        for arc in net.vessels[vid].arcs:
            if arc.head.is_window:
                into.setdefault((vid, arc.head.window), []).append(b.index[("x", vid, *arc.key)])  # type: ignore[arg-type]
    if pairs is None:
        pairs = [(a, c) for i, a in enumerate(vids) for c in vids[i + 1:]]
    for v1, v2 in pairs:
        shared = net.shared_windows(v1, v2)
        for w in shared:
            pair = (v1, v2)
            ys = {}
            for a, c in permutations(pair):
                ys[(a, c)] = b.var(f"y[{a},{c},{w}]", ("y", a, c, w), 0, 1, True, (a, c))
            win = inst.window(w)
            for a, c in permutations(pair):
                # (9) c starts after a finishes when a goes first
                terms = [(b.index[("t", c, w)], 1.0), (b.index[("t", a, w)], -1.0),
                         (ys[(a, c)], -bm.m5)]
                terms += [(b.index[("p", w, k.id)], -win.load_time_per_pallet_h)
                          for k in inst.contracts_of(a)]
                b.row(f"c9[{a},{c},{w}]", "(9)", terms, GE, -bm.m5, (a, c))
            # (10) both docking forces an order
            terms = [(j, 1.0) for vid in pair for j in into.get((vid, w), ())]
            terms += [(ys[(v1, v2)], -1.0), (ys[(v2, v1)], -1.0)]
            b.row(f"c10[{v1},{v2},{w}]", "(10)", terms, LE, 1.0, pair)


# -- model surgery -------------------------------------------------------------


def drop_sequencing(model: MilpModel, vessels: Iterable[str]) -> MilpModel:
    """Remove rows (9)-(10) touching any of the vessels, and the y variables they orphan."""
    drop = set(vessels)
    if not drop:
        return model
    rows = [r for r in model.rows
            if not (r.tag in SEQUENCING_TAGS and drop.intersection(r.vessels))]
    used = {j for r in rows for j, _ in r.coefs}
    keep = [j for j, v in enumerate(model.vars) if v.family != "y" or j in used]
    return _subset(model, keep, rows)


def drop_sequencing_within(model: MilpModel, vessels: Iterable[str]) -> MilpModel:
    """Remove rows (9)-(10) whose vessels all lie in the given set (pairs among fixed vessels)."""
    inner = set(vessels)
    rows = [r for r in model.rows
            if not (r.tag in SEQUENCING_TAGS and set(r.vessels) <= inner)]
    if len(rows) == len(model.rows):
        return model
    used = {j for r in rows for j, _ in r.coefs}
    keep = [j for j, v in enumerate(model.vars) if v.family != "y" or j in used]
    return _subset(model, keep, rows)


def restrict(model: MilpModel, vessels: Iterable[str]) -> MilpModel:
    """Sub-model over the given vessels: columns and rows owned only by them."""
    keepv = set(vessels)
    cols = [j for j, v in enumerate(model.vars) if set(v.vessels) <= keepv]
    colset = set(cols)
    rows = [r for r in model.rows if set(r.vessels) <= keepv]
    assert all(j in colset for r in rows for j, _ in r.coefs)
    return _subset(model, cols, rows)


def _subset(model: MilpModel, cols: list[int], rows: list[Row]) -> MilpModel:
    remap = {j: k for k, j in enumerate(cols)}
    vars_ = [model.vars[j] for j in cols]
    new_rows = [replace(r, coefs=tuple((remap[j], a) for j, a in r.coefs)) for r in rows]
    obj = {remap[j]: c for j, c in model.obj.items() if j in remap}
    return MilpModel(vars_, new_rows, obj, model.big_m, model.obj_const, model.sense, model.name)


def vessel_values(model: MilpModel, inst: Instance, vs: VesselSchedule,
                  shortfall: Mapping[str, float]) -> dict[int, float]:
    """Column values of one vessel's own variables (x, t, d, p, s) implied by its schedule."""
    vid = vs.vessel
    vals: dict[int, float] = {}
    for j, var in enumerate(model.vars):
        if var.vessels == (vid,):
            vals[j] = 0.0
    for a, c in vs.legs:
        key = ("x", vid, a, c)
        if key not in model.index:
            raise ScheduleMismatch(f"vessel {vid}: arc {a}>{c} is not in the model")
        vals[model.index[key]] = 1.0
    vals[model.index[("t", vid, "O")]] = vs.depart_h
    vals[model.index[("t", vid, "D")]] = vs.finish_h
    for dk in vs.dockings:
        key = ("t", vid, dk.window)
        if key not in model.index:
            raise ScheduleMismatch(f"vessel {vid}: window {dk.window} is not in the model")
        vals[model.index[key]] = dk.arrive_h
        for cid, q in dk.loads.items():
            pk = ("p", dk.window, cid)
            if pk not in model.index or model.vars[model.index[pk]].vessels != (vid,):
                raise ScheduleMismatch(f"vessel {vid}: no load variable for {cid} at {dk.window}")
            vals[model.index[pk]] = q
    for (a, c), q in vs.drafts.items():
        key = ("d", vid, a, c)
        if key not in model.index:
            if abs(q) > FEAS_TOL:
                raise ScheduleMismatch(f"vessel {vid}: draft on unknown arc {a}>{c}")
            continue
        vals[model.index[key]] = q
    for c in inst.contracts_of(vid):
        vals[model.index[("s", c.id)]] = shortfall[c.id]
    return vals


def fix_vessel(model: MilpModel, vessel: str, schedule: Schedule, inst: Instance,
               tol: float = FEAS_TOL) -> MilpModel:
    """Pin all of a vessel's own variables to its schedule; other vessels stay free."""
    vals = vessel_values(model, inst, schedule.vessels[vessel], schedule.shortfall)
    for j, val in vals.items():
        var = model.vars[j]
        if val < var.lo - tol or val > var.hi + tol:
            raise ScheduleMismatch(f"schedule/model mismatch: {var.name}={val:g} outside bounds")
    for r in model.rows:
        if r.vessels == (vessel,):
            lhs = sum(a * vals[j] for j, a in r.coefs)
            slack = (r.rhs - lhs) if r.sense == LE else (lhs - r.rhs) if r.sense == GE else -abs(lhs - r.rhs)
            scale = max(1.0, abs(r.rhs))
            if slack < -tol * scale:
                raise ScheduleMismatch(f"schedule/model mismatch: row {r.name} {r.tag} violated by {-slack:g}")
    bounds = {j: (min(max(val, model.vars[j].lo), model.vars[j].hi),) * 2 for j, val in vals.items()}
    return model.with_bounds(bounds)


def assignment_from_schedule(model: MilpModel, inst: Instance, schedule: Schedule) -> np.ndarray:
    """Full column vector for a schedule, including docking-order variables."""
    x = np.zeros(model.n_vars)
    for vid in model.vessels():
        if vid in schedule.vessels:
            for j, val in vessel_values(model, inst, schedule.vessels[vid], schedule.shortfall).items():
                x[j] = val
    for j, var in enumerate(model.vars):
        if var.family != "y":
            continue
        _, a, c, w = var.key
        order = schedule.orders.get(w)
        va, vc = schedule.vessels.get(a), schedule.vessels.get(c)
        if not (va and vc and w in va.windows and w in vc.windows):
            continue
        if order and a in order and c in order:
            x[j] = 1.0 if order.index(a) < order.index(c) else 0.0
        else:
            x[j] = 1.0 if (va.docking(w).arrive_h, a) < (vc.docking(w).arrive_h, c) else 0.0  # type: ignore[union-attr]
    return x


def idle_assignment(model: MilpModel, inst: Instance) -> np.ndarray:
    return assignment_from_schedule(model, inst, Schedule.idle(inst))


def extract_schedule(model: MilpModel, inst: Instance, x: Sequence[float],
                     tol: float = INT_TOL) -> Schedule:
    """Rebuild routes by following sailed arcs from each origin; copy times, loads, drafts."""
    x = np.asarray(x, dtype=float)
    for j, var in enumerate(model.vars):
        if var.binary and abs(x[j] - round(x[j])) > tol:
            raise ExtractionError(f"fractional binary {var.name}={x[j]:g}")
    vessels: dict[str, VesselSchedule] = {}
    shortfall: dict[str, float] = {}

    def val(*k) -> float:
        return float(x[model.index[k]])

    for vid in model.vessels():
        succ: dict[str, str] = {}
        used = 0
        for j, var in enumerate(model.vars):
            if var.key[0] == "x" and var.key[1] == vid and x[j] > 0.5:
                used += 1
                if var.key[2] in succ:
                    raise ExtractionError(f"disconnected x-arcs: {vid} leaves {var.key[2]} twice")
                succ[var.key[2]] = var.key[3]
        if not model.has("t", vid, "O"):
            continue
        route = ["O"]
        while route[-1] != "D":
            nxt = succ.get(route[-1])
            if nxt is None or nxt in route:
                raise ExtractionError(f"disconnected x-arcs for vessel {vid}")
            route.append(nxt)
        if used != len(route) - 1:
            raise ExtractionError(f"disconnected x-arcs for vessel {vid}: cycle off the route")
        dockings = []
        for w in route[1:-1]:
            loads = {c.id: _clean(val("p", w, c.id)) for c in inst.contracts_of(vid) if model.has("p", w, c.id)}
            dockings.append(Docking(w, _clean(val("t", vid, w)), {c: q for c, q in loads.items() if q > 0}))
        drafts = {}
        for a, c in zip(route[1:], route[2:]):
            if model.has("d", vid, a, c):
                drafts[(a, c)] = _clean(val("d", vid, a, c))
        vessels[vid] = VesselSchedule(vid, route, dockings, _clean(val("t", vid, "O")),
                                      _clean(val("t", vid, "D")), drafts)
        for c in inst.contracts_of(vid):
            shortfall[c.id] = _clean(val("s", c.id))
    sched = Schedule(vessels, shortfall, {})
    users: dict[str, list[str]] = {}
    for vid, vs in vessels.items():
        for w in vs.windows:
            users.setdefault(w, []).append(vid)
    for w, vs_ in sorted(users.items()):
        if len(vs_) < 2:
            continue

        def before(a: str, c: str) -> bool:
            if model.has("y", a, c, w) and model.has("y", c, a, w):
                ya, yc = val("y", a, c, w), val("y", c, a, w)
                if ya > 0.5 and yc < 0.5:
                    return True
                if yc > 0.5 and ya < 0.5:
                    return False
            return (vessels[a].docking(w).arrive_h, a) < (vessels[c].docking(w).arrive_h, c)  # type: ignore[union-attr]

        order: list[str] = []
        for vid in sorted(vs_):
            k = 0
            while k < len(order) and before(order[k], vid):
                k += 1
            order.insert(k, vid)
        sched.orders[w] = order
    return sched


def _clean(v: float) -> float:
    r = round(v)
    if abs(v - r) <= 1e-9:
        return float(r)
    return float(v)
