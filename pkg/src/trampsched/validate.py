"""Solver-independent schedule checks, objective recomputation and a brute-force oracle.

Every check works from instance data and the schedule alone; nothing here
looks at the MILP. Violations carry the tag of the constraint family they
correspond to and a slack in natural units (hours, meters, pallets).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .instance import Instance, vessel_window_draft_cap
from .mip.lp import OPTIMAL, LpData, solve_lp
from .schedule import Docking, Schedule, VesselSchedule

TOL = 1e-6
FAMILIES = tuple(f"({k})" for k in range(2, 15))


@dataclass(frozen=True)
class ScheduleViolation:
    family: str
    entity: str
    message: str
    slack: float

    def __str__(self) -> str:
        return f"{self.family} {self.entity}: {self.message} (slack {self.slack:.6g})"


@dataclass
class ValidationReport:
    violations: list[ScheduleViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.family for v in self.violations}

    def add(self, family: str, entity: str, message: str, slack: float) -> None:
        self.violations.append(ScheduleViolation(family, entity, message, float(slack)))

    def to_json(self) -> str:
        doc = {"ok": self.ok, "violations": [v.__dict__ for v in self.violations]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


class InfeasibleSchedule(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations[:5]))


def _cumulative_drafts(inst: Instance, vs: VesselSchedule) -> list[float]:
    """Draft increase on board after loading at each docking, in route order."""
    out, acc = [], 0.0
    for dk in vs.dockings:
        acc += inst.draft_per_pallet_m * dk.pallets
        out.append(acc)
    return out


def _port_of(inst: Instance, vid: str, label: str) -> str:
    if label == "O":
        return inst.vessel(vid).origin_port
    if label == "D":
        return inst.destination_port(vid)
    return inst.window_port(label)


def check_schedule(inst: Instance, schedule: Schedule, tol: float = TOL) -> ValidationReport:
    rep = ValidationReport()
    H = inst.horizon_h
    dp = inst.draft_per_pallet_m
    windows = {w.id for w in inst.windows}

    # (2) contract balance
    for c in inst.contracts:
        if c.id not in schedule.shortfall:
            rep.add("(2)", c.id, "shortfall missing", -c.size_pallets)
            continue
        s = schedule.shortfall[c.id]
        if s < -tol or s > c.size_pallets + tol:
            rep.add("(2)", c.id, "shortfall outside [0, g]", min(s, c.size_pallets - s))
        loaded = schedule.loads_of(c.id)
        gap = loaded + s - c.size_pallets
        if abs(gap) > tol:
            rep.add("(2)", c.id, "loads plus shortfall differ from contract size", -abs(gap))

    timed: dict[str, list[tuple[str, float, float]]] = {}  # window -> (vessel, start, end)
    for v in inst.vessels:
        vid = v.id
        vs = schedule.vessels.get(vid)
        if vs is None:
            rep.add("(3)", vid, "vessel missing from schedule", -1)
            continue
        own = {c.id for c in inst.contracts_of(vid)}
        route = vs.route
        # (3) route structure
        if len(route) < 2 or route[0] != "O" or route[-1] != "D":
            rep.add("(3)", vid, "route must run from O to D", -1)
            continue
        wins = route[1:-1]
        bad = [w for w in wins if w not in windows or w in ("O", "D")]
        if bad:
            rep.add("(3)", vid, f"route visits unknown nodes {bad}", -1)
            continue
        if len(set(wins)) != len(wins):
            rep.add("(3)", vid, "route revisits a window node", -1)
            continue
        access = set(inst.accessible_windows(vid))
        if not set(wins) <= access:
            rep.add("(3)", vid, f"windows not accessible: {sorted(set(wins) - access)}", -1)
            continue
        dock_w = [d.window for d in vs.dockings]
        # (6) loading only where the vessel docks
        stray = [d for d in vs.dockings if d.window not in wins]
        for d in stray:
            rep.add("(6)", f"{vid}@{d.window}", "loads at a window off the route", -d.pallets)
        for d in vs.dockings:
            for cid, q in d.loads.items():
                if cid not in own:
                    rep.add("(6)", f"{vid}@{d.window}", f"loads contract {cid} of another vessel", -q)
                if q < -tol:
                    rep.add("(2)", f"{vid}@{d.window}", f"negative load of {cid}", q)
        on_route = [d for d in vs.dockings if d.window in wins]
        if [d.window for d in on_route] != wins:
            missing = [w for w in wins if w not in dock_w]
            rep.add("(3)", vid, f"dockings do not follow the route (missing {missing})", -1)
            continue
        vs_ok = VesselSchedule(vid, route, on_route, vs.depart_h, vs.finish_h, vs.drafts)

        # time bounds of the model variables
        for label, t in [("O", vs.depart_h), ("D", vs.finish_h)] + [(d.window, d.arrive_h) for d in on_route]:
            if t < -tol or t > H + tol:
                rep.add("bounds", f"{vid}@{label}", "time outside [0, horizon]", min(t, H - t))

        times = {"O": vs.depart_h, "D": vs.finish_h}
        loads = {"O": 0.0, "D": 0.0}
        for d in on_route:
            times[d.window] = d.arrive_h
            loads[d.window] = d.pallets
        # (7)/(8) time propagation along the route
        for a, b in vs_ok.legs:
            pi = inst.sail(_port_of(inst, vid, a), _port_of(inst, vid, b))
            if a == "O":
                need = times["O"] + pi
                fam = "(7)"
            else:
                need = times[a] + inst.window(a).load_time_per_pallet_h * loads[a] + pi
                fam = "(8)"
            if times[b] < need - tol:
                rep.add(fam, f"{vid}:{a}>{b}", "arrival before departure plus sailing", times[b] - need)

        # (4)/(5) recorded drafts match the cumulative load
        cum = dict(zip(wins, _cumulative_drafts(inst, vs_ok)))
        legs = set(vs_ok.legs)
        for (a, b), q in vs.drafts.items():
            if (a, b) not in legs:
                if abs(q) > tol:
                    rep.add("(5)", f"{vid}:{a}>{b}", "draft on a leg that is not sailed", -abs(q))
                continue
            if a == "O":
                if abs(q) > tol:
                    rep.add("(5)", f"{vid}:{a}>{b}", "draft on a leg outside the draft subnetwork", -abs(q))
                continue
            if abs(q - cum[a]) > tol:
                rep.add("(4)", f"{vid}:{a}>{b}", "draft differs from cumulative load", -abs(q - cum[a]))

        for d in on_route:
            w = inst.window(d.window)
            # (11) draft allowance
            cap = vessel_window_draft_cap(inst, vid, d.window)
            if cum[d.window] > cap + tol:
                rep.add("(11)", f"{vid}@{d.window}", "draft exceeds berth allowance", cap - cum[d.window])
            # (12)/(13) window bounds
            if d.arrive_h < w.lower_h - tol:
                rep.add("(12)", f"{vid}@{d.window}", "arrival before window opens", d.arrive_h - w.lower_h)
            end = d.arrive_h + w.load_time_per_pallet_h * d.pallets
            if end > w.upper_h + tol:
                rep.add("(13)", f"{vid}@{d.window}", "loading ends after window closes", w.upper_h - end)
            timed.setdefault(d.window, []).append((vid, d.arrive_h, end))

        # (14) due date
        due = inst.due_date(vid)
        if vs.finish_h > due + tol:
            rep.add("(14)", vid, "arrival at destination after due date", due - vs.finish_h)

    # (9)/(10) sequencing at shared windows
    for w, users in sorted(timed.items()):
        if len(users) < 2:
            continue
        given = schedule.orders.get(w)
        if given is not None:
            absent = sorted({u[0] for u in users} - set(given))
            if absent:
                rep.add("(10)", w, f"docking order omits {absent}", -1)
                continue
            rank = {vid: k for k, vid in enumerate(given)}
        else:
            rank = {vid: k for k, (vid, _, _) in enumerate(sorted(users, key=lambda u: (u[1], u[0])))}
        users = sorted(users, key=lambda u: rank[u[0]])
        for (va, sa, ea), (vc, sc, _) in itertools.combinations(users, 2):
            if sc < ea - tol:
                rep.add("(9)", f"{w}:{va}<{vc}", "service intervals overlap", sc - ea)
    return rep


def objective_terms(inst: Instance, schedule: Schedule) -> dict[str, dict[str, float]]:
    """Per-vessel split of the six objective terms (income positive, costs negative)."""
    out: dict[str, dict[str, float]] = {}
    dp = inst.draft_per_pallet_m
    for v in inst.vessels:
        vs = schedule.vessels[v.id]
        income = sum(inst.income(c, d.window) * q for d in vs.dockings for c, q in d.loads.items())
        fees = sum(inst.fee(w, v.id) for w in vs.windows)
        rent = v.rent_rate * (vs.finish_h - vs.depart_h)
        fuel = 0.0
        draft_fuel = 0.0
        load = {d.window: d.pallets for d in vs.dockings}
        acc = 0.0
        for a, b in vs.legs:
            pi = inst.sail(_port_of(inst, v.id, a), _port_of(inst, v.id, b))
            fuel += v.fuel_rate * pi
            if a != "O":
                acc += dp * load.get(a, 0.0)
                draft_fuel += v.fuel_rate * pi * acc / v.light_draft_m
        comp = sum(c.compensation_per_pallet * schedule.shortfall[c.id] for c in inst.contracts_of(v.id))
        out[v.id] = {"income": income, "fees": -fees, "rent": -rent, "fuel": -fuel,
                     "draft_fuel": -draft_fuel, "compensation": -comp}
    return out


def vessel_benefits(inst: Instance, schedule: Schedule) -> dict[str, float]:
    return {vid: sum(t.values()) for vid, t in objective_terms(inst, schedule).items()}


def objective_recompute(inst: Instance, schedule: Schedule, check: bool = True) -> float:
    if check:
        rep = check_schedule(inst, schedule)
        if not rep.ok:
            raise InfeasibleSchedule(rep)
    return float(sum(vessel_benefits(inst, schedule).values()))


# -- brute-force oracle ----------------------------------------------------------


@dataclass(frozen=True)
class OracleLimits:
    max_vessels: int = 2
    max_windows: int = 4  # accessible windows per vessel
    max_shared: int = 2  # windows accessible to more than one vessel


class LimitsExceeded(ValueError):
    pass


def _routes(windows: tuple[str, ...]) -> list[tuple[str, ...]]:
    out = []
    for k in range(len(windows) + 1):
        out.extend(itertools.permutations(windows, k))
    return out


class _ResidualLp:
    """LP over (t, p, s) for fixed routes and fixed docking orders."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.n = 0
        self.c: list[float] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.rows: list[tuple[dict[int, float], float, float]] = []
        self.const = 0.0

    def var(self, lo: float, hi: float, cost: float = 0.0) -> int:
        self.c.append(cost)
        self.lb.append(lo)
        self.ub.append(hi)
        self.n += 1
        return self.n - 1

    def row(self, terms: dict[int, float], lo: float, hi: float) -> None:
        self.rows.append((terms, lo, hi))

    def add_vessel(self, vid: str, route: tuple[str, ...]) -> dict:
        inst = self.inst
        v = inst.vessel(vid)
        H = inst.horizon_h
        dp = inst.draft_per_pallet_m
        contracts = inst.contracts_of(vid)
        nodes = ("O",) + route + ("D",)
        t = {n: self.var(0.0, H) for n in nodes}
        self.c[t["O"]] += v.rent_rate
        self.c[t["D"]] -= v.rent_rate
        p = {(w, c.id): self.var(0.0, c.size_pallets, inst.income(c.id, w)) for w in route for c in contracts}
        s = {c.id: self.var(0.0, c.size_pallets, -c.compensation_per_pallet) for c in contracts}
        for c in contracts:
            terms = {p[(w, c.id)]: 1.0 for w in route}
            terms[s[c.id]] = 1.0
            self.row(terms, c.size_pallets, c.size_pallets)
        self.const -= sum(inst.fee(w, vid) for w in route)
        cum: dict[int, float] = {}
        for a, b in zip(nodes, nodes[1:]):
            pi = inst.sail(_port_of(inst, vid, a), _port_of(inst, vid, b))
            self.const -= v.fuel_rate * pi
            terms = {t[b]: 1.0, t[a]: -1.0}
            if a != "O":
                win = inst.window(a)
                for c in contracts:
                    j = p[(a, c.id)]
                    terms[j] = -win.load_time_per_pallet_h
                    cum[j] = dp
                # fuel for the draft carried on this leg
                for j, coef in cum.items():
                    self.c[j] -= v.fuel_rate * pi * coef / v.light_draft_m
            self.row(terms, pi, np.inf)
            if b != "D":
                win = inst.window(b)
                cap = vessel_window_draft_cap(inst, vid, b)
                after = dict(cum)
                for c in contracts:
                    after[p[(b, c.id)]] = dp
                self.row(after, -np.inf, cap)
                self.lb[t[b]] = max(self.lb[t[b]], win.lower_h)
                terms = {t[b]: 1.0}
                for c in contracts:
                    terms[p[(b, c.id)]] = win.load_time_per_pallet_h
                self.row(terms, -np.inf, win.upper_h)
        self.ub[t["D"]] = min(H, inst.due_date(vid))
        return {"t": t, "p": p, "s": s, "route": nodes}

    def precede(self, a: dict, c: dict, w: str, vid_a: str) -> None:
        """Vessel a finishes loading at w before c starts."""
        win = self.inst.window(w)
        terms = {c["t"][w]: 1.0, a["t"][w]: -1.0}
        for k in self.inst.contracts_of(vid_a):
            terms[a["p"][(w, k.id)]] = -win.load_time_per_pallet_h
        self.row(terms, 0.0, np.inf)

    def solve(self):
        m = len(self.rows)
        r, cidx, vals = [], [], []
        lo = np.empty(m)
        hi = np.empty(m)
        for i, (terms, a, b) in enumerate(self.rows):
            for j, coef in terms.items():
                r.append(i)
                cidx.append(j)
                vals.append(coef)
            lo[i], hi[i] = a, b
        data = LpData(np.array(self.c), sp.csr_matrix((vals, (r, cidx)), shape=(m, self.n)), lo, hi,
                      np.array(self.lb), np.array(self.ub), np.zeros(self.n, dtype=bool), self.const)
        if np.any(data.lb > data.ub + 1e-12):
            return None
        res = solve_lp(data, engine="highs")
        if res.status != OPTIMAL:
            return None
        return res


def _schedule_from(inst: Instance, parts: dict[str, dict], x: np.ndarray) -> Schedule:
    vessels, shortfall = {}, {}
    dp = inst.draft_per_pallet_m
    for vid, part in parts.items():
        nodes = part["route"]
        docks = []
        drafts = {}
        acc = 0.0
        for w in nodes[1:-1]:
            loads = {}
            for c in inst.contracts_of(vid):
                q = float(x[part["p"][(w, c.id)]])
                if q > 1e-9:
                    loads[c.id] = q
            docks.append(Docking(w, float(x[part["t"][w]]), loads))
        for dk, b in zip(docks, list(nodes[2:])):
            acc += dp * dk.pallets
            drafts[(dk.window, b)] = acc
        vessels[vid] = VesselSchedule(vid, list(nodes), docks, float(x[part["t"]["O"]]),
                                      float(x[part["t"]["D"]]), drafts)
        for c in inst.contracts_of(vid):
            shortfall[c.id] = max(0.0, float(x[part["s"][c.id]]))
    sched = Schedule(vessels, shortfall, {})
    return sched


def _solve_combo(inst: Instance, combo: dict[str, tuple[str, ...]],
                 orders: dict[str, tuple[str, ...]]):
    lp = _ResidualLp(inst)
    parts = {vid: lp.add_vessel(vid, r) for vid, r in combo.items()}
    for w, order in orders.items():
        for a, c in zip(order, order[1:]):
            lp.precede(parts[a], parts[c], w, a)
    res = lp.solve()
    if res is None:
        return None
    sched = _schedule_from(inst, parts, res.x)
    if orders:
        sched.orders = {w: list(o) for w, o in orders.items()}
    return res.value, sched


def _better(a: float, b: float) -> bool:
    return b == -np.inf or a > b + 1e-9 * max(1.0, abs(b))


def brute_force_optimum(inst: Instance, limits: OracleLimits | None = None) -> tuple[float, Schedule]:
    """Enumerate routes and docking orders; best residual LP value and its schedule."""
    lim = limits or OracleLimits()
    vids = [v.id for v in inst.vessels]
    if len(vids) > lim.max_vessels:
        raise LimitsExceeded(f"{len(vids)} vessels > {lim.max_vessels}")
    access = {vid: inst.accessible_windows(vid) for vid in vids}
    for vid, ws in access.items():
        if len(ws) > lim.max_windows:
            raise LimitsExceeded(f"vessel {vid} has {len(ws)} windows > {lim.max_windows}")
    counts: dict[str, int] = {}
    for ws in access.values():
        for w in ws:
            counts[w] = counts.get(w, 0) + 1
    shared = [w for w, k in counts.items() if k > 1]
    if len(shared) > lim.max_shared:
        raise LimitsExceeded(f"{len(shared)} shared windows > {lim.max_shared}")

    # stand-alone optimum of every route of every vessel
    single: dict[str, list[tuple[float, tuple[str, ...], Schedule]]] = {}
    for vid in vids:
        rows = []
        for r in _routes(access[vid]):
            got = _solve_combo(inst, {vid: r}, {})
            if got is not None:
                rows.append((got[0], r, got[1]))
        rows.sort(key=lambda e: (-e[0], e[1]))
        single[vid] = rows
        if not rows:
            raise ValueError(f"vessel {vid} has no feasible route")

    combos = []
    for pick in itertools.product(*(single[v] for v in vids)):
        combos.append((sum(e[0] for e in pick), pick))
    combos.sort(key=lambda e: (-e[0], tuple(p[1] for p in e[1])))

    best_val = -np.inf
    best: Schedule | None = None
    for bound, pick in combos:
        if not _better(bound, best_val):
            break
        combo = {vid: e[1] for vid, e in zip(vids, pick)}
        users: dict[str, list[str]] = {}
        for vid, r in combo.items():
            for w in r:
                users.setdefault(w, []).append(vid)
        clash = {w: u for w, u in sorted(users.items()) if len(u) > 1}
        if not clash:
            val = bound
            sched = Schedule({k: v for e in pick for k, v in e[2].vessels.items()},
                             {k: v for e in pick for k, v in e[2].shortfall.items()}, {})
            if _better(val, best_val):
                best_val, best = val, sched
            continue
        for perms in itertools.product(*(itertools.permutations(u) for u in clash.values())):
            orders = dict(zip(clash.keys(), perms))
            got = _solve_combo(inst, combo, orders)
            if got is not None and _better(got[0], best_val):
                best_val, best = got
    assert best is not None
    return float(best_val), best


def count_orders(inst: Instance, combo: dict[str, tuple[str, ...]]) -> int:
    """Number of docking-order patterns the oracle enumerates for one joint route choice."""
    users: dict[str, int] = {}
    for r in combo.values():
        for w in r:
            users[w] = users.get(w, 0) + 1
    n = 1
    for k in users.values():
        n *= int(np.prod(range(1, k + 1)))
    return n
