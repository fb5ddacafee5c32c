"""Schedule: the solution artifact exchanged between solver, heuristic, validator and CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .instance import Instance


@dataclass
class Docking:
    window: str
    arrive_h: float
    loads: dict[str, float] = field(default_factory=dict)

    @property
    def pallets(self) -> float:
        return sum(self.loads.values())


@dataclass
class VesselSchedule:
    vessel: str
    route: list[str]  # node labels: "O", window ids..., "D"
    dockings: list[Docking] = field(default_factory=list)
    depart_h: float = 0.0
    finish_h: float = 0.0
    # draft increase carried on legs that leave a window, keyed by (tail, head) labels
    drafts: dict[tuple[str, str], float] = field(default_factory=dict)

    @property
    def windows(self) -> list[str]:
        return self.route[1:-1]

    @property
    def legs(self) -> list[tuple[str, str]]:
        return list(zip(self.route, self.route[1:]))

    @property
    def pallets(self) -> float:
        return sum(d.pallets for d in self.dockings)

    def docking(self, window: str) -> Docking | None:
        for d in self.dockings:
            if d.window == window:
                return d
        return None

    def loading_hours(self, inst: Instance, window: str) -> float:
        d = self.docking(window)
        if d is None:
            return 0.0
        return inst.window(window).load_time_per_pallet_h * d.pallets

    @classmethod
    def idle(cls, inst: Instance, vessel: str, depart_h: float = 0.0) -> "VesselSchedule":
        v = inst.vessel(vessel)
        sail = inst.sail(v.origin_port, inst.destination_port(vessel))
        # leave as late as the due date allows so the rented time is just the crossing
        depart = max(depart_h, inst.due_date(vessel) - sail) if inst.contracts_of(vessel) else depart_h
        return cls(vessel, ["O", "D"], [], max(0.0, depart), max(0.0, depart) + sail, {})


@dataclass
class Schedule:
    vessels: dict[str, VesselSchedule]
    shortfall: dict[str, float]
    orders: dict[str, list[str]] = field(default_factory=dict)

    @classmethod
    def idle(cls, inst: Instance) -> "Schedule":
        return cls(
            {v.id: VesselSchedule.idle(inst, v.id) for v in inst.vessels},
            {c.id: float(c.size_pallets) for c in inst.contracts},
            {},
        )

    def loads_of(self, contract: str) -> float:
        return sum(d.loads.get(contract, 0.0) for vs in self.vessels.values() for d in vs.dockings)

    def recompute_orders(self) -> None:
        """Order vessels per window by arrival time (ties by vessel id)."""
        users: dict[str, list[tuple[float, str]]] = {}
        for vs in self.vessels.values():
            for d in vs.dockings:
                if d.window in vs.windows:
                    users.setdefault(d.window, []).append((d.arrive_h, vs.vessel))
        self.orders = {w: [v for _, v in sorted(u)] for w, u in sorted(users.items()) if len(u) > 1}

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        vessels = {}
        for vid in sorted(self.vessels):
            vs = self.vessels[vid]
            vessels[vid] = {
                "route": list(vs.route),
                "depart_h": vs.depart_h,
                "finish_h": vs.finish_h,
                "dockings": [
                    {"window": d.window, "arrive_h": d.arrive_h,
                     "loads": {c: d.loads[c] for c in sorted(d.loads)}}
                    for d in vs.dockings
                ],
                "drafts": [{"from": a, "to": b, "draft_m": val}
                           for (a, b), val in sorted(vs.drafts.items())],
            }
        return {
            "vessels": vessels,
            "shortfall": {c: self.shortfall[c] for c in sorted(self.shortfall)},
            "orders": {w: list(self.orders[w]) for w in sorted(self.orders)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Schedule":
        vessels = {}
        for vid, d in doc["vessels"].items():
            vessels[vid] = VesselSchedule(
                vessel=vid,
                route=list(d["route"]),
                dockings=[Docking(k["window"], float(k["arrive_h"]),
                                  {c: float(p) for c, p in k.get("loads", {}).items()})
                          for k in d.get("dockings", [])],
                depart_h=float(d.get("depart_h", 0.0)),
                finish_h=float(d.get("finish_h", 0.0)),
                drafts={(e["from"], e["to"]): float(e["draft_m"]) for e in d.get("drafts", [])},
            )
        return cls(
            vessels,
            {c: float(v) for c, v in doc.get("shortfall", {}).items()},
            {w: list(vs) for w, vs in doc.get("orders", {}).items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def take_vessels(base: Schedule, other: Schedule, inst: Instance, vessels: set[str]) -> Schedule:
    """Schedule equal to base except that the given vessels follow other."""
    vs = dict(base.vessels)
    sf = dict(base.shortfall)
    for vid in vessels:
        vs[vid] = other.vessels[vid]
        for c in inst.contracts_of(vid):
            sf[c.id] = other.shortfall[c.id]
    out = Schedule(vs, sf, {})
    out.recompute_orders()
    return out


@dataclass(frozen=True)
class DockStats:
    """Table-4 style summary of one schedule."""

    avg_docks: float
    max_docks: int
    avg_used_capacity: float  # fraction
    cargo_satisfied: float  # fraction

    def row(self) -> str:
        return (f"{self.avg_docks:.1f} - {self.max_docks}  "
                f"{100 * self.avg_used_capacity:.0f}%  {100 * self.cargo_satisfied:.0f}%")


def dock_stats(inst: Instance, sched: Schedule) -> DockStats:
    docks = [len(sched.vessels[v.id].windows) for v in inst.vessels]
    used = [sched.vessels[v.id].pallets / v.capacity_pallets for v in inst.vessels]
    total = sum(c.size_pallets for c in inst.contracts)
    carried = sum(c.size_pallets - sched.shortfall.get(c.id, c.size_pallets) for c in inst.contracts)
    n = max(1, len(inst.vessels))
    return DockStats(
        avg_docks=sum(docks) / n,
        max_docks=max(docks, default=0),
        avg_used_capacity=sum(used) / n,
        cargo_satisfied=carried / total if total else 0.0,
    )
