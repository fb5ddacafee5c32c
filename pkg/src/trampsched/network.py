"""Per-vessel expanded berth-node network and time-window reduction."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .instance import Instance

ORIGIN = "origin"
WINDOW = "window"
DEST = "dest"


@dataclass(frozen=True, order=True)
class NodeRef:
    kind: str
    vessel: str
    window: str | None = None

    @property
    def label(self) -> str:
        if self.kind == ORIGIN:
            return "O"
        if self.kind == DEST:
            return "D"
        return str(self.window)

    @property
    def is_window(self) -> bool:
        return self.kind == WINDOW

    def __str__(self) -> str:
        return f"{self.vessel}:{self.label}"


@dataclass(frozen=True)
class ArcRef:
    tail: NodeRef
    head: NodeRef
    sail_hours: float

    @property
    def in_draft_subnet(self) -> bool:
        return self.tail.is_window and self.head.kind in (WINDOW, DEST)

    @property
    def key(self) -> tuple[str, str]:
        return (self.tail.label, self.head.label)

    def __str__(self) -> str:
        return f"{self.tail.vessel}:{self.tail.label}>{self.head.label}"


@dataclass(frozen=True)
class VesselNetwork:
    vessel: str
    nodes: tuple[NodeRef, ...]
    arcs: tuple[ArcRef, ...]

    @property
    def origin(self) -> NodeRef:
        return NodeRef(ORIGIN, self.vessel)

    @property
    def dest(self) -> NodeRef:
        return NodeRef(DEST, self.vessel)

    @property
    def window_nodes(self) -> tuple[NodeRef, ...]:
        return tuple(n for n in self.nodes if n.is_window)

    @property
    def windows(self) -> tuple[str, ...]:
        return tuple(n.window for n in self.nodes if n.is_window)  # type: ignore[misc]

    @property
    def draft_arcs(self) -> tuple[ArcRef, ...]:
        return tuple(a for a in self.arcs if a.in_draft_subnet)

    def successors(self, node: NodeRef) -> list[ArcRef]:
        return [a for a in self.arcs if a.tail == node]

    def predecessors(self, node: NodeRef) -> list[ArcRef]:
        return [a for a in self.arcs if a.head == node]

    def window_node(self, wid: str) -> NodeRef:
        return NodeRef(WINDOW, self.vessel, wid)

    def arc(self, tail: str, head: str) -> ArcRef | None:
        for a in self.arcs:
            if a.key == (tail, head):
                return a
        return None


@dataclass(frozen=True)
class ExpandedNetwork:
    inst: Instance = field(repr=False)
    vessels: dict[str, VesselNetwork]

    def __getitem__(self, vid: str) -> VesselNetwork:
        return self.vessels[vid]

    def shared_windows(self, v1: str, v2: str) -> tuple[str, ...]:
        """Windows present in both vessels' networks (W^{v1,v2})."""
        a = set(self.vessels[v1].windows)
        return tuple(w for w in self.vessels[v2].windows if w in a)

    def shared_index(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out = {}
        for v1, v2 in combinations(sorted(self.vessels), 2):
            ws = self.shared_windows(v1, v2)
            if ws:
                out[(v1, v2)] = ws
        return out

    def counts(self) -> dict[str, int]:
        return {
            "nodes": sum(len(n.nodes) for n in self.vessels.values()),
            "arcs": sum(len(n.arcs) for n in self.vessels.values()),
            "draft_arcs": sum(len(n.draft_arcs) for n in self.vessels.values()),
        }


def _node_port(inst: Instance, node: NodeRef) -> str:
    if node.kind == ORIGIN:
        return inst.vessel(node.vessel).origin_port
    if node.kind == DEST:
        return inst.destination_port(node.vessel)
    return inst.window_port(node.window)  # type: ignore[arg-type]


def build(inst: Instance) -> ExpandedNetwork:
    vessels = {}
    for v in inst.vessels:
        o = NodeRef(ORIGIN, v.id)
        d = NodeRef(DEST, v.id)
        wins = [NodeRef(WINDOW, v.id, w) for w in inst.accessible_windows(v.id)]

        def arc(a: NodeRef, b: NodeRef) -> ArcRef:
            return ArcRef(a, b, inst.sail(_node_port(inst, a), _node_port(inst, b)))

        arcs = [arc(o, w) for w in wins]
        arcs += [arc(a, b) for a in wins for b in wins if a != b]
        arcs += [arc(w, d) for w in wins]
        arcs.append(arc(o, d))
        vessels[v.id] = VesselNetwork(v.id, (o, *wins, d), tuple(arcs))
    return ExpandedNetwork(inst, vessels)


def _earliest(inst: Instance, vnet: VesselNetwork) -> dict[NodeRef, float]:
    """Earliest arrival per node: sail times plus waiting for window openings, no loading."""
    succ: dict[NodeRef, list[ArcRef]] = {n: [] for n in vnet.nodes}
    for a in vnet.arcs:
        succ[a.tail].append(a)
    best = {n: math.inf for n in vnet.nodes}
    best[vnet.origin] = 0.0
    heap = [(0.0, vnet.origin)]
    while heap:
        t, node = heapq.heappop(heap)
        if t > best[node]:
            continue
        dep = t
        if node.is_window:
            dep = max(t, inst.window(node.window).lower_h)  # type: ignore[arg-type]
        elif node.kind == DEST:
            continue
        for a in succ[node]:
            arr = dep + a.sail_hours
            if arr < best[a.head]:
                best[a.head] = arr
                heapq.heappush(heap, (arr, a.head))
    return best


def earliest_arrival(net: ExpandedNetwork, vessel: str, node: NodeRef | str) -> float:
    vnet = net[vessel]
    if isinstance(node, str):
        node = {"O": vnet.origin, "D": vnet.dest}.get(node, vnet.window_node(node))
    times = _earliest(net.inst, vnet)
    return times.get(node, math.inf)


def earliest_departure(inst: Instance, node: NodeRef, arrival: float) -> float:
    if node.is_window:
        return max(arrival, inst.window(node.window).lower_h)  # type: ignore[arg-type]
    return arrival


@dataclass(frozen=True)
class Removal:
    rule: str
    vessel: str
    item: str  # "V1:W3" for a node, "V1:W2>W3" for an arc
    detail: str = ""

    def to_dict(self) -> dict:
        return {"rule": self.rule, "vessel": self.vessel, "item": self.item, "detail": self.detail}


@dataclass
class ReductionReport:
    removals: list[Removal] = field(default_factory=list)
    rounds: int = 0

    @property
    def arcs_removed(self) -> int:
        return sum(1 for r in self.removals if ">" in r.item)

    @property
    def nodes_removed(self) -> int:
        return sum(1 for r in self.removals if ">" not in r.item)

    def to_json(self) -> str:
        return json.dumps({"rounds": self.rounds, "removals": [r.to_dict() for r in self.removals]},
                          indent=2, sort_keys=True)


# Rule identifiers used in reports.
RULE_LATE_ARC = "late-arrival"        # no time left to load min_pallets after arriving over the arc
RULE_SERVICE = "window-service"       # even the earliest arrival leaves too little service time
RULE_UNREACHABLE = "unreachable"      # window lost all incoming arcs
RULE_CASCADE = "node-removed"         # arc incident to a removed node


def reduce(net: ExpandedNetwork, inst: Instance | None = None,
           min_pallets: float = 1.0) -> tuple[ExpandedNetwork, ReductionReport]:
    """Drop window nodes and arcs that cannot be used, iterating to a fixed point."""
    inst = inst or net.inst
    report = ReductionReport()
    out = {}
    for vid, vnet in net.vessels.items():
        nodes = list(vnet.nodes)
        arcs = list(vnet.arcs)
        while True:
            report.rounds += 1
            cur = VesselNetwork(vid, tuple(nodes), tuple(arcs))
            ea = _earliest(inst, cur)
            dead: set[NodeRef] = set()
            for n in cur.window_nodes:
                w = inst.window(n.window)  # type: ignore[arg-type]
                if math.isinf(ea[n]):
                    dead.add(n)
                    report.removals.append(Removal(RULE_UNREACHABLE, vid, str(n)))
                elif ea[n] >= w.upper_h - w.load_time_per_pallet_h * min_pallets:
                    dead.add(n)
                    report.removals.append(Removal(
                        RULE_SERVICE, vid, str(n),
                        f"earliest arrival {ea[n]:g} leaves < {min_pallets:g} pallet(s) before {w.upper_h:g}"))
            keep = []
            for a in arcs:
                if a.tail in dead or a.head in dead:
                    report.removals.append(Removal(RULE_CASCADE, vid, str(a)))
                    continue
                if a.head.is_window:
                    w = inst.window(a.head.window)  # type: ignore[arg-type]
                    arr = earliest_departure(inst, a.tail, ea[a.tail]) + a.sail_hours
                    if arr >= w.upper_h - w.load_time_per_pallet_h * min_pallets:
                        report.removals.append(Removal(
                            RULE_LATE_ARC, vid, str(a),
                            f"arrival {arr:g} leaves < {min_pallets:g} pallet(s) before {w.upper_h:g}"))
                        continue
                keep.append(a)
            changed = bool(dead) or len(keep) != len(arcs)
            nodes = [n for n in nodes if n not in dead]
            arcs = keep
            if not changed:
                break
        out[vid] = VesselNetwork(vid, tuple(nodes), tuple(arcs))
    return ExpandedNetwork(inst, out), report


def arc_set(net: ExpandedNetwork) -> set[tuple[str, str, str]]:
    return {(vid, *a.key) for vid, vn in net.vessels.items() for a in vn.arcs}


def iter_window_nodes(net: ExpandedNetwork) -> Iterable[NodeRef]:
    for vn in net.vessels.values():
        yield from vn.window_nodes
