"""Problem data: vessels, contracts, berths, time windows and sailing times.

Units are hours, meters, pallets and abstract money units throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence


class InstanceError(ValueError):
    """Raised when an instance document cannot be turned into an Instance."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class VesselSpec:
    id: str
    origin_port: str
    light_draft_m: float
    capacity_pallets: float
    rent_rate: float  # money per hour of trip
    fuel_rate: float  # money per hour sailing
    speed_knots: float = 12.0  # metadata only
    # Accessible windows; None means every window.
    windows: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ContractSpec:
    id: str
    vessel: str
    destination_port: str
    size_pallets: float
    income_per_pallet: float
    compensation_per_pallet: float
    due_date_h: float
    income_overrides: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class BerthSpec:
    id: str
    port: str
    max_draft_m: float


@dataclass(frozen=True)
class TimeWindowSpec:
    id: str
    berth: str
    lower_h: float
    upper_h: float
    fee: float
    load_time_per_pallet_h: float
    fee_overrides: Mapping[str, float] = field(default_factory=dict)

    @property
    def bandwidth_h(self) -> float:
        return self.upper_h - self.lower_h


@dataclass(frozen=True)
class Violation:
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.message}"


@dataclass(frozen=True, eq=True)
class Instance:
    vessels: tuple[VesselSpec, ...]
    contracts: tuple[ContractSpec, ...]
    berths: tuple[BerthSpec, ...]
    windows: tuple[TimeWindowSpec, ...]
    ports: tuple[str, ...]
    sailing_hours: tuple[tuple[float, ...], ...]
    draft_per_pallet_m: float

    __hash__ = None  # type: ignore[assignment]

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _vessel_by_id(self) -> dict[str, VesselSpec]:
        return {v.id: v for v in self.vessels}

    @cached_property
    def _contract_by_id(self) -> dict[str, ContractSpec]:
        return {c.id: c for c in self.contracts}

    @cached_property
    def _berth_by_id(self) -> dict[str, BerthSpec]:
        return {b.id: b for b in self.berths}

    @cached_property
    def _window_by_id(self) -> dict[str, TimeWindowSpec]:
        return {w.id: w for w in self.windows}

    @cached_property
    def _port_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.ports)}

    @cached_property
    def _contracts_by_vessel(self) -> dict[str, tuple[ContractSpec, ...]]:
        out: dict[str, list[ContractSpec]] = {v.id: [] for v in self.vessels}
        for c in self.contracts:
            out.setdefault(c.vessel, []).append(c)
        return {k: tuple(v) for k, v in out.items()}

    def vessel(self, vid: str) -> VesselSpec:
        try:
            return self._vessel_by_id[vid]
        except KeyError:
            raise InstanceError(f"unresolved vessel id {vid!r}") from None

    def contract(self, cid: str) -> ContractSpec:
        try:
            return self._contract_by_id[cid]
        except KeyError:
            raise InstanceError(f"unresolved contract id {cid!r}") from None

    def berth(self, bid: str) -> BerthSpec:
        try:
            return self._berth_by_id[bid]
        except KeyError:
            raise InstanceError(f"unresolved berth id {bid!r}") from None

    def window(self, wid: str) -> TimeWindowSpec:
        try:
            return self._window_by_id[wid]
        except KeyError:
            raise InstanceError(f"unresolved window id {wid!r}") from None

    def contracts_of(self, vid: str) -> tuple[ContractSpec, ...]:
        return self._contracts_by_vessel.get(vid, ())

    def window_port(self, wid: str) -> str:
        return self.berth(self.window(wid).berth).port

    def destination_port(self, vid: str) -> str:
        """Destination of a vessel: the common port of its contracts, or its origin when it has none."""
        cs = self.contracts_of(vid)
        return cs[0].destination_port if cs else self.vessel(vid).origin_port

    def sail(self, a: str, b: str) -> float:
        idx = self._port_index
        try:
            return self.sailing_hours[idx[a]][idx[b]]
        except KeyError as exc:
            raise InstanceError(f"unresolved port id {exc.args[0]!r}") from None

    def accessible_windows(self, vid: str) -> tuple[str, ...]:
        v = self.vessel(vid)
        if v.windows is None:
            return tuple(w.id for w in self.windows)
        return tuple(sorted(v.windows))

    def income(self, cid: str, wid: str) -> float:
        c = self.contract(cid)
        return c.income_overrides.get(wid, c.income_per_pallet)

    def fee(self, wid: str, vid: str) -> float:
        w = self.window(wid)
        return w.fee_overrides.get(vid, w.fee)

    def cargo_pallets(self, vid: str) -> float:
        return sum(c.size_pallets for c in self.contracts_of(vid))

    def due_date(self, vid: str) -> float:
        """Latest admissible arrival at the vessel's destination."""
        cs = self.contracts_of(vid)
        return min(c.due_date_h for c in cs) if cs else self.horizon_h

    @property
    def horizon_h(self) -> float:
        return max((c.due_date_h for c in self.contracts), default=0.0)


def vessel_window_draft_cap(inst: Instance, vessel: str, window: str) -> float:
    """Draft increase the vessel may carry when leaving the window's berth."""
    v = inst.vessel(vessel)
    b = inst.berth(inst.window(window).berth)
    return max(0.0, b.max_draft_m - v.light_draft_m)


# -- validation ---------------------------------------------------------------


def _duplicates(ids: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dup = []
    for i in ids:
        if i in seen:
            dup.append(i)
        seen.add(i)
    return dup


def validate_instance(inst: Instance) -> list[Violation]:
    out: list[Violation] = []
    add = lambda entity, msg: out.append(Violation(entity, msg))  # noqa: E731

    for kind, ents in (("vessel", inst.vessels), ("contract", inst.contracts),
                       ("berth", inst.berths), ("window", inst.windows)):
        for d in _duplicates(e.id for e in ents):
            add(f"{kind} {d}", "duplicate id")
    for d in _duplicates(inst.ports):
        add(f"port {d}", "duplicate id")

    ports = set(inst.ports)
    vessel_ids = {v.id for v in inst.vessels}
    berth_ids = {b.id for b in inst.berths}
    window_ids = {w.id for w in inst.windows}

    n = len(inst.ports)
    if len(inst.sailing_hours) != n or any(len(r) != n for r in inst.sailing_hours):
        add("sailing_hours", f"matrix must be {n}x{n}")
    else:
        for i in range(n):
            for j in range(n):
                h = inst.sailing_hours[i][j]
                if not math.isfinite(h) or h < 0:
                    add("sailing_hours", f"negative or non-finite entry [{inst.ports[i]}][{inst.ports[j]}]")
                if i == j and h != 0:
                    add("sailing_hours", f"nonzero diagonal at {inst.ports[i]}")
                if j > i and h != inst.sailing_hours[j][i]:
                    add("sailing_hours", f"asymmetric entry {inst.ports[i]}/{inst.ports[j]}")
    if not inst.draft_per_pallet_m > 0:
        add("draft_per_pallet_m", "must be positive")

    load: dict[str, float] = {}
    dests: dict[str, set[str]] = {}
    for c in inst.contracts:
        ent = f"contract {c.id}"
        if c.vessel not in vessel_ids:
            add(ent, f"unresolved vessel id {c.vessel!r}")
        if c.destination_port not in ports:
            add(ent, f"unresolved port id {c.destination_port!r}")
        if not c.size_pallets > 0:
            add(ent, "size must be positive")
        if not c.due_date_h > 0:
            add(ent, "due date must be positive")
        if c.compensation_per_pallet < 0:
            add(ent, "negative compensation")
        for wid in c.income_overrides:
            if wid not in window_ids:
                add(ent, f"unresolved window id {wid!r} in income overrides")
        load[c.vessel] = load.get(c.vessel, 0.0) + c.size_pallets
        dests.setdefault(c.vessel, set()).add(c.destination_port)

    for v in inst.vessels:
        ent = f"vessel {v.id}"
        if v.origin_port not in ports:
            add(ent, f"unresolved port id {v.origin_port!r}")
        if not v.light_draft_m > 0:
            add(ent, "light draft must be positive")
        for name in ("rent_rate", "fuel_rate", "speed_knots"):
            if not getattr(v, name) > 0:
                add(ent, f"{name} must be positive")
        if v.capacity_pallets < load.get(v.id, 0.0):
            add(ent, "capacity below assigned cargo")
        if len(dests.get(v.id, ())) > 1:
            add(ent, "contracts with different destinations (multi-destination vessels unsupported)")
        for wid in v.windows or ():
            if wid not in window_ids:
                add(ent, f"unresolved window id {wid!r}")

    for b in inst.berths:
        if b.port not in ports:
            add(f"berth {b.id}", f"unresolved port id {b.port!r}")
        if not b.max_draft_m > 0:
            add(f"berth {b.id}", "max draft must be positive")

    by_berth: dict[str, list[TimeWindowSpec]] = {}
    for w in inst.windows:
        ent = f"window {w.id}"
        if w.berth not in berth_ids:
            add(ent, f"unresolved berth id {w.berth!r}")
        if not w.lower_h < w.upper_h:
            add(ent, "empty time window")
        if not w.load_time_per_pallet_h > 0:
            add(ent, "load time per pallet must be positive")
        if w.fee < 0:
            add(ent, "negative fee")
        for vid in w.fee_overrides:
            if vid not in vessel_ids:
                add(ent, f"unresolved vessel id {vid!r} in fee overrides")
        by_berth.setdefault(w.berth, []).append(w)
    for bid, ws in by_berth.items():
        ws = sorted(ws, key=lambda w: (w.lower_h, w.id))
        for a, b in zip(ws, ws[1:]):
            if b.lower_h < a.upper_h:
                add(f"window {b.id}", f"overlaps window {a.id} on berth {bid}")
    return out


# -- document format -----------------------------------------------------------


def _num(x: float) -> float | int:
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return x
    y = float(f"{float(x):.9g}")
    if y.is_integer() and abs(y) < 1e15:
        return int(y)
    return y


def _field(obj: Mapping[str, Any], key: str, path: str, kind: type | tuple = (int, float)) -> Any:
    if not isinstance(obj, Mapping):
        raise InstanceError("expected an object", path)
    if key not in obj:
        raise InstanceError(f"missing field {key!r}", path)
    val = obj[key]
    if kind == (int, float):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise InstanceError("expected a number", f"{path}.{key}")
    elif not isinstance(val, kind):
        raise InstanceError(f"expected {getattr(kind, '__name__', kind)}", f"{path}.{key}")
    return val


def _num_map(obj: Any, path: str) -> dict[str, float]:
    if not isinstance(obj, Mapping):
        raise InstanceError("expected an object", path)
    out = {}
    for k, v in obj.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InstanceError("expected a number", f"{path}.{k}")
        out[str(k)] = v
    return out


def _list(doc: Mapping[str, Any], key: str) -> list:
    if key not in doc:
        raise InstanceError(f"missing field {key!r}", "$")
    val = doc[key]
    if not isinstance(val, list):
        raise InstanceError("expected a list", f"$.{key}")
    return val


def instance_from_dict(doc: Mapping[str, Any], strict: bool = True) -> Instance:
    """Build an Instance from a parsed document, resolving every reference.

    With ``strict`` (the default) any invariant violation raises; otherwise
    violations are left for :func:`validate_instance` to report.
    """
    if not isinstance(doc, Mapping):
        raise InstanceError("top level must be an object", "$")
    vessels = []
    for i, d in enumerate(_list(doc, "vessels")):
        p = f"$.vessels[{i}]"
        wins = d.get("windows") if isinstance(d, Mapping) else None
        if wins is not None and (not isinstance(wins, list) or not all(isinstance(w, str) for w in wins)):
            raise InstanceError("expected a list of window ids", f"{p}.windows")
        vessels.append(VesselSpec(
            id=_field(d, "id", p, str),
            origin_port=_field(d, "origin_port", p, str),
            light_draft_m=_field(d, "light_draft_m", p),
            capacity_pallets=_field(d, "capacity_pallets", p),
            rent_rate=_field(d, "rent_rate", p),
            fuel_rate=_field(d, "fuel_rate", p),
            speed_knots=_field(d, "speed_knots", p) if "speed_knots" in d else 12,
            windows=tuple(sorted(wins)) if wins is not None else None,
        ))
    contracts = []
    for i, d in enumerate(_list(doc, "contracts")):
        p = f"$.contracts[{i}]"
        contracts.append(ContractSpec(
            id=_field(d, "id", p, str),
            vessel=_field(d, "vessel", p, str),
            destination_port=_field(d, "destination_port", p, str),
            size_pallets=_field(d, "size_pallets", p),
            income_per_pallet=_field(d, "income_per_pallet", p),
            compensation_per_pallet=_field(d, "compensation_per_pallet", p),
            due_date_h=_field(d, "due_date_h", p),
            income_overrides=_num_map(d.get("income_overrides", {}), f"{p}.income_overrides"),
        ))
    berths = []
    for i, d in enumerate(_list(doc, "berths")):
        p = f"$.berths[{i}]"
        berths.append(BerthSpec(
            id=_field(d, "id", p, str),
            port=_field(d, "port", p, str),
            max_draft_m=_field(d, "max_draft_m", p),
        ))
    windows = []
    for i, d in enumerate(_list(doc, "windows")):
        p = f"$.windows[{i}]"
        windows.append(TimeWindowSpec(
            id=_field(d, "id", p, str),
            berth=_field(d, "berth", p, str),
            lower_h=_field(d, "lower_h", p),
            upper_h=_field(d, "upper_h", p),
            fee=_field(d, "fee", p),
            load_time_per_pallet_h=_field(d, "load_time_per_pallet_h", p),
            fee_overrides=_num_map(d.get("fee_overrides", {}), f"{p}.fee_overrides"),
        ))
    ports = _list(doc, "ports")
    if not all(isinstance(p, str) for p in ports):
        raise InstanceError("expected a list of port ids", "$.ports")
    matrix = _list(doc, "sailing_hours")
    if len(matrix) != len(ports):
        raise InstanceError(f"expected {len(ports)} rows", "$.sailing_hours")
    rows = []
    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != len(ports):
            raise InstanceError(f"expected a row of {len(ports)} numbers", f"$.sailing_hours[{i}]")
        for j, h in enumerate(row):
            if isinstance(h, bool) or not isinstance(h, (int, float)):
                raise InstanceError("expected a number", f"$.sailing_hours[{i}][{j}]")
        rows.append(row)

    # canonical order: entities by id, ports sorted with the matrix permuted alike
    order = sorted(range(len(ports)), key=lambda k: ports[k])
    inst = Instance(
        vessels=tuple(sorted(vessels, key=lambda e: e.id)),
        contracts=tuple(sorted(contracts, key=lambda e: e.id)),
        berths=tuple(sorted(berths, key=lambda e: e.id)),
        windows=tuple(sorted(windows, key=lambda e: e.id)),
        ports=tuple(ports[k] for k in order),
        sailing_hours=tuple(tuple(rows[a][b] for b in order) for a in order),
        draft_per_pallet_m=_field(doc, "draft_per_pallet_m", "$"),
    )
    _check_references(inst)
    if strict:
        bad = validate_instance(inst)
        if bad:
            raise InstanceError("; ".join(str(v) for v in bad), "invariants")
    return inst


def _check_references(inst: Instance) -> None:
    ports = set(inst.ports)
    vids = {v.id for v in inst.vessels}
    bids = {b.id for b in inst.berths}
    wids = {w.id for w in inst.windows}
    for i, c in enumerate(inst.contracts):
        if c.vessel not in vids:
            raise InstanceError(f"unresolved vessel id {c.vessel!r}", f"contract {c.id}")
        if c.destination_port not in ports:
            raise InstanceError(f"unresolved port id {c.destination_port!r}", f"contract {c.id}")
        for wid in c.income_overrides:
            if wid not in wids:
                raise InstanceError(f"unresolved window id {wid!r}", f"contract {c.id}")
    for v in inst.vessels:
        if v.origin_port not in ports:
            raise InstanceError(f"unresolved port id {v.origin_port!r}", f"vessel {v.id}")
        for wid in v.windows or ():
            if wid not in wids:
                raise InstanceError(f"unresolved window id {wid!r}", f"vessel {v.id}")
    for b in inst.berths:
        if b.port not in ports:
            raise InstanceError(f"unresolved port id {b.port!r}", f"berth {b.id}")
    for w in inst.windows:
        if w.berth not in bids:
            raise InstanceError(f"unresolved berth id {w.berth!r}", f"window {w.id}")
        for vid in w.fee_overrides:
            if vid not in vids:
                raise InstanceError(f"unresolved vessel id {vid!r}", f"window {w.id}")


def load_instance(text: str, strict: bool = True) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return instance_from_dict(doc, strict=strict)


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    vessels = []
    for v in sorted(inst.vessels, key=lambda e: e.id):
        d: dict[str, Any] = {
            "id": v.id,
            "origin_port": v.origin_port,
            "light_draft_m": _num(v.light_draft_m),
            "capacity_pallets": _num(v.capacity_pallets),
            "rent_rate": _num(v.rent_rate),
            "fuel_rate": _num(v.fuel_rate),
            "speed_knots": _num(v.speed_knots),
        }
        if v.windows is not None:
            d["windows"] = sorted(v.windows)
        vessels.append(d)
    contracts = []
    for c in sorted(inst.contracts, key=lambda e: e.id):
        d = {
            "id": c.id,
            "vessel": c.vessel,
            "destination_port": c.destination_port,
            "size_pallets": _num(c.size_pallets),
            "income_per_pallet": _num(c.income_per_pallet),
            "compensation_per_pallet": _num(c.compensation_per_pallet),
            "due_date_h": _num(c.due_date_h),
        }
        if c.income_overrides:
            d["income_overrides"] = {k: _num(x) for k, x in c.income_overrides.items()}
        contracts.append(d)
    berths = [{"id": b.id, "port": b.port, "max_draft_m": _num(b.max_draft_m)}
              for b in sorted(inst.berths, key=lambda e: e.id)]
    windows = []
    for w in sorted(inst.windows, key=lambda e: e.id):
        d = {
            "id": w.id,
            "berth": w.berth,
            "lower_h": _num(w.lower_h),
            "upper_h": _num(w.upper_h),
            "fee": _num(w.fee),
            "load_time_per_pallet_h": _num(w.load_time_per_pallet_h),
        }
        if w.fee_overrides:
            d["fee_overrides"] = {k: _num(x) for k, x in w.fee_overrides.items()}
        windows.append(d)
    order = sorted(range(len(inst.ports)), key=lambda k: inst.ports[k])
    return {
        "vessels": vessels,
        "contracts": contracts,
        "berths": berths,
        "windows": windows,
        "ports": [inst.ports[k] for k in order],
        "sailing_hours": [[_num(inst.sailing_hours[a][b]) for b in order] for a in order],
        "draft_per_pallet_m": _num(inst.draft_per_pallet_m),
    }


def save_instance(inst: Instance) -> str:
    """Canonical text: sorted keys, entities sorted by id, at most 9 significant digits."""
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def canonicalize(text: str) -> str:
    return save_instance(load_instance(text, strict=False))


def read_instance(path: str, strict: bool = True) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return load_instance(fh.read(), strict=strict)


def write_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save_instance(inst))


def make_instance(
    vessels: Sequence[VesselSpec],
    contracts: Sequence[ContractSpec],
    berths: Sequence[BerthSpec],
    windows: Sequence[TimeWindowSpec],
    sailing: Mapping[tuple[str, str], float],
    draft_per_pallet_m: float,
    ports: Sequence[str] | None = None,
) -> Instance:
    """Convenience constructor taking sailing times as a sparse symmetric mapping."""
    if ports is None:
        found = {v.origin_port for v in vessels} | {c.destination_port for c in contracts}
        found |= {b.port for b in berths}
        for a, b in sailing:
            found |= {a, b}
        ports = sorted(found)
    ports = sorted(ports)
    idx = {p: i for i, p in enumerate(ports)}
    n = len(ports)
    m = [[0.0] * n for _ in range(n)]
    for (a, b), h in sailing.items():
        m[idx[a]][idx[b]] = h
        m[idx[b]][idx[a]] = h
    inst = Instance(
        vessels=tuple(sorted(vessels, key=lambda e: e.id)),
        contracts=tuple(sorted(contracts, key=lambda e: e.id)),
        berths=tuple(sorted(berths, key=lambda e: e.id)),
        windows=tuple(sorted(windows, key=lambda e: e.id)),
        ports=tuple(ports),
        sailing_hours=tuple(tuple(r) for r in m),
        draft_per_pallet_m=draft_per_pallet_m,
    )
    _check_references(inst)
    return inst
