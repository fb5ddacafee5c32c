"""Seeded synthetic instances in the S{v}B{b}W{w}C{c} family layout.

Geography is a random point cloud: one port per vessel origin, terminal ports
holding the berths, and a few destination ports. Sailing hours are Euclidean
distances clamped below at the minimum leg, which keeps them metric.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .instance import (BerthSpec, ContractSpec, Instance, TimeWindowSpec, VesselSpec, make_instance,
                       validate_instance)

_NAME = re.compile(r"^S(\d+)B(\d+)W(\d+)C(\d+)$")
SEED_LETTERS = {"A": 1, "B": 2, "C": 3, "D": 4}


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    vessels: int
    berths: int
    windows_per_berth: int
    contracts: int
    total_pallets: int
    seed: int = 1

    def __post_init__(self) -> None:
        for k in ("vessels", "berths", "windows_per_berth", "contracts", "total_pallets"):
            if getattr(self, k) <= 0:
                raise SpecError(f"{k} must be positive")
        if self.contracts < self.vessels:
            raise SpecError("need at least one contract per vessel")
        if self.total_pallets < self.contracts:
            raise SpecError("total_pallets below the number of contracts")

    @property
    def name(self) -> str:
        return f"S{self.vessels}B{self.berths}W{self.windows_per_berth}C{self.contracts}"


def parse_seed(seed: int | str) -> int:
    if isinstance(seed, str):
        s = seed.strip().upper()
        if s in SEED_LETTERS:
            return SEED_LETTERS[s]
        try:
            return int(s)
        except ValueError:
            raise SpecError(f"bad seed {seed!r}") from None
    return int(seed)


def family_from_name(name: str, pallets: int, seed: int | str = 1) -> FamilySpec:
    m = _NAME.match(name.strip())
    if not m:
        raise SpecError(f"malformed family name {name!r} (expected S<v>B<b>W<w>C<c>)")
    v, b, w, c = map(int, m.groups())
    return FamilySpec(v, b, w, c, int(pallets), parse_seed(seed))


@dataclass
class GeneratorConfig:
    """Parameter ranges; defaults aim at instances where split loading pays off."""

    leg_h: tuple[float, float] = (4.0, 48.0)
    bandwidth_h: tuple[float, float] = (8.0, 72.0)
    gap_h: tuple[float, float] = (0.0, 24.0)
    load_share: tuple[float, float] = (0.10, 0.60)  # full-vessel loading time / bandwidth
    capacity_slack: tuple[float, float] = (1.0, 1.3)
    light_draft_m: tuple[float, float] = (5.0, 8.0)
    berth_draft_m: tuple[float, float] = (8.0, 14.0)
    full_draft_m: float = 4.0  # draft increase of an average full vessel
    income: tuple[float, float] = (40.0, 60.0)
    compensation: tuple[float, float] = (10.0, 20.0)
    fee: tuple[float, float] = (200.0, 1200.0)
    rent: tuple[float, float] = (10.0, 30.0)
    fuel: tuple[float, float] = (20.0, 60.0)
    due_slack_h: tuple[float, float] = (12.0, 96.0)
    windows_per_vessel: int | None = None  # restrict W^v to a random subset
    max_shared_windows: int | None = None
    weights: tuple[float, float] = (0.5, 1.5)  # contract size weights
    extra: dict = field(default_factory=dict)


def apportion(total: int, weights: np.ndarray) -> list[int]:
    """Largest-remainder split of total into integers >= 1 proportional to weights."""
    n = len(weights)
    if total < n:
        raise SpecError("total below number of parts")
    spare = total - n
    quota = spare * np.asarray(weights, float) / float(np.sum(weights))
    base = np.floor(quota).astype(int)
    left = spare - int(base.sum())
    order = sorted(range(n), key=lambda i: (-(quota[i] - base[i]), i))
    for i in order[:left]:
        base[i] += 1
    return [int(b) + 1 for b in base]


def _u(rng: np.random.Generator, lo_hi: tuple[float, float]) -> float:
    return float(rng.uniform(*lo_hi))


def _r(x: float, nd: int = 3) -> float:
    return float(round(x, nd))


def generate(spec: FamilySpec, config: GeneratorConfig | None = None) -> Instance:
    cfg = config or GeneratorConfig()
    rng = np.random.default_rng(spec.seed)
    V, B, Wb, C = spec.vessels, spec.berths, spec.windows_per_berth, spec.contracts

    n_term = max(1, math.ceil(B / 2))
    n_dest = max(1, math.ceil(V / 3))
    origins = [f"PO{k + 1}" for k in range(V)]
    terms = [f"PT{k + 1}" for k in range(n_term)]
    dests = [f"PD{k + 1}" for k in range(n_dest)]
    ports = origins + terms + dests
    # terminals in the middle, origins and destinations around them
    lo, hi = cfg.leg_h
    scale = hi / 2.0
    pos = {}
    for p in terms:
        pos[p] = rng.uniform(-0.4, 0.4, 2) * scale
    for p in origins + dests:
        ang = rng.uniform(0, 2 * math.pi)
        rad = rng.uniform(0.6, 1.0) * scale
        pos[p] = np.array([math.cos(ang), math.sin(ang)]) * rad
    sailing = {}
    for i, a in enumerate(ports):
        for b in ports[i + 1:]:
            dist = float(np.linalg.norm(pos[a] - pos[b]))
            sailing[(a, b)] = _r(min(hi, max(lo, dist)), 1)
    sailing = {k: v for k, v in sailing.items()}

    sizes = apportion(spec.total_pallets, rng.uniform(*cfg.weights, C))
    owner = [k % V for k in range(C)]
    cargo = [0] * V
    for k, g in enumerate(sizes):
        cargo[owner[k]] += g
    avg_cargo = spec.total_pallets / V
    dp = _r(cfg.full_draft_m / avg_cargo, 9)

    berths = []
    for k in range(B):
        berths.append(BerthSpec(f"B{k + 1}", terms[k % n_term], _r(_u(rng, cfg.berth_draft_m), 2)))

    windows = []
    for k, b in enumerate(berths):
        t = _u(rng, cfg.gap_h)
        for j in range(Wb):
            bw = _u(rng, cfg.bandwidth_h)
            share = _u(rng, cfg.load_share)
            gamma = max(1e-4, _r(share * bw / avg_cargo, 6))
            lw, uw = _r(t, 1), _r(t + bw, 1)
            if uw - lw < gamma:
                uw = _r(lw + gamma + 1.0, 1)
            fee = _r(_u(rng, cfg.fee), 0)
            windows.append(TimeWindowSpec(f"W{k + 1}{chr(ord('a') + j)}", b.id, lw, uw, fee, gamma))
            t = uw + _u(rng, cfg.gap_h) + 0.5
    wids = [w.id for w in windows]

    access: list[tuple[str, ...] | None] = [None] * V
    if cfg.windows_per_vessel is not None and cfg.windows_per_vessel < len(wids):
        k = max(1, cfg.windows_per_vessel)
        access = [tuple(sorted(rng.choice(wids, size=k, replace=False).tolist())) for _ in range(V)]
    if cfg.max_shared_windows is not None:
        access = _cap_shared([list(a) if a else list(wids) for a in access], cfg.max_shared_windows)

    vessels = []
    dest_of = [dests[k % n_dest] for k in range(V)]
    for k in range(V):
        cap = math.ceil(cargo[k] * _u(rng, cfg.capacity_slack))
        vessels.append(VesselSpec(
            f"V{k + 1}", origins[k], _r(_u(rng, cfg.light_draft_m), 2), cap,
            _r(_u(rng, cfg.rent), 2), _r(_u(rng, cfg.fuel), 2), 12.0, access[k],
        ))

    def sail(a: str, b: str) -> float:
        return 0.0 if a == b else sailing.get((a, b), sailing.get((b, a), 0.0))

    wport = {w.id: next(b.port for b in berths if b.id == w.berth) for w in windows}
    contracts = []
    due_by_vessel = []
    for k, v in enumerate(vessels):
        ws = v.windows or tuple(wids)
        # earliest arrival at the destination through each window, then the latest of those
        via = []
        for w in windows:
            if w.id not in ws:
                continue
            arrive = max(sail(v.origin_port, wport[w.id]), w.lower_h)
            if arrive + w.load_time_per_pallet_h > w.upper_h:
                continue
            via.append(min(w.upper_h, arrive + w.load_time_per_pallet_h * cargo[k]) + sail(wport[w.id], dest_of[k]))
        base = max(via) if via else sail(v.origin_port, dest_of[k])
        due_by_vessel.append(_r(base + _u(rng, cfg.due_slack_h), 1))
    for k, g in enumerate(sizes):
        vk = owner[k]
        psi = _r(_u(rng, cfg.income), 2)
        sigma = _r(min(_u(rng, cfg.compensation), 0.9 * psi), 2)
        due = _r(due_by_vessel[vk] + rng.uniform(0, 12), 1)
        contracts.append(ContractSpec(f"C{k + 1}", f"V{vk + 1}", dest_of[vk], g, psi, sigma, due))
    # fee at least one pallet's income plus compensation, so the one-pallet reduction threshold is safe
    top = max(c.income_per_pallet + c.compensation_per_pallet for c in contracts)
    windows = [w if w.fee >= top else TimeWindowSpec(w.id, w.berth, w.lower_h, w.upper_h, _r(top + 1, 0),
                                                    w.load_time_per_pallet_h) for w in windows]
    inst = make_instance(vessels, contracts, berths, windows, sailing, dp, ports)
    bad = validate_instance(inst)
    if bad:
        raise SpecError("generated instance is invalid: " + "; ".join(map(str, bad)))
    return inst


def _cap_shared(access: list[list[str]], cap: int) -> list[tuple[str, ...]]:
    """Drop shared windows from later vessels until at most cap windows are shared.

    A vessel never loses its last window, so the cap can be exceeded when
    single-window vessels collide.
    """
    owners: dict[str, list[int]] = {}
    for k, ws in enumerate(access):
        for w in ws:
            owners.setdefault(w, []).append(k)
    shared = sorted(w for w, ks in owners.items() if len(ks) > 1)
    for w in shared[cap:]:
        for k in owners[w][1:]:
            if len(access[k]) > 1:
                access[k].remove(w)
    return [tuple(sorted(ws)) for ws in access]
