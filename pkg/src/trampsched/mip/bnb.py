"""Branch-and-bound over LP relaxations (maximisation).

Best-bound node selection with a depth-first plunge until the first
incumbent is found; most-fractional or pseudo-cost branching.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from ..model import INT_TOL, MilpModel
from . import lp as lpmod
from .lp import LpData, solve_lp

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
FEASIBLE = "feasible"  # stopped at the time limit with an incumbent
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NO_SOLUTION = "no_solution"  # stopped at the time limit without an incumbent

GAP_EPS = 1e-9
TIME_ENV = "SCHEDULER_TIME_LIMIT_S"


@dataclass
class SolverOptions:
    time_limit_s: float = 1800.0
    rel_gap_target: float = 1e-6
    node_selection: str = "best-bound"
    branching: str = "most-fractional"
    seed: int = 0
    lp_engine: str = "auto"
    max_nodes: int | None = None

    def __post_init__(self) -> None:
        if not self.time_limit_s > 0:
            raise ValueError("time_limit_s must be positive")
        if not 0 <= self.rel_gap_target < 1:
            raise ValueError("rel_gap_target must lie in [0, 1)")
        if self.node_selection != "best-bound":
            raise ValueError(f"unknown node selection {self.node_selection!r}")
        if self.branching not in ("most-fractional", "pseudo-cost"):
            raise ValueError(f"unknown branching rule {self.branching!r}")

    @classmethod
    def from_env(cls, **kw) -> "SolverOptions":
        env = os.environ.get(TIME_ENV)
        if env:
            kw["time_limit_s"] = float(env)
        return cls(**kw)


@dataclass
class SolveResult:
    status: str
    value: float
    bound: float
    x: np.ndarray | None
    nodes: int
    wall_s: float
    lp_solves: int = 0
    bound_trace: list[float] = field(default_factory=list, repr=False)

    @property
    def rel_gap(self) -> float:
        return rel_gap(self.bound, self.value)

    @property
    def has_incumbent(self) -> bool:
        return self.x is not None


def rel_gap(bound: float, value: float) -> float:
    """(bound - incumbent) / max(|incumbent|, eps) for a maximisation problem."""
    if value is None or not np.isfinite(value):
        return np.inf
    return (bound - value) / max(abs(value), GAP_EPS)


def reference_gap(reference: float, value: float) -> float:
    """(reference - value) / max(|reference|, eps): how far a value falls short of a reference
    objective, e.g. a heuristic against the full model. Negative when the value is better."""
    return (reference - value) / max(abs(reference), GAP_EPS)


@dataclass
class _Reduced:
    data: LpData
    free: np.ndarray
    fixed_x: np.ndarray  # full-length vector carrying the fixed values


def _eliminate_fixed(data: LpData) -> _Reduced | None:
    """Substitute columns whose bounds coincide; None when a fully fixed row is violated."""
    fixed = data.lb == data.ub
    full = np.where(fixed, data.lb, 0.0)
    if not fixed.any():
        return _Reduced(data, np.arange(len(data.c)), full)
    free = np.flatnonzero(~fixed)
    shift = data.A @ full
    A = data.A[:, free].tocsr()
    live = np.diff(A.indptr) > 0
    lo, hi = data.row_lo - shift, data.row_hi - shift
    dead = ~live
    tol = 1e-6 * np.maximum(1.0, np.abs(shift))
    if np.any(dead & ((lo > tol) | (hi < -tol))):
        return None
    red = LpData(
        c=data.c[free], A=A[live], row_lo=lo[live], row_hi=hi[live],
        lb=data.lb[free], ub=data.ub[free], integer=data.integer[free],
        const=data.const + float(data.c @ full),
    )
    return _Reduced(red, free, full)


class _Pseudo:
    def __init__(self, n: int):
        self.up = np.zeros(n)
        self.down = np.zeros(n)
        self.n_up = np.zeros(n)
        self.n_down = np.zeros(n)

    def record(self, j: int, up: bool, frac: float, drop: float) -> None:
        if up:
            self.up[j] += drop / max(1.0 - frac, 1e-6)
            self.n_up[j] += 1
        else:
            self.down[j] += drop / max(frac, 1e-6)
            self.n_down[j] += 1

    def score(self, cand: np.ndarray, f: np.ndarray) -> np.ndarray:
        avg_up = np.where(self.n_up[cand] > 0, self.up[cand] / np.maximum(self.n_up[cand], 1), np.nan)
        avg_dn = np.where(self.n_down[cand] > 0, self.down[cand] / np.maximum(self.n_down[cand], 1), np.nan)
        mean_up = np.nanmean(avg_up) if np.any(~np.isnan(avg_up)) else 1.0
        mean_dn = np.nanmean(avg_dn) if np.any(~np.isnan(avg_dn)) else 1.0
        avg_up = np.where(np.isnan(avg_up), mean_up, avg_up)
        avg_dn = np.where(np.isnan(avg_dn), mean_dn, avg_dn)
        return np.maximum(avg_dn * f, 1e-6) * np.maximum(avg_up * (1 - f), 1e-6)


@dataclass(order=True)
class _Node:
    key: float  # -bound, for the min-heap
    seq: int
    depth: int = field(compare=False)
    lb: np.ndarray = field(compare=False, repr=False)
    ub: np.ndarray = field(compare=False, repr=False)
    bound: float = field(compare=False)
    basis: object = field(compare=False, default=None, repr=False)
    branch: tuple | None = field(compare=False, default=None)  # (col, up, frac, parent_value)


def solve(model: MilpModel, options: SolverOptions | None = None,
          start: np.ndarray | None = None) -> SolveResult:
    """Maximise the model. ``start`` is an optional feasible assignment used as first incumbent."""
    opts = options or SolverOptions()
    t0 = time.perf_counter()
    deadline = t0 + opts.time_limit_s
    full = LpData.from_model(model)
    n_full = len(full.c)

    best_x: np.ndarray | None = None
    best_val = -np.inf
    if start is not None:
        start = np.asarray(start, dtype=float)
        if model.is_feasible(start):
            best_x, best_val = start.copy(), model.objective(start)
        else:
            log.debug("start assignment rejected: max violation %.3g", model.max_violation(start))

    red = _eliminate_fixed(full)
    if red is None:
        return SolveResult(INFEASIBLE, np.nan, np.nan, None, 0, time.perf_counter() - t0)
    data = red.data
    n = len(data.c)

    def expand(xr: np.ndarray) -> np.ndarray:
        x = red.fixed_x.copy()
        x[red.free] = xr
        return x

    integer = np.flatnonzero(data.integer)
    pseudo = _Pseudo(n)
    counter = itertools.count()
    heap: list[_Node] = []
    nodes = 0
    lp_solves = 0
    trace: list[float] = []
    global_bound = np.inf
    timed_out = False

    def cutoff() -> float:
        if best_x is None:
            return -np.inf
        return best_val + max(opts.rel_gap_target * abs(best_val), 1e-9)

    root = _Node(-np.inf, next(counter), 0, data.lb.copy(), data.ub.copy(), np.inf)
    dive: _Node | None = root
    engine = opts.lp_engine

    while True:
        if dive is not None:
            node, dive = dive, None
        else:
            # prune and pick the best open node
            while heap and heap[0].bound <= cutoff():
                heapq.heappop(heap)
            if not heap:
                break
            node = heapq.heappop(heap)
        open_best = max([node.bound] + [h.bound for h in heap[:1]])
        if open_best < global_bound:
            global_bound = open_best
        if best_x is not None and np.isfinite(global_bound):
            trace.append(max(global_bound, best_val))
            if rel_gap(max(global_bound, best_val), best_val) <= opts.rel_gap_target:
                heap.clear()
                break
        now = time.perf_counter()
        if now >= deadline or (opts.max_nodes is not None and nodes >= opts.max_nodes):
            heapq.heappush(heap, node)
            timed_out = True
            break
        if node.bound <= cutoff():
            continue

        nodes += 1
        lp_solves += 1
        res = solve_lp(data, node.lb, node.ub, engine=engine, time_limit=deadline - now,
                       basis=node.basis)
        if res.status == lpmod.NUMERICAL and res.engine == "simplex":
            res = solve_lp(data, node.lb, node.ub, engine="highs", time_limit=deadline - now)
        if res.status == lpmod.TIME_LIMIT:
            heapq.heappush(heap, node)
            timed_out = True
            break
        if res.status == lpmod.UNBOUNDED:
            if node.depth == 0:
                return SolveResult(UNBOUNDED, np.inf, np.inf, None, nodes, time.perf_counter() - t0, lp_solves)
            continue
        if res.status != lpmod.OPTIMAL:
            continue
        value = min(res.value, node.bound)
        if node.branch is not None:
            j, up, frac, parent_val = node.branch
            pseudo.record(j, up, frac, max(0.0, parent_val - value))
        if node.depth == 0:
            global_bound = value
            trace.append(value)
        if value <= cutoff():
            continue
        xr = res.x
        f = xr[integer] - np.floor(xr[integer])
        frac_mask = (f > INT_TOL) & (f < 1 - INT_TOL)
        if not frac_mask.any():
            x = expand(xr)
            if value > best_val:
                best_val, best_x = value, x
                log.debug("incumbent %.6g at node %d", value, nodes)
            continue
        cand = integer[frac_mask]
        fc = f[frac_mask]
        if opts.branching == "pseudo-cost":
            score = pseudo.score(cand, fc)
        else:
            score = np.minimum(fc, 1 - fc)
        k = int(np.argmax(score))
        j, fj = int(cand[k]), float(fc[k])
        children = []
        for up in (False, True):
            lb, ub = node.lb.copy(), node.ub.copy()
            if up:
                lb[j] = np.ceil(xr[j])
            else:
                ub[j] = np.floor(xr[j])
            children.append(_Node(-value, next(counter), node.depth + 1, lb, ub, value, res.basis,
                                  (j, up, fj, value)))
        if best_x is None:
            # plunge: follow the down branch, park the other
            dive = children[0]
            heapq.heappush(heap, children[1])
        else:
            for ch in children:
                heapq.heappush(heap, ch)

    wall = time.perf_counter() - t0
    if best_x is None:
        if timed_out:
            bound = global_bound if np.isfinite(global_bound) else np.inf
            return SolveResult(NO_SOLUTION, np.nan, bound, None, nodes, wall, lp_solves, trace)
        return SolveResult(INFEASIBLE, np.nan, np.nan, None, nodes, wall, lp_solves, trace)
    if timed_out:
        open_bound = max((h.bound for h in heap), default=-np.inf)
        bound = max(best_val, min(global_bound, open_bound) if np.isfinite(open_bound) else best_val)
        if not np.isfinite(bound):
            bound = global_bound
        status = OPTIMAL if rel_gap(bound, best_val) <= opts.rel_gap_target else FEASIBLE
        return SolveResult(status, best_val, bound, best_x, nodes, wall, lp_solves, trace)
    bound = best_val if not heap else max(best_val, min(global_bound, max(h.bound for h in heap)))
    return SolveResult(OPTIMAL, best_val, bound, best_x, nodes, wall, lp_solves, trace)
