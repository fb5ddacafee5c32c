"""Dense bounded-variable primal simplex.

Solves ``max c.x  s.t.  row_lo <= A x <= row_hi,  lb <= x <= ub`` by adding one
activity variable per row (``A x - s = 0`` with ``row_lo <= s <= row_hi``), so
every row is an equality with zero right-hand side and all limits are bounds.

Phase 1 minimises the sum of bound infeasibilities of the basic variables,
which lets the same code start from the slack basis or from a supplied
(warm) basis. Pricing is Dantzig; after ``3 * (rows + cols)`` consecutive
degenerate pivots the rule switches to Bland's for the rest of the solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL = "numerical"
ITERATION_LIMIT = "iteration_limit"

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-11
REFACTOR_EVERY = 64


@dataclass
class Basis:
    """Warm-start information: basic column indices and which nonbasics sit at upper bound."""

    basic: np.ndarray
    at_upper: np.ndarray


@dataclass
class SimplexResult:
    status: str
    value: float
    x: np.ndarray
    duals: np.ndarray  # d(value)/d(row bound), one per row
    reduced: np.ndarray  # c - A^T duals
    iterations: int
    basis: Basis | None = None


class _Numerical(Exception):
    pass


def solve(c: np.ndarray, A: np.ndarray, row_lo: np.ndarray, row_hi: np.ndarray,
          lb: np.ndarray, ub: np.ndarray, basis: Basis | None = None,
          max_iter: int | None = None) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(len(row_lo), len(c))
    m, n = A.shape
    if m == 0:
        return _no_rows(c, lb, ub)
    if np.any(np.asarray(lb) > np.asarray(ub) + PRIMAL_TOL) or np.any(np.asarray(row_lo) > np.asarray(row_hi) + PRIMAL_TOL):
        return SimplexResult(INFEASIBLE, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), 0)
    for start in ((basis, None) if basis is not None else (None,)):
        try:
            return _Simplex(c, A, row_lo, row_hi, lb, ub, max_iter).run(start)
        except _Numerical:
            continue  # a warm start went bad: redo from the slack basis
    return SimplexResult(NUMERICAL, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), 0)


def _no_rows(c, lb, ub) -> SimplexResult:
    n = len(c)
    x = np.zeros(n)
    for j in range(n):
        if c[j] > 0:
            x[j] = ub[j]
        elif c[j] < 0:
            x[j] = lb[j]
        else:
            x[j] = lb[j] if np.isfinite(lb[j]) else (ub[j] if np.isfinite(ub[j]) else 0.0)
    if not np.all(np.isfinite(x)):
        return SimplexResult(UNBOUNDED, np.inf, x, np.zeros(0), c.copy(), 0)
    if np.any(lb > ub + PRIMAL_TOL):
        return SimplexResult(INFEASIBLE, np.nan, x, np.zeros(0), c.copy(), 0)
    return SimplexResult(OPTIMAL, float(c @ x), x, np.zeros(0), c.copy(), 0)


class _Simplex:
    def __init__(self, c, A, row_lo, row_hi, lb, ub, max_iter):
        m, n = A.shape
        self.m, self.n = m, n
        self.M = np.hstack([A, -np.eye(m)])
        self.cost = np.concatenate([-c, np.zeros(m)])  # minimise internally
        self.lo = np.concatenate([np.asarray(lb, float), np.asarray(row_lo, float)])
        self.hi = np.concatenate([np.asarray(ub, float), np.asarray(row_hi, float)])
        self.max_iter = max_iter or (50 * (m + n) + 1000)
        self.iterations = 0
        self.bland = False
        self.degenerate = 0
        self.scale = max(1.0, float(np.max(np.abs(c))) if n else 1.0)

    # -- basis bookkeeping ----------------------------------------------------

    def _init_basis(self, basis: Basis | None) -> None:
        N = self.n + self.m
        self.is_basic = np.zeros(N, dtype=bool)
        self.z = np.zeros(N)
        if basis is not None and len(basis.basic) == self.m:
            self.basic = np.array(basis.basic, dtype=int)
            at_upper = np.asarray(basis.at_upper, dtype=bool)
        else:
            self.basic = np.arange(self.n, N)
            at_upper = np.zeros(N, dtype=bool)
        self.is_basic[self.basic] = True
        for j in range(N):
            if self.is_basic[j]:
                continue
            self.z[j] = self._rest_value(j, bool(at_upper[j]) if j < len(at_upper) else False)
        self._refactor()

    def _rest_value(self, j: int, upper: bool) -> float:
        lo, hi = self.lo[j], self.hi[j]
        if upper and np.isfinite(hi):
            return hi
        if np.isfinite(lo):
            return lo
        if np.isfinite(hi):
            return hi
        return 0.0

    def _refactor(self) -> None:
        B = self.M[:, self.basic]
        try:
            self.Binv = sla.inv(B, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            raise _Numerical() from None
        if not np.all(np.isfinite(self.Binv)):
            raise _Numerical()
        nb = ~self.is_basic
        rhs = -self.M[:, nb] @ self.z[nb]
        self.z[self.basic] = self.Binv @ rhs
        self.since_refactor = 0

    # -- main loop ------------------------------------------------------------

    def run(self, basis: Basis | None) -> SimplexResult:
        self._init_basis(basis)
        if basis is not None and self._dual_feasible():
            # typical after a bound change in branch-and-bound
            if self._dual_loop() == INFEASIBLE:
                return self._result(INFEASIBLE)
        status = self._loop(phase=1)
        if status == OPTIMAL:
            status = self._loop(phase=2)
        return self._result(status)

    def _infeasibility(self) -> np.ndarray:
        zb = self.z[self.basic]
        lo, hi = self.lo[self.basic], self.hi[self.basic]
        tol = PRIMAL_TOL * (1.0 + np.abs(zb))
        below = zb < lo - tol
        above = zb > hi + tol
        return np.where(below, -1.0, np.where(above, 1.0, 0.0))

    def _loop(self, phase: int) -> str:
        while True:
            if self.iterations >= self.max_iter:
                return ITERATION_LIMIT
            if phase == 1:
                sign = self._infeasibility()
                if not sign.any():
                    return OPTIMAL
                cb = sign
                cost_full = np.zeros(self.n + self.m)
            else:
                cb = self.cost[self.basic]
                cost_full = self.cost
            y = cb @ self.Binv
            d = cost_full - y @ self.M
            j, direction = self._price(d)
            if j < 0:
                if phase == 1:
                    return INFEASIBLE
                return OPTIMAL
            status = self._step(j, direction, phase)
            if status is not None:
                return status

    def _reduced_costs(self) -> np.ndarray:
        y = self.cost[self.basic] @ self.Binv
        return self.cost - y @ self.M

    def _dual_feasible(self) -> bool:
        d = self._reduced_costs()
        tol = DUAL_TOL * self.scale
        nb = ~self.is_basic
        z, lo, hi = self.z, self.lo, self.hi
        can_up = nb & (z < hi - PRIMAL_TOL) & (d < -tol)
        can_down = nb & (z > lo + PRIMAL_TOL) & (d > tol)
        return not np.any(can_up | can_down)

    def _dual_loop(self) -> str:
        """Dual simplex from a dual feasible basis; OPTIMAL means primal feasible too."""
        limit = self.iterations + 2 * (self.m + self.n) + 50
        nb_tol = 1e-9
        while self.iterations < limit:
            zb = self.z[self.basic]
            lo, hi = self.lo[self.basic], self.hi[self.basic]
            tol = PRIMAL_TOL * (1.0 + np.abs(zb))
            short = np.where(zb < lo - tol, lo - zb, 0.0)
            excess = np.where(zb > hi + tol, zb - hi, 0.0)
            worst = np.maximum(short, excess)
            r = int(np.argmax(worst))
            if worst[r] <= 0:
                return OPTIMAL
            raise_it = short[r] > 0
            target = lo[r] if raise_it else hi[r]
            row = self.Binv[r] @ self.M  # dz_r/dz_j = -row[j]
            d = self._reduced_costs()
            nb = ~self.is_basic
            z = self.z
            room_up = nb & (z < self.hi - PRIMAL_TOL)
            room_down = nb & (z > self.lo + PRIMAL_TOL)
            # moving z_j up changes z_r by -row[j]; down by +row[j]
            if raise_it:
                up_ok = room_up & (row < -nb_tol)
                dn_ok = room_down & (row > nb_tol)
            else:
                up_ok = room_up & (row > nb_tol)
                dn_ok = room_down & (row < -nb_tol)
            cand = up_ok | dn_ok
            if not cand.any():
                return INFEASIBLE
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(cand, np.abs(d) / np.abs(row), np.inf)
            best = float(np.min(ratio))
            ties = np.flatnonzero(ratio <= best + 1e-12)
            j = int(ties[np.argmax(np.abs(row[ties]))])
            alpha = self.Binv @ self.M[:, j]
            piv = alpha[r]
            if abs(piv) < PIVOT_TOL:
                raise _Numerical()
            step = -(target - zb[r]) / piv  # change of z_j
            self.z[j] += step
            self.z[self.basic] -= alpha * step
            out = self.basic[r]
            self.z[out] = target
            rowp = self.Binv[r] / piv
            self.Binv -= np.outer(alpha, rowp)
            self.Binv[r] = rowp
            self.is_basic[out] = False
            self.is_basic[j] = True
            self.basic[r] = j
            self.iterations += 1
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self._refactor()
                if not np.all(np.isfinite(self.z)):
                    raise _Numerical()
        return ITERATION_LIMIT

    def _price(self, d: np.ndarray) -> tuple[int, int]:
        tol = DUAL_TOL * self.scale
        nb = ~self.is_basic
        z, lo, hi = self.z, self.lo, self.hi
        can_up = nb & (z < hi - PRIMAL_TOL) & (d < -tol)
        can_down = nb & (z > lo + PRIMAL_TOL) & (d > tol)
        score = np.where(can_up | can_down, np.abs(d), 0.0)
        if not score.any():
            return -1, 0
        if self.bland:
            j = int(np.flatnonzero(score)[0])
        else:
            j = int(np.argmax(score))
        return j, (1 if can_up[j] else -1)

    def _step(self, j: int, direction: int, phase: int) -> str | None:
        alpha = self.Binv @ self.M[:, j]
        delta = -direction * alpha  # rate of change of each basic variable
        zb = self.z[self.basic]
        lo, hi = self.lo[self.basic], self.hi[self.basic]
        theta = self.hi[j] - self.lo[j]
        leave, leave_to_upper, limit = self._ratio_test(delta, zb, lo, hi, phase, theta)
        if leave >= 0:
            theta = limit
        if not np.isfinite(theta):
            return UNBOUNDED if phase == 2 else None
        self.iterations += 1
        if theta <= PRIMAL_TOL:
            self.degenerate += 1
            if self.degenerate > 3 * (self.m + self.n):
                self.bland = True
        else:
            self.degenerate = 0
        self.z[j] += direction * theta
        self.z[self.basic] += delta * theta
        if leave < 0:
            # bound flip, basis unchanged
            return None
        out = self.basic[leave]
        self.z[out] = self.hi[out] if leave_to_upper else self.lo[out]
        piv = alpha[leave]
        if abs(piv) < PIVOT_TOL:
            raise _Numerical()
        row = self.Binv[leave] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[leave] = row
        self.is_basic[out] = False
        self.is_basic[j] = True
        self.basic[leave] = j
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            saved = self.z.copy()
            self._refactor()
            # keep nonbasic positions, basic values are recomputed
            if not np.all(np.isfinite(self.z)):
                self.z = saved
                raise _Numerical()
        return None

    def _ratio_test(self, delta, zb, lo, hi, phase, flip):
        """Leaving row (or -1 for a bound flip) and whether it leaves at its upper bound."""
        idx = np.flatnonzero(np.abs(delta) > PIVOT_TOL)
        if idx.size == 0:
            return -1, False, flip
        r, x, l, h = delta[idx], zb[idx], lo[idx], hi[idx]
        tol = PRIMAL_TOL * (1.0 + np.abs(x))
        limit = np.full(idx.size, np.inf)
        upper = np.zeros(idx.size, dtype=bool)
        with np.errstate(invalid="ignore", divide="ignore"):
            below = (x < l - tol) if phase == 1 else np.zeros(idx.size, dtype=bool)
            above = (x > h + tol) if phase == 1 else np.zeros(idx.size, dtype=bool)
            normal = ~below & ~above
            m = below & (r > 0)
            limit[m] = (l[m] - x[m]) / r[m]
            m = above & (r < 0)
            limit[m] = (x[m] - h[m]) / -r[m]
            upper[m] = True
            m = normal & (r < 0) & np.isfinite(l)
            limit[m] = np.maximum(0.0, (x[m] - l[m]) / -r[m])
            m = normal & (r > 0) & np.isfinite(h)
            limit[m] = np.maximum(0.0, (h[m] - x[m]) / r[m])
            upper[m] = True
        best = float(np.min(limit))
        if not np.isfinite(best) or not best < flip - 1e-12:
            return -1, False, flip
        ties = np.flatnonzero(limit <= best + 1e-12)
        if self.bland:
            k = ties[np.argmin(self.basic[idx[ties]])]
        else:
            k = ties[np.argmax(np.abs(r[ties]))]
        return int(idx[k]), bool(upper[k]), float(limit[k])

    def _result(self, status: str) -> SimplexResult:
        n, m = self.n, self.m
        if status in (INFEASIBLE, UNBOUNDED, ITERATION_LIMIT):
            x = self.z[:n].copy()
            value = np.inf if status == UNBOUNDED else np.nan
            return SimplexResult(status, value, x, np.zeros(m), np.zeros(n), self.iterations,
                                 self._basis())
        if self.since_refactor > 16:
            self._refactor()
        x = self.z[:n].copy()
        y = self.cost[self.basic] @ self.Binv
        duals = -y
        reduced = -self.cost[:n] - self.M[:, :n].T @ duals
        value = float(-self.cost[:n] @ x)
        return SimplexResult(OPTIMAL, value, x, duals, reduced, self.iterations, self._basis())

    def _basis(self) -> Basis:
        at_upper = (~self.is_basic) & np.isfinite(self.hi) & (np.abs(self.z - self.hi) <= PRIMAL_TOL) \
            & ~(np.isfinite(self.lo) & (np.abs(self.z - self.lo) <= PRIMAL_TOL))
        return Basis(self.basic.copy(), at_upper)
