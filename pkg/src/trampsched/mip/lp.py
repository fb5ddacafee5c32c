"""LP relaxation kernel: array form of a MilpModel and the two LP engines.

``simplex`` is the in-house dense bounded-variable simplex; ``highs`` goes
through :func:`scipy.optimize.linprog`. ``auto`` picks the dense simplex for
small models and HiGHS otherwise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..model import EQ, GE, LE, MilpModel
from . import simplex

OPTIMAL = simplex.OPTIMAL
INFEASIBLE = simplex.INFEASIBLE
UNBOUNDED = simplex.UNBOUNDED
NUMERICAL = simplex.NUMERICAL
TIME_LIMIT = "time_limit"

# dense simplex is used below this many matrix entries (rows * (rows + cols))
AUTO_DENSE_LIMIT = 60_000


@dataclass
class LpData:
    c: np.ndarray
    A: sp.csr_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integer: np.ndarray
    const: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    @classmethod
    def from_model(cls, model: MilpModel) -> "LpData":
        n, m = model.n_vars, model.n_rows
        c = np.zeros(n)
        for j, v in model.obj.items():
            c[j] = v
        rows, cols, vals = [], [], []
        row_lo = np.empty(m)
        row_hi = np.empty(m)
        for i, r in enumerate(model.rows):
            for j, a in r.coefs:
                rows.append(i)
                cols.append(j)
                vals.append(a)
            if r.sense == LE:
                row_lo[i], row_hi[i] = -np.inf, r.rhs
            elif r.sense == GE:
                row_lo[i], row_hi[i] = r.rhs, np.inf
            else:
                assert r.sense == EQ
                row_lo[i] = row_hi[i] = r.rhs
        A = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
        lb = np.array([v.lo for v in model.vars], dtype=float)
        ub = np.array([v.hi for v in model.vars], dtype=float)
        integer = np.array([v.binary for v in model.vars], dtype=bool)
        return cls(c, A, row_lo, row_hi, lb, ub, integer, model.obj_const)


@dataclass
class LpResult:
    status: str
    value: float  # includes the objective constant
    x: np.ndarray
    duals: np.ndarray
    reduced: np.ndarray
    engine: str
    seconds: float
    basis: simplex.Basis | None = None


def _engine_for(data: LpData, engine: str) -> str:
    if engine != "auto":
        return engine
    m, n = data.shape
    return "simplex" if m * (m + n) <= AUTO_DENSE_LIMIT else "highs"


def solve_lp(data: LpData, lb: np.ndarray | None = None, ub: np.ndarray | None = None,
             engine: str = "auto", time_limit: float | None = None,
             basis: simplex.Basis | None = None) -> LpResult:
    lb = data.lb if lb is None else lb
    ub = data.ub if ub is None else ub
    start = time.perf_counter()
    eng = _engine_for(data, engine)
    m, n = data.shape
    if np.any(lb > ub + 1e-12):
        return LpResult(INFEASIBLE, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), eng,
                        time.perf_counter() - start)
    if eng == "simplex":
        res = simplex.solve(data.c, data.A.toarray(), data.row_lo, data.row_hi, lb, ub, basis=basis)
        value = res.value + data.const if res.status == OPTIMAL else res.value
        return LpResult(res.status, value, res.x, res.duals, res.reduced, eng,
                        time.perf_counter() - start, res.basis)
    if eng == "highs":
        return _solve_highs(data, lb, ub, time_limit, start)
    raise ValueError(f"unknown LP engine {engine!r}")


def _solve_highs(data: LpData, lb, ub, time_limit, start) -> LpResult:
    m, n = data.shape
    eq = data.row_lo == data.row_hi
    has_hi = ~eq & np.isfinite(data.row_hi)
    has_lo = ~eq & np.isfinite(data.row_lo)
    A = data.A
    A_ub = sp.vstack([A[has_hi], -A[has_lo]]).tocsr()
    b_ub = np.concatenate([data.row_hi[has_hi], -data.row_lo[has_lo]])
    A_eq = A[eq]
    b_eq = data.row_lo[eq]
    options = {"presolve": True}
    if time_limit is not None:
        options["time_limit"] = max(1e-3, float(time_limit))
    res = linprog(
        -data.c,
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if A_eq.shape[0] else None,
        bounds=np.column_stack([lb, ub]),
        method="highs",
        options=options,
    )
    secs = time.perf_counter() - start
    if res.status == 2:
        return LpResult(INFEASIBLE, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), "highs", secs)
    if res.status == 3:
        return LpResult(UNBOUNDED, np.inf, np.full(n, np.nan), np.zeros(m), np.zeros(n), "highs", secs)
    if res.status == 1:
        return LpResult(TIME_LIMIT, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), "highs", secs)
    if res.status != 0:
        return LpResult(NUMERICAL, np.nan, np.full(n, np.nan), np.zeros(m), np.zeros(n), "highs", secs)
    duals = np.zeros(m)
    k_hi = int(has_hi.sum())
    mu = res.ineqlin.marginals if A_ub.shape[0] else np.zeros(0)
    duals[np.flatnonzero(has_hi)] = -mu[:k_hi]
    duals[np.flatnonzero(has_lo)] = mu[k_hi:]
    if A_eq.shape[0]:
        duals[np.flatnonzero(eq)] = -res.eqlin.marginals
    x = np.asarray(res.x, dtype=float)
    reduced = data.c - data.A.T @ duals
    return LpResult(OPTIMAL, float(data.c @ x) + data.const, x, duals, reduced, "highs", secs)


def lp_solve(model: MilpModel, engine: str = "auto", time_limit: float | None = None
             ) -> tuple[float, np.ndarray, np.ndarray, str]:
    """Solve the LP relaxation of a model: (value, primal, duals, status)."""
    res = solve_lp(LpData.from_model(model), engine=engine, time_limit=time_limit)
    return res.value, res.x, res.duals, res.status
