"""Fixed-format MPS writer/reader and ``name value`` solution files.

Column and row names are mangled to 8 characters (``C0000001``, ``R0000001``).
The mangling table is written into the file as ``*`` comment lines so a file
can be read back into an identical model without side files.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Iterable

import numpy as np

from ..model import EQ, GE, LE, BigM, MilpModel, Row, Var

OBJ_ROW = "OBJ"
_SENSE_CODE = {EQ: "E", LE: "L", GE: "G"}
_CODE_SENSE = {v: k for k, v in _SENSE_CODE.items()}


class MpsError(ValueError):
    pass


def col_name(j: int) -> str:
    return f"C{j + 1:07d}"


def row_name(i: int) -> str:
    return f"R{i + 1:07d}"


def fmt_number(v: float) -> str:
    """At most 12 characters, stable under parse/format."""
    v = float(v)
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e11:
        return str(int(v))
    s = repr(v)
    if len(s) <= 12:
        return s
    for p in range(11, 0, -1):
        s = f"{v:.{p}g}"
        if len(s) <= 12:
            # format the rounded value again so that parse/format is a fixed point
            w = float(s)
            if w.is_integer() and abs(w) < 1e11:
                return str(int(w))
            r = repr(w)
            return r if len(r) <= 12 else s
    raise MpsError(f"cannot format {v!r} in 12 characters")


def _line(f1: str = "", f2: str = "", f3: str = "", f4: str = "") -> str:
    # fixed-format field columns: 2-3, 5-12, 15-22, 25-36
    s = " " + f1.ljust(2) + " " + f2.ljust(8)
    if f3 or f4:
        s += "  " + f3.ljust(8)
    if f4:
        s += "  " + f4.rjust(12)
    return s.rstrip()


def export_mps(model: MilpModel) -> str:
    out = [f"* TSSP model: {model.n_vars} columns, {model.n_rows} rows, {model.n_nonzeros} nonzeros"]
    for j, v in enumerate(model.vars):
        meta = {"name": v.name, "key": list(v.key), "vessels": list(v.vessels)}
        out.append(f"* COL {col_name(j)} {json.dumps(meta, separators=(',', ':'))}")
    for i, r in enumerate(model.rows):
        meta = {"name": r.name, "tag": r.tag, "vessels": list(r.vessels)}
        out.append(f"* ROW {row_name(i)} {json.dumps(meta, separators=(',', ':'))}")
    out.append(f"NAME          {model.name[:8]}")
    out.append("OBJSENSE")
    out.append("    MAX" if model.sense == "max" else "    MIN")
    out.append("ROWS")
    out.append(_line("N", OBJ_ROW))
    for i, r in enumerate(model.rows):
        out.append(_line(_SENSE_CODE[r.sense], row_name(i)))
    out.append("COLUMNS")
    by_col: list[list[tuple[str, float]]] = [[] for _ in model.vars]
    for j, c in sorted(model.obj.items()):
        if c != 0:
            by_col[j].append((OBJ_ROW, c))
    for i, r in enumerate(model.rows):
        for j, a in r.coefs:
            by_col[j].append((row_name(i), a))
    for j, entries in enumerate(by_col):
        if not entries:
            # keep empty columns visible to readers
            out.append(_line("", col_name(j), OBJ_ROW, "0"))
        for rn, a in entries:
            out.append(_line("", col_name(j), rn, fmt_number(a)))
    out.append("RHS")
    if model.obj_const:
        out.append(_line("", "RHS", OBJ_ROW, fmt_number(-model.obj_const)))
    for i, r in enumerate(model.rows):
        if r.rhs != 0:
            out.append(_line("", "RHS", row_name(i), fmt_number(r.rhs)))
    out.append("RANGES")
    out.append("BOUNDS")
    for j, v in enumerate(model.vars):
        cn = col_name(j)
        if v.binary and v.lo == 0 and v.hi == 1:
            out.append(_line("BV", "BND", cn))
            continue
        if v.lo == v.hi:
            out.append(_line("FX", "BND", cn, fmt_number(v.lo)))
            continue
        if v.lo == -math.inf:
            out.append(_line("MI", "BND", cn))
        elif v.lo != 0:
            out.append(_line("LO", "BND", cn, fmt_number(v.lo)))
        if v.hi != math.inf:
            out.append(_line("UP", "BND", cn, fmt_number(v.hi)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def import_mps(text: str) -> MilpModel:
    col_meta: dict[str, dict] = {}
    row_meta: dict[str, dict] = {}
    name = "TSSP"
    sense = "max"
    section = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    col_order: list[str] = []
    coefs: dict[str, dict[str, float]] = {}
    obj: dict[str, float] = {}
    rhs: dict[str, float] = {}
    obj_const = 0.0
    lo: dict[str, float] = {}
    hi: dict[str, float] = {}
    binary: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.startswith("*"):
            parts = raw.split(" ", 3)
            if len(parts) == 4 and parts[1] in ("COL", "ROW"):
                (col_meta if parts[1] == "COL" else row_meta)[parts[2]] = json.loads(parts[3])
            continue
        if not raw.strip():
            continue
        if not raw.startswith(" "):
            head = raw.split()
            section = head[0]
            if section == "NAME" and len(head) > 1:
                name = head[1]
            if section == "ENDATA":
                break
            continue
        f = raw.split()
        if section == "OBJSENSE":
            sense = "max" if f[0].upper() in ("MAX", "MAXIMIZE") else "min"
        elif section == "ROWS":
            code, rn = f
            if code == "N":
                continue
            if code not in _CODE_SENSE:
                raise MpsError(f"line {lineno}: unknown row type {code!r}")
            row_sense[rn] = _CODE_SENSE[code]
            row_order.append(rn)
        elif section == "COLUMNS":
            cn = f[0]
            if cn not in coefs:
                coefs[cn] = {}
                col_order.append(cn)
            for rn, val in zip(f[1::2], f[2::2]):
                if rn == OBJ_ROW:
                    if float(val) != 0:
                        obj[cn] = float(val)
                elif rn in row_sense:
                    coefs[cn][rn] = float(val)
                else:
                    raise MpsError(f"line {lineno}: unknown row {rn!r}")
        elif section == "RHS":
            for rn, val in zip(f[1::2], f[2::2]):
                if rn == OBJ_ROW:
                    obj_const = -float(val)
                else:
                    rhs[rn] = float(val)
        elif section == "RANGES":
            raise MpsError(f"line {lineno}: ranged rows are not supported")
        elif section == "BOUNDS":
            kind, cn = f[0], f[2]
            val = float(f[3]) if len(f) > 3 else 0.0
            if kind == "BV":
                binary.add(cn)
                lo[cn], hi[cn] = 0.0, 1.0
            elif kind == "FX":
                lo[cn] = hi[cn] = val
            elif kind == "LO":
                lo[cn] = val
            elif kind == "UP":
                hi[cn] = val
            elif kind == "MI":
                lo[cn] = -math.inf
            elif kind == "PL":
                hi[cn] = math.inf
            else:
                raise MpsError(f"line {lineno}: unsupported bound type {kind!r}")
    cidx = {cn: j for j, cn in enumerate(col_order)}
    vars_ = []
    for cn in col_order:
        meta = col_meta.get(cn, {})
        key = tuple(meta["key"]) if "key" in meta else ("mps", cn)
        vars_.append(Var(meta.get("name", cn), key, lo.get(cn, 0.0), hi.get(cn, math.inf),
                         cn in binary, tuple(meta.get("vessels", ()))))
    by_row: dict[str, list[tuple[int, float]]] = {rn: [] for rn in row_order}
    for cn in col_order:
        for rn, a in coefs[cn].items():
            by_row[rn].append((cidx[cn], a))
    rows = []
    for rn in row_order:
        meta = row_meta.get(rn, {})
        rows.append(Row(meta.get("name", rn), meta.get("tag", ""), tuple(sorted(by_row[rn])),
                        row_sense[rn], rhs.get(rn, 0.0), tuple(meta.get("vessels", ()))))
    objective = {cidx[cn]: c for cn, c in obj.items()}
    return MilpModel(vars_, rows, objective, BigM({}, {}, {}, {}, 0.0), obj_const, sense, name)


def coefficient_checksum(model: MilpModel) -> str:
    """Digest of dimensions plus every coefficient, objective, rhs and bound as exported."""
    h = hashlib.sha256()
    h.update(f"{model.n_vars}x{model.n_rows}".encode())
    for j, c in sorted(model.obj.items()):
        h.update(f"o{j}:{fmt_number(c)};".encode())
    for i, r in enumerate(model.rows):
        h.update(f"r{i}{r.sense}{fmt_number(r.rhs)}:".encode())
        for j, a in r.coefs:
            h.update(f"{j}={fmt_number(a)},".encode())
    for j, v in enumerate(model.vars):
        lo = fmt_number(v.lo) if math.isfinite(v.lo) else str(v.lo)
        hi = fmt_number(v.hi) if math.isfinite(v.hi) else str(v.hi)
        h.update(f"b{j}:{lo}:{hi}:{int(v.binary)};".encode())
    return h.hexdigest()


def write_solution(model: MilpModel, x: Iterable[float], mangled: bool = True) -> str:
    lines = []
    for j, val in enumerate(x):
        nm = col_name(j) if mangled else model.vars[j].name
        lines.append(f"{nm} {float(val)!r}")
    return "\n".join(lines) + "\n"


def import_solution(text: str, model: MilpModel) -> np.ndarray:
    """Vector aligned to the model's columns; missing names default to 0."""
    by_name = {col_name(j): j for j in range(model.n_vars)}
    by_name.update({v.name: j for j, v in enumerate(model.vars)})
    x = np.zeros(model.n_vars)
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#") or s.startswith("*"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise MpsError(f"line {lineno}: expected 'name value'")
        nm, val = parts
        if nm not in by_name:
            raise MpsError(f"line {lineno}: unknown name {nm!r}")
        j = by_name[nm]
        if j in seen:
            raise MpsError(f"line {lineno}: duplicate name {nm!r}")
        seen.add(j)
        x[j] = float(val)
    return x
