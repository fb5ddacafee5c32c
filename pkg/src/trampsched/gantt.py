"""Berth-window Gantt charts of a schedule, as SVG or plain text.

One row per time window (grouped by berth), one bar per loading interval
[arrive, arrive + gamma * pallets]. Schedules are validated first; an invalid
one is refused rather than drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .instance import Instance
from .schedule import Schedule
from .validate import InfeasibleSchedule, check_schedule

OVERLAP_TOL = 1e-6
_PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
            "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")


@dataclass(frozen=True)
class Bar:
    window: str
    vessel: str
    start_h: float
    end_h: float
    pallets: float


@dataclass(frozen=True)
class Row:
    berth: str
    window: str
    lower_h: float
    upper_h: float
    bars: tuple[Bar, ...]


def chart_rows(inst: Instance, schedule: Schedule, check: bool = True) -> list[Row]:
    if check:
        rep = check_schedule(inst, schedule)
        if not rep.ok:
            raise InfeasibleSchedule(rep)
    bars: dict[str, list[Bar]] = {w.id: [] for w in inst.windows}
    for vid in sorted(schedule.vessels):
        for d in schedule.vessels[vid].dockings:
            gamma = inst.window(d.window).load_time_per_pallet_h
            bars[d.window].append(Bar(d.window, vid, d.arrive_h, d.arrive_h + gamma * d.pallets, d.pallets))
    rows = []
    for w in sorted(inst.windows, key=lambda w: (w.berth, w.lower_h, w.id)):
        bs = sorted(bars[w.id], key=lambda b: (b.start_h, b.vessel))
        for a, b in zip(bs, bs[1:]):
            # a validated schedule never gets here
            assert b.start_h >= a.end_h - OVERLAP_TOL, f"overlapping bars in {w.id}: {a.vessel}, {b.vessel}"
        rows.append(Row(w.berth, w.id, w.lower_h, w.upper_h, tuple(bs)))
    return rows


def _colors(schedule: Schedule) -> dict[str, str]:
    return {v: _PALETTE[k % len(_PALETTE)] for k, v in enumerate(sorted(schedule.vessels))}


def render_svg(inst: Instance, schedule: Schedule, title: str = "", check: bool = True) -> str:
    rows = chart_rows(inst, schedule, check)
    end = max([r.upper_h for r in rows] + [inst.horizon_h, 1.0])
    left, top, width, row_h = 110, 40, 760, 26
    scale = width / end
    height = top + row_h * len(rows) + 40
    color = _colors(schedule)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + width + 20}" height="{height}" '
           f'font-family="sans-serif" font-size="11">']
    if title:
        out.append(f'<text x="{left}" y="18" font-size="13">{escape(title)}</text>')
    # hour ticks
    step = max(1, round(end / 10))
    for h in range(0, int(end) + 1, step):
        x = left + h * scale
        out.append(f'<line x1="{x:.1f}" y1="{top - 6}" x2="{x:.1f}" y2="{height - 30}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.1f}" y="{height - 16}" text-anchor="middle">{h}</text>')
    for k, r in enumerate(rows):
        y = top + k * row_h
        out.append(f'<text x="{left - 6}" y="{y + 16}" text-anchor="end">{escape(r.berth)}/{escape(r.window)}</text>')
        out.append(f'<rect x="{left + r.lower_h * scale:.1f}" y="{y + 3}" '
                   f'width="{(r.upper_h - r.lower_h) * scale:.1f}" height="{row_h - 6}" '
                   f'fill="none" stroke="#888" stroke-dasharray="3,2"/>')
        for b in r.bars:
            w = max((b.end_h - b.start_h) * scale, 1.0)
            out.append(f'<rect x="{left + b.start_h * scale:.1f}" y="{y + 5}" width="{w:.1f}" '
                       f'height="{row_h - 10}" fill="{color[b.vessel]}">'
                       f'<title>{escape(b.vessel)} {b.start_h:.2f}-{b.end_h:.2f} h, {b.pallets:.0f} pallets</title></rect>')
            out.append(f'<text x="{left + b.start_h * scale + 2:.1f}" y="{y + 16}" fill="#fff">{escape(b.vessel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_text(inst: Instance, schedule: Schedule, cols: int = 72, check: bool = True) -> str:
    rows = chart_rows(inst, schedule, check)
    end = max([r.upper_h for r in rows] + [inst.horizon_h, 1.0])
    scale = cols / end
    marks = {v: chr(ord("A") + k % 26) for k, v in enumerate(sorted(schedule.vessels))}
    lines = [f"{'window':<14}|{'0':<{cols // 2}}{end / 2:<{cols - cols // 2}.0f}| {end:.0f} h"]
    for r in rows:
        cells = [" "] * cols
        lo, hi = int(r.lower_h * scale), min(cols, max(int(r.upper_h * scale), int(r.lower_h * scale) + 1))
        for i in range(lo, hi):
            cells[i] = "."
        for b in r.bars:
            a = min(cols - 1, int(b.start_h * scale))
            z = min(cols, max(a + 1, int(round(b.end_h * scale))))
            mark = marks[b.vessel]
            for i in range(a, z):
                cells[i] = mark
        label = f"{r.berth}/{r.window}"
        lines.append(f"{label:<14}|{''.join(cells)}|")
        for b in r.bars:
            lines.append(f"{'':<14}  {marks[b.vessel]} {b.vessel}: {b.start_h:.2f}-{b.end_h:.2f} h, {b.pallets:.0f} pallets")
    return "\n".join(lines) + "\n"
