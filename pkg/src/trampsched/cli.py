"""Command line front end: gen, solve, heuristic, gantt, validate.

Exit codes: 0 success, 2 validation failure, 3 time limit hit (incumbent
returned), 4 input error. Printed objective values come from the validator's
recomputation, never straight from the solver.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import gantt, heuristic, netgen, pipeline
from . import model as mdl
from .instance import Instance, InstanceError, read_instance, write_instance
from .mip import bnb
from .mip.mps import export_mps
from .schedule import Schedule, dock_stats
from .validate import check_schedule, objective_recompute

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TIMEOUT = 3
EXIT_INPUT = 4
DEFAULT_TIME_LIMIT = 1800.0

log = logging.getLogger("trampsched")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are input errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class InputError(Exception):
    pass


def time_limit(flag: float | None) -> float:
    """Explicit flag, then SCHEDULER_TIME_LIMIT_S, then the 30-minute default."""
    if flag is not None:
        return flag
    env = os.environ.get(bnb.TIME_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"{bnb.TIME_ENV}={env!r} is not a number") from None
    return DEFAULT_TIME_LIMIT


def _load(path: str) -> Instance:
    try:
        return read_instance(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_schedule(path: str) -> Schedule:
    try:
        with open(path, encoding="utf-8") as fh:
            return Schedule.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed schedule ({exc})") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _print_violations(rep, out=sys.stderr) -> None:
    print(f"schedule rejected: {len(rep.violations)} violation(s)", file=out)
    for v in rep.violations:
        print(f"  {v}", file=out)


def _gap_pct(bound: float, f: float) -> float:
    return 100.0 * bnb.rel_gap(bound, f)


def _stats_lines(inst: Instance, sched: Schedule) -> list[str]:
    st = dock_stats(inst, sched)
    return [
        f"docks per vessel (avg - max): {st.avg_docks:.2f} - {st.max_docks}",
        f"used capacity:   {100 * st.avg_used_capacity:.1f}%",
        f"cargo satisfied: {100 * st.cargo_satisfied:.1f}%",
    ]


# -- commands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        spec = netgen.family_from_name(args.family, args.pallets, args.seed)
        cfg = netgen.GeneratorConfig(windows_per_vessel=args.windows_per_vessel,
                                     max_shared_windows=args.max_shared)
        inst = netgen.generate(spec, cfg)
    except netgen.SpecError as exc:
        raise InputError(str(exc)) from None
    out = args.out or f"{spec.name}_{spec.total_pallets}_{spec.seed}.json"
    write_instance(inst, out)
    total = sum(c.size_pallets for c in inst.contracts)
    print(f"{spec.name}: {len(inst.vessels)} vessels, {len(inst.berths)} berths, "
          f"{len(inst.windows)} windows, {len(inst.contracts)} contracts, {total:.0f} pallets -> {out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    limit = time_limit(args.time_limit)
    opts = bnb.SolverOptions(time_limit_s=limit, branching=args.branching)
    t0 = time.process_time()
    net, red, model = pipeline.prepare(inst, reduce=not args.no_reduce)
    if args.explain_reduction and red is not None:
        _write(args.explain_reduction, red.to_json() + "\n")
    if args.mps_out:
        _write(args.mps_out, export_mps(model))
    res = bnb.solve(model, opts, start=mdl.idle_assignment(model, inst))
    cpu = time.process_time() - t0
    if res.x is None:
        print(f"status: {res.status} (no schedule)")
        return EXIT_TIMEOUT if res.status == bnb.NO_SOLUTION else EXIT_INVALID
    sched = mdl.extract_schedule(model, inst, res.x)
    rep = check_schedule(inst, sched)
    if not rep.ok:
        _print_violations(rep)
        return EXIT_INVALID
    f = objective_recompute(inst, sched, check=False)
    if args.schedule_out:
        _write(args.schedule_out, sched.to_json())
    c = model.counts()
    print(f"instance: {args.instance}")
    print(f"model: {model.n_vars} vars ({c.get('x', 0) + c.get('y', 0)} binary), {model.n_rows} rows; "
          f"reduction removed {red.arcs_removed if red else 0} arcs, {red.nodes_removed if red else 0} nodes")
    print(f"status: {res.status}")
    print(f"f: {f:.2f}")
    print(f"bound: {res.bound:.2f}")
    print(f"GAP(%): {_gap_pct(max(res.bound, f), f):.2f}")
    print(f"T_CPU(secs): {cpu:.2f}  wall: {res.wall_s:.2f}  nodes: {res.nodes}")
    for line in _stats_lines(inst, sched):
        print(line)
    return EXIT_TIMEOUT if res.status == bnb.FEASIBLE else EXIT_OK


def cmd_heuristic(args) -> int:
    inst = _load(args.instance)
    opts = heuristic.HeuristicOptions(time_limit_s=time_limit(args.time_limit), branching=args.branching)
    net, _, _ = pipeline.prepare(inst)
    s1, s2, rep = heuristic.run(inst, net, opts)
    for label, s in (("phase 1", s1), ("phase 2", s2)):
        vr = check_schedule(inst, s)
        if not vr.ok:
            print(f"{label} schedule failed validation", file=sys.stderr)
            _print_violations(vr)
            return EXIT_INVALID
    f1 = objective_recompute(inst, s1, check=False)
    f2 = objective_recompute(inst, s2, check=False)
    if args.schedule_out:
        _write(args.schedule_out, s2.to_json())
    if args.phase1_out:
        _write(args.phase1_out, s1.to_json())
    if args.report_out:
        _write(args.report_out, rep.to_json())
    if args.trace:
        for line in rep.trace():
            print(line)
    print(f"instance: {args.instance}")
    print(f"f(H1): {f1:.2f}")
    print(f"f(H2): {f2:.2f}")
    if rep.bound < float("inf"):
        print(f"LP bound: {rep.bound:.2f}  GAP vs bound(%): {_gap_pct(max(rep.bound, f2), f2):.2f}")
    print(f"H1: {rep.h1_s:.2f}  H2: {rep.h2_s:.2f}  HT: {rep.ht_s:.2f} s")
    print(f"fixing order: {' -> '.join(rep.fixing_order)}")
    print(f"pairs evaluated: {len(rep.pairs_evaluated)}")
    for line in _stats_lines(inst, s2):
        print(line)
    if rep.timeouts:
        print(f"time limit reached ({len(rep.timeouts)} sub-solve(s) cut short)")
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_gantt(args) -> int:
    inst = _load(args.instance)
    sched = _load_schedule(args.schedule)
    rep = check_schedule(inst, sched)
    if not rep.ok:
        _print_violations(rep)
        return EXIT_INVALID
    fmt = args.format or ("text" if not args.out or args.out.endswith(".txt") else "svg")
    text = gantt.render_text(inst, sched) if fmt == "text" else gantt.render_svg(inst, sched, title=args.schedule)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    sched = _load_schedule(args.schedule)
    rep = check_schedule(inst, sched)
    if not rep.ok:
        _print_violations(rep, sys.stdout)
        return EXIT_INVALID
    print(f"ok: f = {objective_recompute(inst, sched, check=False):.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trampsched", description="Tramp ship scheduling with berth time windows.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("family", help="family name such as S4B5W2C18")
    g.add_argument("--pallets", type=int, required=True)
    g.add_argument("--seed", default="1", help="integer or A-D")
    g.add_argument("--out")
    g.add_argument("--windows-per-vessel", type=int)
    g.add_argument("--max-shared", type=int)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve the full model by branch-and-bound")
    s.add_argument("instance")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--mps-out")
    s.add_argument("--schedule-out")
    s.add_argument("--explain-reduction", metavar="PATH", help="write the reduction report as JSON")
    s.add_argument("--no-reduce", action="store_true")
    s.add_argument("--branching", choices=("most-fractional", "pseudo-cost"), default="pseudo-cost")
    s.set_defaults(func=cmd_solve)

    h = sub.add_parser("heuristic", help="run the two-phase heuristic")
    h.add_argument("instance")
    h.add_argument("--time-limit", type=float)
    h.add_argument("--trace", action="store_true", help="print the IT 1.k / IT 2.k log")
    h.add_argument("--schedule-out")
    h.add_argument("--phase1-out")
    h.add_argument("--report-out")
    h.add_argument("--branching", choices=("most-fractional", "pseudo-cost"), default="pseudo-cost")
    h.set_defaults(func=cmd_heuristic)

    c = sub.add_parser("gantt", help="render a schedule as SVG or text")
    c.add_argument("schedule")
    c.add_argument("instance")
    c.add_argument("--out")
    c.add_argument("--format", choices=("svg", "text"))
    c.set_defaults(func=cmd_gantt)

    v = sub.add_parser("validate", help="check a schedule against an instance")
    v.add_argument("schedule")
    v.add_argument("instance")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
