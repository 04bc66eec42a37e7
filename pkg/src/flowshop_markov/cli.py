"""Command-line entry point: ``flowshop-markov <command> --instance PATH ...``.

Exit status is 0 on success, 1 for usage or validation errors and 2 when an
exhaustive search would exceed its size cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Sequence

from . import bench, search
from .evaluator import evaluate
from .instance import FailureModel, FlowshopError, FlowshopInstance, Schedule, load_instance
from .markov import analytic_ct, simulate_ct
from .rounds import machine_rounds

log = logging.getLogger("flowshop_markov")

EXIT_OK, EXIT_USAGE, EXIT_CAP = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------- rendering


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return "" if v is None else str(v)


def render_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(headers)]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out += [line(r) for r in cells]
    return "\n".join(out) + "\n"


def render_csv(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(headers)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else _fmt(v) for v in r])
    return buf.getvalue()


def _emit(fmt: str, obj: dict, headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        return render_csv(headers, rows)
    return render_table(headers, rows)


def _kv(obj: dict) -> tuple[list[str], list[list]]:
    return ["field", "value"], [[k, v] for k, v in obj.items()]


# ---------------------------------------------------------------- inputs


def _instance(args) -> FlowshopInstance:
    inst = load_instance(args.instance)
    if getattr(args, "machines", None):
        inst = inst.restrict_machines(args.machines)
    if getattr(args, "ps", None) is not None:
        inst = inst.with_failure(FailureModel(args.ps))
    log.info("instance %s, p_s=%g", inst.descriptor, inst.p_success)
    return inst


def _schedule(args, inst: FlowshopInstance) -> Schedule:
    if args.schedule is None:
        return Schedule.identity(inst.timing.jobs)
    return Schedule.parse(args.schedule)


def _parse_values(text: str, integral: bool) -> list[float]:
    """``a,b,c`` or an inclusive ``start:stop[:step]`` range."""
    conv = int if integral else float
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise FlowshopError(f"bad range {text!r}; use start:stop[:step]")
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1.0
        if step <= 0:
            raise FlowshopError("range step must be positive")
        count = int((stop - start) / step + 1e-9) + 1 if stop >= start else 0
        vals = [conv(round(start + k * step, 12)) for k in range(count)]
    else:
        vals = [conv(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise FlowshopError(f"empty range {text!r}")
    return vals


# -------------------------------------------------------------- commands


def cmd_solve(args) -> str:
    inst = _instance(args)
    res = bench.solve(
        inst, args.algorithm, mode=args.mode, include_all_jobs=args.include_all_jobs,
        override=args.cap_override, workers=args.workers, tie_break=args.tie_break,
    )
    d = res.to_dict()
    return _emit(args.format, d, *_kv(d))


def cmd_evaluate(args) -> str:
    inst = _instance(args)
    ev = evaluate(inst.timing, _schedule(args, inst), inst.failure)
    d = ev.to_dict()
    if args.format == "json":
        return _emit("json", d, [], [])
    headers = ["machine", "total_time", "total_wait"]
    rows = [[t.machine, t.total_time, t.total_wait] for t in ev.timelines]
    summary = {k: v for k, v in d.items() if k not in ("machine_totals", "machine_waits")}
    if args.format == "csv":
        return render_csv(headers, rows)
    return render_table(*_kv(summary)) + "\n" + render_table(headers, rows)


def cmd_simulate(args) -> str:
    inst = _instance(args)
    if inst.failure is None:
        raise FlowshopError("simulate needs a success probability (--ps or p_success in the file)")
    sched = _schedule(args, inst)
    stats = simulate_ct(
        inst.timing, sched, inst.failure, args.trials, args.seed, workers=args.workers
    )
    d = stats.to_dict()
    d["analytic_ct"] = analytic_ct(inst.timing, sched, inst.failure)
    d["p_success"] = inst.failure.p_success
    return _emit(args.format, d, *_kv(d))


def cmd_rounds(args) -> str:
    inst = _instance(args)
    rep = machine_rounds(inst, _schedule(args, inst))
    headers = ["machine", "total_time", "idle_budget", "rounds", "below_one"]
    rows = [[m.machine, m.total_time, m.idle_budget, m.rounds, m.below_one] for m in rep.machines]
    return _emit(args.format, rep.to_dict(), headers, rows)


def cmd_bench(args) -> str:
    inst = _instance(args)
    algs = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algs:
        if a not in bench.ALGORITHMS:
            raise FlowshopError(f"unknown algorithm {a!r}")
    rep = bench.run_bench(
        inst, algs, include_all_jobs=args.include_all_jobs, mode=args.mode,
        override=args.cap_override, workers=args.workers,
    )
    headers = ["algorithm", "min_ct", "max_ct", "permutations", "wall_time_s", "best_schedule"]
    rows = [
        [r.algorithm, r.min_ct, r.max_ct, r.permutations, r.wall_time, list(r.schedule.order)]
        for r in rep.rows
    ]
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(headers, rows))
    out = _emit(args.format, rep.to_dict(), headers, rows)
    if args.format == "table":
        out = f"instance {rep.descriptor}\n" + out
        if rep.skipped:
            out += f"skipped (above cap): {', '.join(rep.skipped)}\n"
    return out


def cmd_sweep(args) -> str:
    kw = dict(override=args.cap_override, workers=args.workers)
    if args.mode in ("machines", "jobs"):
        xs = _parse_values(args.range, integral=True)
        if args.mode == "machines":
            data = bench.sweep_machines(xs, args.jobs, args.duration, **kw)
        else:
            data = bench.sweep_jobs(xs, args.machines_count, **kw)
        headers = [args.mode, "min_ct", "max_ct"]
    else:
        if not args.instance:
            raise FlowshopError("ps/pf sweeps need --instance")
        inst = _instance(args)
        if args.schedule:
            sched = Schedule.parse(args.schedule)
        else:
            sched = bench.solve(inst.with_failure(None), "alg1", **kw).best_schedule
        xs = _parse_values(args.range, integral=False)
        fn = bench.sweep_success if args.mode == "ps" else bench.sweep_failure
        data = fn(inst.timing, sched, xs)
        headers = [args.mode, "ct"]
    rows = [list(r) for r in data]
    obj = {"mode": args.mode, "columns": headers, "rows": rows}
    return _emit(args.format, obj, headers, rows)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", metavar="PATH", help="instance file (CSV or JSON)")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--ps", type=float, help="probability that a job succeeds, in (0, 1]")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--cap-override", action="store_true",
                        help="allow exhaustive scans above the size caps")
    common.add_argument("--machines", type=int, help="keep only machines 1..K of the instance")
    common.add_argument("--workers", type=int, default=1, help="processes for exhaustive scans")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="flowshop-markov", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="run one ordering algorithm")
    s.add_argument("--algorithm", choices=bench.ALGORITHMS, default="alg1")
    s.add_argument("--mode", choices=("literal", "frobenius"), default="frobenius")
    s.add_argument("--include-all-jobs", action="store_true",
                   help="alg3/alg4: scan every order instead of pinning the endpoints")
    s.add_argument("--tie-break", choices=(search.LEX_LARGEST, search.LEX_SMALLEST),
                   default=search.LEX_LARGEST)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("evaluate", parents=[common], help="evaluate a fixed schedule")
    s.add_argument("--schedule", help="job order, e.g. 10,4,5,9,7,2,8,3,6,1 (default identity)")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo CT under failures")
    s.add_argument("--schedule")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("rounds", parents=[common], help="machine reuse rounds (no failures)")
    s.add_argument("--schedule")
    s.set_defaults(func=cmd_rounds)

    s = sub.add_parser("bench", parents=[common], help="compare algorithms on one instance")
    s.add_argument("--algorithms", default=",".join(bench.ALGORITHMS))
    s.add_argument("--mode", choices=("literal", "frobenius"), default="frobenius")
    s.add_argument("--include-all-jobs", action="store_true",
                   help="add alg3/alg4 rows with free endpoints")
    s.add_argument("--csv-out", metavar="PATH", help="also write the table as CSV")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", parents=[common], help="CSV series behind the figures")
    s.add_argument("mode", choices=("machines", "jobs", "ps", "pf"))
    s.add_argument("--range", required=True,
                   help="comma list or inclusive start:stop[:step]")
    s.add_argument("--jobs", type=int, default=10, help="machines sweep: jobs per instance")
    s.add_argument("--duration", type=float, default=1.0, help="machines sweep: job duration")
    s.add_argument("--machines-count", type=int, default=3, help="jobs sweep: machine count")
    s.add_argument("--schedule", help="ps/pf sweeps: fixed schedule (default: alg1 optimum)")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command != "sweep" and not args.instance:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: --instance is required\n")
    try:
        sys.stdout.write(args.func(args))
    except search.CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FlowshopError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
