"""Recompute the algorithm comparison tables on the bundled 7x10 timing data.

Writes a markdown report (default reports/reproduction.md) listing every
computed value next to the published one, with the differences itemized.

    python3 scripts/reproduce_tables.py [--workers 4] [--out reports/reproduction.md]
"""

import argparse
import logging
import time
from pathlib import Path

import numpy as np

from flowshop_markov import bench
from flowshop_markov.evaluator import ct_no_fail
from flowshop_markov.instance import Schedule, load_instance
from flowshop_markov.rounds import machine_rounds
from flowshop_markov.search import select_first_job, select_last_job

log = logging.getLogger("reproduce")

ROOT = Path(__file__).resolve().parent.parent

# (machines) -> {column: (min, max)} as published
PUBLISHED_V = {
    3: {"benchmark": (40.3, 60.5), "alg1": (40.3, 55.5), "alg2": (47.3, 47.3),
        "alg3": (43.8, 52.3), "alg4": (44.8, 52.3)},
    4: {"benchmark": (46.3, 72.5), "alg1": (46.8, 65.5), "alg2": (55.8, 55.8),
        "alg3": (54.3, 62.3), "alg4": (54.8, 62.3)},
}
# the last published column is labelled "Alg 3 (IAJ)" a second time; read as alg4 IAJ
PUBLISHED_VI = {
    3: {"alg3": (43.8, 52.3), "alg3-iaj": (44.8, 52.4), "alg4": (44.8, 52.3), "alg4-iaj": (48.8, 52.2)},
    4: {"alg3": (54.3, 62.3), "alg3-iaj": (50.3, 65.5), "alg4": (54.8, 62.3), "alg4-iaj": (55.8, 65.6)},
    5: {"alg3": (53.3, 55.3), "alg3-iaj": (56.3, 62.0), "alg4": (55.3, 61.3), "alg4-iaj": (62.0, 65.3)},
}
ALG1_WORST_PUBLISHED = Schedule((10, 8, 7, 6, 3, 2, 9, 4, 5, 1))


def greedy_three_row(timing):
    """Greedy variant that scores a candidate c by max{T(1,c), T(2,prev), T(3,c)}.

    This is the min-max step exactly as printed for three machines; it is
    not a rule that generalises to other M, so it lives here and not in the
    library.
    """
    t = timing.entries
    n = timing.jobs
    first, last = select_first_job(timing) - 1, select_last_job(timing) - 1
    placed = [first]
    unused = sorted(set(range(n)) - {first, last})
    while unused:
        prev = placed[-1]
        scores = [max(t[0, c], t[1, prev], t[2, c]) for c in unused]
        pick = unused[int(np.argmin(scores))]
        placed.append(pick)
        unused.remove(pick)
    placed.append(last)
    sched = Schedule.from_indices(placed)
    return sched, ct_no_fail(timing, sched)


def fmt(v):
    return f"{v:.4g}"


def delta(got, want):
    d = got - want
    return "match" if abs(d) < 0.05 else f"{d:+.4g}"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=str(ROOT / "data" / "table1.csv"))
    ap.add_argument("--out", default=str(ROOT / "reports" / "reproduction.md"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    full = load_instance(args.data)
    lines = ["# Reproduction report", ""]
    lines += [
        "Completion times (failure-free, stage-sum model) for the first M machines of",
        "`data/table1.csv`. Published values are shown alongside; `delta` is computed minus published.",
        "",
    ]
    reports = {}
    for m in (3, 4, 5):
        t0 = time.perf_counter()
        inst = full.restrict_machines(m)
        reports[m] = bench.run_bench(inst, include_all_jobs=True, workers=args.workers)
        log.info("M=%d done in %.1fs", m, time.perf_counter() - t0)

    lines += ["## Algorithm comparison", ""]
    for m, pub in PUBLISHED_V.items():
        rep = reports[m]
        lines += [f"### {rep.descriptor}", "",
                  "| algorithm | min CT | published | delta | max CT | published | delta | permutations | best schedule |",
                  "|---|---|---|---|---|---|---|---|---|"]
        for name, (pmin, pmax) in pub.items():
            r = rep.row(name)
            lines.append(
                f"| {name} | {fmt(r.min_ct)} | {pmin} | {delta(r.min_ct, pmin)} | {fmt(r.max_ct)} | {pmax} "
                f"| {delta(r.max_ct, pmax)} | {r.permutations} | {r.schedule} |"
            )
        lines.append("")

    lines += ["## Waiting-time criteria, pinned vs free endpoints", ""]
    for m, pub in PUBLISHED_VI.items():
        rep = reports[m]
        lines += [f"### {rep.descriptor}", "",
                  "| variant | min CT | published | delta | max CT | published | delta | permutations | criterion |",
                  "|---|---|---|---|---|---|---|---|---|"]
        for name, (pmin, pmax) in pub.items():
            r = rep.row(name)
            lines.append(
                f"| {name} | {fmt(r.min_ct)} | {pmin} | {delta(r.min_ct, pmin)} | {fmt(r.max_ct)} | {pmax} "
                f"| {delta(r.max_ct, pmax)} | {r.permutations} | {fmt(r.criterion)} |"
            )
        lines.append("")

    inst3 = full.restrict_machines(3)
    best = reports[3].row("benchmark").schedule
    rounds = machine_rounds(inst3, best)
    lines += ["## Machine rounds on the optimal 3-machine schedule", "",
              f"schedule {best}, CT {fmt(rounds.completion_time)}", "",
              "| machine | total time | idle budget | rounds | published |", "|---|---|---|---|---|"]
    for mr, pub in zip(rounds.machines, (1.3754, 1.2426, 1.0)):
        lines.append(f"| {mr.machine} | {fmt(mr.total_time)} | {fmt(mr.idle_budget)} | {mr.rounds:.6f} | {pub} |")
    lines.append("")

    sched, ct = greedy_three_row(inst3.timing)
    alg1_worst_ct = ct_no_fail(inst3.timing, ALG1_WORST_PUBLISHED)
    lines += [
        "## Itemized differences", "",
        f"- Algorithm 1 interior maximum: the exhaustive 8! scan gives {fmt(reports[3].row('alg1').max_ct)}, "
        f"published 55.5. The published worst interior schedule {ALG1_WORST_PUBLISHED} itself evaluates "
        f"to {fmt(alg1_worst_ct)}.",
        f"- Algorithm 2 (3 machines): the library's anti-diagonal min-max rule gives "
        f"{fmt(reports[3].row('alg2').min_ct)}; scoring candidates by max{{T(1,c), T(2,prev), T(3,c)}} "
        f"gives {sched} with CT {fmt(ct)} (published 47.3). The 4-machine value matches under the library rule.",
        "- Algorithm 3 and 4 criteria are under-specified in the source; the library minimises "
        "wait(M) - wait(M-1) and the Frobenius gap between machine 1's running totals and machine M's "
        "running totals delayed by one slot. Reported worst values are the slowest schedule in the "
        "same scanned space.",
        "- Ties: exhaustive scans keep the lexicographically largest schedule among equal completion "
        "times, which reproduces the published optimal and worst schedules.",
        "- The equal-job-time (EJT) block is not reproduced: the durations behind it are not given.",
        "",
    ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines))
    print("\n".join(lines))


if __name__ == "__main__":
    main()
