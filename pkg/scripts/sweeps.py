"""Write the CSV series behind the completion-time figures.

    python3 scripts/sweeps.py [--out reports/sweeps] [--workers 4]

Produces machines.csv (M = 1..10, 10 equal jobs), jobs.csv (3 machines,
jobs of length 1..N for N = 1..9), ps.csv and pf.csv (3-machine block of
data/table1.csv at its optimal schedule).
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from flowshop_markov import bench
from flowshop_markov.instance import load_instance

ROOT = Path(__file__).resolve().parent.parent


def write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "reports" / "sweeps"))
    ap.add_argument("--data", default=str(ROOT / "data" / "table1.csv"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    write(out / "machines.csv", ["machines", "min_ct", "max_ct"],
          bench.sweep_machines(range(1, 11), jobs=10, workers=args.workers))
    write(out / "jobs.csv", ["jobs", "min_ct", "max_ct"],
          bench.sweep_jobs(range(1, 10), machines=3, workers=args.workers))

    inst = load_instance(args.data).restrict_machines(3)
    sched = bench.solve(inst, "alg1").best_schedule
    grid = np.round(np.arange(0.05, 1.0001, 0.05), 2)
    write(out / "ps.csv", ["ps", "ct"], bench.sweep_success(inst.timing, sched, grid))
    write(out / "pf.csv", ["pf", "ct"], bench.sweep_failure(inst.timing, sched, np.round(1 - grid, 2)[::-1]))


if __name__ == "__main__":
    main()
