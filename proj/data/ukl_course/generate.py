#!/usr/bin/env python3
"""Regenerates the synthetic measurement files of the ukl_course bundle.

Effort is recorded per group in hours per student, so one per-phase
baseline applies to groups of any size. Four (phase, group) cells get a
fixed overrun; every other cell stays within +-5% of plan.
"""

import csv
import datetime as dt
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
SEED = 20051114

GROUPS = ["g1", "g2", "g3"]

# phase -> (first week, number of weeks, {leaf: planned hours per student})
PHASES = {
    "/requirements": (0, 2, {"elicitation": 12.0, "specification": 18.0}),
    "/design": (2, 2, {"architecture": 15.0, "detailed": 25.0}),
    "/implementation": (4, 4, {"coding": 60.0, "unit_test": 20.0}),
    "/test": (8, 2, {"integration": 20.0, "system": 30.0}),
}

# (phase, group) -> relative overrun
INJECTED = {
    ("/design", "g1"): 0.15,
    ("/implementation", "g2"): 0.30,
    ("/test", "g3"): 0.25,
    ("/requirements", "g3"): 0.12,
}

START = dt.datetime(2005, 10, 17, 9, 0, tzinfo=dt.timezone.utc)
WARN, VIOLATION = 0.10, 0.20


def split(total, parts, rng):
    weights = [rng.uniform(0.6, 1.4) for _ in range(parts)]
    s = sum(weights)
    values = [round(total * w / s, 2) for w in weights]
    values[-1] = round(total - sum(values[:-1]), 2)
    return values


def main():
    rng = random.Random(SEED)
    baseline_rows = []
    for phase, (_, _, leaves) in PHASES.items():
        baseline_rows.append(("effort", phase, sum(leaves.values())))

    with open(HERE / "baselines.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["metric", "process_step", "planned", "unit"])
        for metric, step, planned in baseline_rows:
            w.writerow([metric, step, f"{planned:g}", "h"])

    for group in GROUPS:
        rows = []
        for phase, (first_week, weeks, leaves) in PHASES.items():
            overrun = INJECTED.get((phase, group))
            dev = overrun if overrun is not None else rng.uniform(-0.05, 0.05)
            for leaf, planned in leaves.items():
                step = f"{phase}/{leaf}"
                total = planned * (1.0 + dev)
                for week, value in enumerate(split(total, weeks, rng)):
                    ts = START + dt.timedelta(weeks=first_week + week, days=GROUPS.index(group))
                    rows.append((ts, step, "effort", value, "h"))
                if phase == "/requirements":
                    continue
                for week in range(weeks):
                    ts = START + dt.timedelta(weeks=first_week + week, days=4)
                    rows.append((ts, step, "defects_major", rng.randint(0, 4), "count"))
                    rows.append((ts, step, "defects_minor", rng.randint(0, 12), "count"))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        with open(HERE / f"measurements_{group}.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["timestamp", "project", "process_step", "metric", "subject", "value", "unit"])
            for ts, step, metric, value, unit in rows:
                w.writerow([ts.strftime("%Y-%m-%dT%H:%M:%SZ"), "ukl_course", step, metric, group,
                            f"{value:g}" if isinstance(value, int) else f"{value:.2f}", unit])

    injected = [
        {"process_step": phase, "subject": group, "overrun": overrun,
         "status": "VIOLATION" if overrun > VIOLATION else "WARN"}
        for (phase, group), overrun in sorted(INJECTED.items())
    ]
    with open(HERE / "injected.json", "w") as f:
        json.dump({"warn": WARN, "violation": VIOLATION, "injected": injected}, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
