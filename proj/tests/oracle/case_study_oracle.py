#!/usr/bin/env python3
"""Pointwise oracle for the course example.

Recomputes every (phase, group) effort total from the raw CSV files,
classifies it against the phase plan with the catena's thresholds, and
checks that the command line tool flags exactly the same cells, which must
also be the injected overruns. Exits non-zero on any disagreement.
"""

import argparse
import csv
import json
import subprocess
import sys
import tempfile
import time
from collections import defaultdict
from pathlib import Path


def phase_of(step):
    parts = step.strip("/").split("/")
    return "/" + parts[0]


def classify(actual, planned, warn, violation):
    d = abs(actual - planned) / abs(planned)
    if d <= warn:
        return "OK"
    if d <= violation:
        return "WARN"
    return "VIOLATION"


def oracle_cells(data):
    catena = json.loads((data / "catena.json").read_text())
    check = next(f for f in catena["function_instances"] if f["id"] == "effort_check")
    warn, violation = check["params"]["warn"], check["params"]["violation"]

    planned = {}
    with open(data / "baselines.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["metric"] == "effort":
                planned[row["process_step"]] = float(row["planned"])

    totals = defaultdict(float)
    for path in sorted(data.glob("measurements_g*.csv")):
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row["metric"] == "effort":
                    totals[(phase_of(row["process_step"]), row["subject"])] += float(row["value"])

    cells = {}
    for (phase, subject), actual in totals.items():
        status = classify(actual, planned[phase], warn, violation)
        if status != "OK":
            cells[(phase, subject)] = status
    return cells, len(totals)


def run(cmd):
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"command failed ({proc.returncode}): {' '.join(cmd)}\n{proc.stderr}")
    return proc.stdout


def engine_cells(cli, data):
    sources = json.loads((data / "sources.json").read_text())
    with tempfile.TemporaryDirectory() as store:
        base = [cli, "--store", store]
        start = time.monotonic()
        run(base + ["init", str(data)])
        for src in sources:
            if src["kind"] == "csv-file":
                run(base + ["ingest", "ukl_course", str(data / src["location"]), "--source", src["source"]])
        result = json.loads(run(base + ["run", "ukl_course"]))
        elapsed = time.monotonic() - start
    cells = {}
    for point in result["functions"]["effort_check"]["value"]["points"]:
        if point["status"] != "OK":
            cells[(point["process_step"], point["subject"])] = point["status"]
    return cells, elapsed


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--data", required=True, type=Path)
    args = parser.parse_args()

    expected, evaluated = oracle_cells(args.data)
    injected = {
        (i["process_step"], i["subject"]): i["status"]
        for i in json.loads((args.data / "injected.json").read_text())["injected"]
    }
    engine, elapsed = engine_cells(args.cli, args.data)

    ok = True
    if expected != injected:
        print(f"oracle {sorted(expected.items())} != injected {sorted(injected.items())}")
        ok = False
    if engine != expected:
        print(f"engine {sorted(engine.items())} != oracle {sorted(expected.items())}")
        ok = False
    if elapsed >= 5.0:
        print(f"end-to-end run took {elapsed:.2f} s")
        ok = False
    print(f"{'PASS' if ok else 'FAIL'}: {len(engine)} of {evaluated} cells flagged, "
          f"oracle agrees, {elapsed:.2f} s end to end")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
