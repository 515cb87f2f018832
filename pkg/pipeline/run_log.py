"""
Run ledger for law suites and adequacy checks.
Appends one JSON line per run: cases, failures, exchanges and time.
"""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional


def log_run(
    suite: str,
    cases: int,
    failures: int,
    steps: int,
    elapsed: float,
    seed: Optional[int] = None,
    timestamp: Optional[str] = None,
    log_file: str = "data/run_log.jsonl"
):
    """
    Log a run to a JSONL file.

    Args:
        suite: Suite name ("adequacy" for corpus runs)
        cases: Number of cases checked
        failures: Number of failed cases
        steps: Engine exchanges spent (0 when not counted)
        elapsed: Wall-clock seconds
        seed: Random seed, if any
        timestamp: ISO timestamp (default: now)
        log_file: Path to log file (default: data/run_log.jsonl)
    """
    if timestamp is None:
        timestamp = datetime.now().isoformat()

    log_entry = {
        "suite": suite,
        "cases": cases,
        "failures": failures,
        "steps": steps,
        "elapsed": round(elapsed, 3),
        "seed": seed,
        "timestamp": timestamp
    }

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    with open(log_file, "a") as f:
        f.write(json.dumps(log_entry) + "\n")


def summarize_runs(log_file: str = "data/run_log.jsonl") -> Dict:
    """
    Totals from the run ledger.

    Returns:
        Dictionary with run count, total time and per-suite cases/failures
    """
    if not os.path.exists(log_file):
        return {"runs": 0, "elapsed": 0.0, "by_suite": {}}

    runs = 0
    elapsed = 0.0
    by_suite: Dict[str, Dict] = {}

    with open(log_file, "r") as f:
        for line in f:
            if not line.strip():
                continue
            entry = json.loads(line)
            runs += 1
            elapsed += entry["elapsed"]
            totals = by_suite.setdefault(entry["suite"], {"runs": 0, "cases": 0, "failures": 0})
            totals["runs"] += 1
            totals["cases"] += entry["cases"]
            totals["failures"] += entry["failures"]

    return {"runs": runs, "elapsed": round(elapsed, 3), "by_suite": by_suite}
