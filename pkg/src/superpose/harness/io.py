"""Run artifacts: one JSON document per run plus flat CSV tables.

Floats are written with ``repr`` so a CSV read back gives the same doubles,
and nothing time- or host-dependent goes into the aggregate files.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from .. import __version__
from ..bernoulli_bounds import IotaBreakdown
from .montecarlo import MonteCarloResult, TrialRecord
from .report import BoundReport, BoundRow

TRIAL_COLUMNS = ("trial", "seed", "mistakes", "alpha", "residual", "power", "duplicate")
AGGREGATE_COLUMNS = ("quantity", "value")
HISTOGRAM_COLUMNS = ("l", "alpha", "count")
BOUND_COLUMNS = tuple(f.name for f in dataclasses.fields(BoundRow))
PHI_COLUMNS = ("l", "zeta_star", "phi", "branch", "five_over_l")
IOTA_COLUMNS = ("L", "alpha0", "v", "iota1", "iota2", "iota3", "iota4", "iota5", "iota", "iota_sqrt_L", "iota4_range_empty")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str | Path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _finite_or_none(obj):
    # JSON has no inf/nan; write them as null rather than emitting invalid JSON
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    return obj


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_finite_or_none(json.loads(json.dumps(payload, default=_json_default))), indent=2, sort_keys=True)
    path.write_text(text + "\n")
    return path


def trial_rows(records):
    for r in records:
        yield (r.trial, r.seed, r.mistakes, r.alpha, r.residual, r.power, r.duplicate)


def write_trials_csv(path, records) -> Path:
    return write_csv(path, TRIAL_COLUMNS, trial_rows(records))


def read_trials_csv(path) -> list[TrialRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRIAL_COLUMNS:
            raise ValueError(f"unexpected trial columns {reader.fieldnames}")
        return [
            TrialRecord(
                trial=int(row["trial"]),
                seed=int(row["seed"]),
                mistakes=int(row["mistakes"]),
                alpha=float(row["alpha"]),
                residual=float(row["residual"]),
                power=float(row["power"]),
                duplicate=row["duplicate"] == "1",
            )
            for row in reader
        ]


def aggregate_rows(result: MonteCarloResult):
    code = result.code
    return [
        ("L", code.L),
        ("M", code.M),
        ("n", code.n),
        ("R_nats", code.R),
        ("alpha0", result.config.alpha0),
        ("threshold_mistakes", result.threshold),
        ("trials", len(result.records)),
        ("counted", result.counted),
        ("excluded_duplicates", result.excluded_duplicates),
        ("events", result.events),
        ("p_hat", result.p_hat),
        ("ci_low", result.ci_low),
        ("ci_high", result.ci_high),
        ("master_seed", result.config.master_seed),
    ]


def write_aggregate_csv(path, result: MonteCarloResult) -> Path:
    return write_csv(path, AGGREGATE_COLUMNS, aggregate_rows(result))


def write_histogram_csv(path, result: MonteCarloResult) -> Path:
    L = result.code.L
    return write_csv(path, HISTOGRAM_COLUMNS, ((l, l / L, int(c)) for l, c in enumerate(result.histogram)))


def write_bounds_csv(path, report: BoundReport) -> Path:
    return write_csv(path, BOUND_COLUMNS, (dataclasses.astuple(r) for r in report.rows))


def iota_row(ib: IotaBreakdown):
    return (ib.L, ib.alpha0, ib.v, ib.iota1, ib.iota2, ib.iota3, ib.iota4, ib.iota5, ib.iota, ib.iota * math.sqrt(ib.L), ib.iota4_range_empty)


def run_payload(result: MonteCarloResult, bounds: BoundReport | None = None) -> dict:
    payload = {
        "version": __version__,
        "master_seed": result.config.master_seed,
        "config": result.config.to_dict(),
        "code": {"L": result.code.L, "M": result.code.M, "n": result.code.n, "R_nats": result.code.R, "K_bits": result.code.K},
        "results": {k: v for k, v in aggregate_rows(result)},
        "histogram": result.histogram,
    }
    payload["results"]["ci_halfwidth"] = result.ci_halfwidth
    if bounds is not None:
        payload["bounds"] = bounds.to_dict()
    return payload


def write_run(out_dir, result: MonteCarloResult, bounds: BoundReport | None = None) -> dict[str, Path]:
    """Write run.json, trials.csv, aggregate.csv, histogram.csv and (if given) bounds_per_l.csv."""
    out = Path(out_dir)
    paths = {
        "run": write_json(out / "run.json", run_payload(result, bounds)),
        "trials": write_trials_csv(out / "trials.csv", result.records),
        "aggregate": write_aggregate_csv(out / "aggregate.csv", result),
        "histogram": write_histogram_csv(out / "histogram.csv", result),
    }
    if bounds is not None:
        paths["bounds"] = write_bounds_csv(out / "bounds_per_l.csv", bounds)
    return paths
