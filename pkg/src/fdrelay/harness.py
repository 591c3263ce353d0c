"""
Monte Carlo sweeps over total power, report files and baseline comparison.
"""

import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .channel import NetworkConfig, check_config, db_to_linear, sample_realization
from .lift import build_lifted
from .maxmin import SolverError, solve_maxmin
from .oracle import brute_force

log = logging.getLogger(__name__)

CSV_HEADER = ["n", "rsi_db", "pt_dbw", "mean_rate_upper", "mean_rate_lower",
              "mean_gap", "trials", "failures"]
STAGES = ("lift", "upper_bound", "bisection", "recovery")
DEGRADED_FRACTION = 0.10


class ReportFormatError(ValueError):
    pass


@dataclass
class RunConfig:
    """A sweep: every (n, rsi, P_T) cell runs ``trials`` realizations.

    Source and relay powers are fractions of P_T per cell (default split
    1/4, 1/4, 1/2).
    """

    base: NetworkConfig = field(default_factory=NetworkConfig)
    pt_grid_dbw: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 1000
    rsi_levels_db: tuple = (-10.0, -40.0)
    n_values: tuple = (2, 3)
    oracle_enabled: bool = False
    oracle_samples: int = 10_000
    p1_fraction: float = 0.25
    p2_fraction: float = 0.25
    relay_fraction: float = 0.5
    workers: int = 1
    keep_records: bool = True
    output_path: Optional[str] = None
    baseline_path: Optional[str] = None

    def validate(self):
        errs = []
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            errs.append("trials must be >= 1")
        for name in ("pt_grid_dbw", "rsi_levels_db", "n_values"):
            if len(getattr(self, name)) == 0:
                errs.append(f"{name} must be nonempty")
        if self.workers < 1:
            errs.append("workers must be >= 1")
        fr = (self.p1_fraction, self.p2_fraction, self.relay_fraction)
        if min(fr) <= 0 or sum(fr) > 1 + 1e-12:
            errs.append("power fractions must be positive and sum to at most 1")
        if errs:
            raise ValueError("; ".join(errs))
        for cfg in self.cell_configs():
            check_config(cfg)
        return self

    def cell_config(self, n, rsi_db, pt_dbw):
        pt = float(db_to_linear(pt_dbw))
        return dataclasses.replace(
            self.base, n=int(n), rsi_db=float(rsi_db), total_power=pt,
            p1=self.p1_fraction * pt, p2=self.p2_fraction * pt,
            relay_power=self.relay_fraction * pt)

    def cells(self):
        for n in self.n_values:
            for rsi in self.rsi_levels_db:
                for pt in self.pt_grid_dbw:
                    yield int(n), float(rsi), float(pt)

    def cell_configs(self):
        return [self.cell_config(*c) for c in self.cells()]

    def to_dict(self):
        d = dataclasses.asdict(self)
        for k in ("pt_grid_dbw", "rsi_levels_db", "n_values"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        base = d.pop("base", {}) or {}
        base_fields = {f.name for f in dataclasses.fields(NetworkConfig)}
        for k in list(d):
            if k in base_fields:
                base[k] = d.pop(k)
        for k in ("pt_grid_dbw", "rsi_levels_db", "n_values"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(base=NetworkConfig(**base), **d)

    def config_hash(self):
        d = self.to_dict()
        for k in ("output_path", "baseline_path", "workers", "keep_records"):
            d.pop(k, None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class TrialRecord:
    trial_index: int
    ok: bool
    j_up: float = math.nan
    j_max: float = math.nan
    j_lower: float = math.nan
    rank_ratio: float = math.nan
    iterations: int = 0
    iteration_bound: int = 0
    method: str = ""
    error: str = ""
    solver_failure: bool = False
    degraded: bool = False
    timings: dict = field(default_factory=dict)
    j_bf: float = math.nan

    @property
    def rate_upper(self):
        return math.log2(1 + self.j_max)

    @property
    def rate_lower(self):
        return math.log2(1 + self.j_lower)


def run_trial(cfg, trial_index, oracle_samples=0):
    """Solve one realization; failures are recorded, not raised."""
    ch = sample_realization(cfg, trial_index)
    try:
        res = solve_maxmin(cfg, ch)
    except (SolverError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return TrialRecord(trial_index, ok=False, error=str(exc), solver_failure=True)
    d = res.diagnostics
    solver_failure = bool(d["warnings"]) or d["upper_bound_flagged"]
    degraded = res.degraded
    rec = TrialRecord(
        trial_index, ok=not (solver_failure or degraded), j_up=res.j_up,
        j_max=res.j_max, j_lower=res.j_lower, rank_ratio=res.rank_ratio,
        iterations=d["bisection_iterations"], iteration_bound=d["bisection_bound"],
        method=d["recovery_method"], solver_failure=solver_failure,
        degraded=degraded, timings=dict(d["timings"]))
    if oracle_samples:
        lp = build_lifted(cfg, ch)
        rec.j_bf = brute_force(lp, oracle_samples, seed=(cfg.seed, trial_index)).j_bf
    return rec


def _run_trial_args(args):
    return run_trial(*args)


@dataclass
class CellResult:
    n: int
    rsi_db: float
    pt_dbw: float
    trials: int
    failures: int
    mean_rate_upper: float
    mean_rate_lower: float
    mean_gap: float
    solver_failures: int = 0
    degraded_recoveries: int = 0
    std_rate_upper: float = math.nan
    std_rate_lower: float = math.nan
    mean_iterations: float = math.nan
    wall_mean_s: float = math.nan
    wall_max_s: float = math.nan
    mean_j_bf: float = math.nan
    records: list = field(default_factory=list, repr=False)

    @property
    def key(self):
        return (self.n, self.rsi_db, self.pt_dbw)

    @property
    def degraded(self):
        return self.failures > DEGRADED_FRACTION * self.trials

    def csv_row(self):
        return [str(self.n), repr(self.rsi_db), repr(self.pt_dbw),
                repr(self.mean_rate_upper), repr(self.mean_rate_lower),
                repr(self.mean_gap), str(self.trials), str(self.failures)]


@dataclass
class SweepReport:
    cells: list
    seed: int
    config_hash: str
    version: str = __version__
    config: dict = field(default_factory=dict)

    @property
    def degraded(self):
        return any(c.degraded for c in self.cells)

    def cell(self, n, rsi_db, pt_dbw):
        for c in self.cells:
            if c.key == (n, float(rsi_db), float(pt_dbw)):
                return c
        raise KeyError((n, rsi_db, pt_dbw))

    def series(self, n, rsi_db):
        return sorted((c for c in self.cells if c.n == n and c.rsi_db == float(rsi_db)),
                      key=lambda c: c.pt_dbw)


def _aggregate(n, rsi, pt, records):
    good = [r for r in records if r.ok]
    up = np.array([r.rate_upper for r in good])
    lo = np.array([r.rate_lower for r in good])
    walls = np.array([sum(r.timings.values()) for r in records if r.timings])

    def mean(a):
        return float(np.mean(a)) if a.size else math.nan

    def std(a):
        return float(np.std(a, ddof=1)) if a.size > 1 else math.nan

    jbf = np.array([r.j_bf for r in good if not math.isnan(r.j_bf)])
    return CellResult(
        n=n, rsi_db=rsi, pt_dbw=pt, trials=len(records),
        failures=sum(not r.ok for r in records),
        mean_rate_upper=mean(up), mean_rate_lower=mean(lo), mean_gap=mean(up - lo),
        solver_failures=sum(r.solver_failure for r in records),
        degraded_recoveries=sum(r.degraded and not r.solver_failure for r in records),
        std_rate_upper=std(up), std_rate_lower=std(lo),
        mean_iterations=mean(np.array([r.iterations for r in good])),
        wall_mean_s=mean(walls), wall_max_s=float(walls.max()) if walls.size else math.nan,
        mean_j_bf=mean(jbf))


def run_sweep(rc):
    """Run every cell of ``rc``; per-trial seeds are ``(base.seed, trial)``."""
    rc.validate()
    cells = []
    pool = ProcessPoolExecutor(rc.workers) if rc.workers > 1 else None
    try:
        for n, rsi, pt in rc.cells():
            cfg = rc.cell_config(n, rsi, pt)
            osamp = rc.oracle_samples if rc.oracle_enabled else 0
            args = [(cfg, t, osamp) for t in range(rc.trials)]
            if pool is None:
                records = [run_trial(*a) for a in args]
            else:
                records = list(pool.map(_run_trial_args, args, chunksize=8))
            records.sort(key=lambda r: r.trial_index)
            cell = _aggregate(n, rsi, pt, records)
            if rc.keep_records:
                cell.records = records
            if cell.degraded:
                log.warning("cell n=%d rsi=%g pt=%g degraded: %d/%d failures",
                            n, rsi, pt, cell.failures, cell.trials)
            cells.append(cell)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepReport(cells=cells, seed=rc.base.seed, config_hash=rc.config_hash(),
                       config=rc.to_dict())


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def write_report(sr, path):
    """Write the CSV report and its JSON sidecar; returns both paths."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in sr.cells:
            w.writerow(c.csv_row())
    extra = [f.name for f in dataclasses.fields(CellResult)
             if f.name not in CSV_HEADER and f.name != "records"]
    side = {
        "version": sr.version,
        "seed": sr.seed,
        "config_hash": sr.config_hash,
        "config": sr.config,
        "degraded": sr.degraded,
        "cells": [{"n": c.n, "rsi_db": c.rsi_db, "pt_dbw": c.pt_dbw,
                   **{k: getattr(c, k) for k in extra}} for c in sr.cells],
    }
    spath = sidecar_path(path)
    spath.write_text(json.dumps(side, indent=2, sort_keys=True, allow_nan=True))
    return path, spath


def read_report(path):
    """Read a CSV report (and its sidecar when present)."""
    path = Path(path)
    cells = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ReportFormatError(f"{path}: line 1: header must be {','.join(CSV_HEADER)}")
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise ReportFormatError(
                f"{path}: line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            cells.append(CellResult(
                n=int(row[0]), rsi_db=float(row[1]), pt_dbw=float(row[2]),
                mean_rate_upper=float(row[3]), mean_rate_lower=float(row[4]),
                mean_gap=float(row[5]), trials=int(row[6]), failures=int(row[7])))
        except ValueError as exc:
            raise ReportFormatError(f"{path}: line {lineno}: {exc}") from exc
    seed, chash, version, config = None, "", __version__, {}
    spath = sidecar_path(path)
    if spath.exists():
        side = json.loads(spath.read_text())
        seed, chash = side.get("seed"), side.get("config_hash", "")
        version, config = side.get("version", version), side.get("config", {})
        by_key = {(s["n"], float(s["rsi_db"]), float(s["pt_dbw"])): s for s in side["cells"]}
        for c in cells:
            for k, v in by_key.get(c.key, {}).items():
                if k not in ("n", "rsi_db", "pt_dbw"):
                    setattr(c, k, v)
    return SweepReport(cells=cells, seed=seed, config_hash=chash, version=version,
                       config=config)


@dataclass
class ComparisonRow:
    n: int
    rsi_db: float
    pt_dbw: float
    fd_rate_lower: float
    baseline_rate: float
    delta: float
    status: str  # "matched" or "unmatched"


def read_baseline(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh, skipinitialspace=True)
        fields = [f.strip() for f in (reader.fieldnames or [])]
        if "pt_dbw" not in fields or "mean_rate" not in fields:
            raise ReportFormatError(f"{path}: baseline needs columns pt_dbw, mean_rate")
        out = {}
        for lineno, row in enumerate(reader, start=2):
            row = {k.strip(): v for k, v in row.items()}
            try:
                out[float(row["pt_dbw"])] = float(row["mean_rate"])
            except (TypeError, ValueError) as exc:
                raise ReportFormatError(f"{path}: line {lineno}: {exc}") from exc
    return out


def merge_baseline(sr, baseline, n=None, rsi_db=None, atol=1e-9):
    """Side-by-side FD lower-bound rate vs an external baseline per P_T point.

    ``baseline`` is a path to a ``pt_dbw,mean_rate`` CSV or a dict. Grid points
    present on one side only are reported as ``unmatched``, never
    interpolated. ``delta`` is FD minus baseline.
    """
    if not isinstance(baseline, dict):
        baseline = read_baseline(baseline)
    base_pts = sorted(baseline)
    series = sorted({(c.n, c.rsi_db) for c in sr.cells
                     if (n is None or c.n == n) and (rsi_db is None or c.rsi_db == rsi_db)})
    sr_pts = sorted({c.pt_dbw for c in sr.cells})

    def find(pt, pts):
        for p in pts:
            if abs(p - pt) <= atol:
                return p
        return None

    if not any(find(p, base_pts) is not None for p in sr_pts):
        raise ValueError(f"disjoint P_T grids: report {sr_pts} vs baseline {base_pts}")
    rows = []
    for sn, srsi in series:
        cells = sr.series(sn, srsi)
        for c in cells:
            bp = find(c.pt_dbw, base_pts)
            if bp is None:
                rows.append(ComparisonRow(sn, srsi, c.pt_dbw, c.mean_rate_lower,
                                          math.nan, math.nan, "unmatched"))
            else:
                b = baseline[bp]
                rows.append(ComparisonRow(sn, srsi, c.pt_dbw, c.mean_rate_lower, b,
                                          c.mean_rate_lower - b, "matched"))
        for bp in base_pts:
            if find(bp, [c.pt_dbw for c in cells]) is None:
                rows.append(ComparisonRow(sn, srsi, bp, math.nan, baseline[bp],
                                          math.nan, "unmatched"))
    return rows


def bench(rc):
    """Mean and max wall-clock per (n, stage) over the cells of ``rc``."""
    rc = dataclasses.replace(rc, oracle_enabled=False, keep_records=True)
    sr = run_sweep(rc)
    rows = []
    for n in rc.n_values:
        recs = [r for c in sr.cells if c.n == n for r in c.records if r.timings]
        for stage in STAGES:
            t = np.array([r.timings[stage] for r in recs])
            rows.append({"n": int(n), "stage": stage, "count": int(t.size),
                         "mean_s": float(t.mean()) if t.size else math.nan,
                         "max_s": float(t.max()) if t.size else math.nan})
    return rows


def timed_solve(cfg, trial_index=0):
    """Wall-clock of one full solve (seconds) and its result."""
    ch = sample_realization(cfg, trial_index)
    t0 = time.perf_counter()
    res = solve_maxmin(cfg, ch)
    return time.perf_counter() - t0, res
