"""
Command line entry point.

    fdrelay solve   [--config F] [--seed S] [--trial-index T] [--n N] [--pt-dbw P] ...
    fdrelay sweep   [--config F] [--seed S] [--trials K] [--out report.csv]
    fdrelay bench   [--config F] [--seed S] [--trials K] [--out bench.csv]
    fdrelay compare --report report.csv --baseline hd.csv [--n N] [--rsi-db R]

Exit status: 0 success, 2 invalid configuration, 3 degraded results.
"""

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from .channel import ConfigError, NetworkConfig, sample_realization
from .harness import (ReportFormatError, RunConfig, bench, merge_baseline, read_report,
                      run_sweep, write_report)
from .maxmin import SolverError, solve_maxmin

EXIT_OK, EXIT_INVALID, EXIT_DEGRADED = 0, 2, 3

_LIST_KEYS = {"pt_grid_dbw": float, "rsi_levels_db": float, "n_values": int}


def _coerce(key, text, template):
    text = text.strip()
    if key in _LIST_KEYS:
        return tuple(_LIST_KEYS[key](v) for v in text.strip("[]()").split(",") if v.strip())
    if isinstance(template, bool) or text.lower() in ("true", "false"):
        return text.lower() in ("1", "true", "yes", "on")
    if text.lower() in ("none", "null", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text.strip("\"'")


def load_config(path):
    """Read a JSON object or ``key = value`` lines into a flat dict."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    defaults = {**dataclasses.asdict(NetworkConfig()), **dataclasses.asdict(RunConfig())}
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, val, defaults[key])
    return out


def _run_config(args):
    d = load_config(args.config) if args.config else {}
    d.pop("base", None)
    rc = RunConfig.from_dict(d)
    base = {}
    if args.seed is not None:
        base["seed"] = args.seed
    if getattr(args, "mode", None):
        base["zfc_mode"] = args.mode
    if base:
        rc = dataclasses.replace(rc, base=dataclasses.replace(rc.base, **base))
    if getattr(args, "trials", None) is not None:
        rc = dataclasses.replace(rc, trials=args.trials)
    if getattr(args, "workers", None) is not None:
        rc = dataclasses.replace(rc, workers=args.workers)
    return rc


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


def cmd_solve(args):
    rc = _run_config(args)
    n = args.n if args.n is not None else rc.n_values[0]
    rsi = args.rsi_db if args.rsi_db is not None else rc.base.rsi_db
    if args.pt_dbw is not None:
        cfg = rc.cell_config(n, rsi, args.pt_dbw)
    else:
        cfg = dataclasses.replace(rc.base, n=n, rsi_db=rsi)
    ch = sample_realization(cfg, args.trial_index)
    res = solve_maxmin(cfg, ch)
    out = {"config": cfg.to_dict(), "total_power_dbw": 10 * math.log10(cfg.total_power),
           **res.to_dict()}
    print(json.dumps(out, indent=2, default=_json_default))
    return EXIT_DEGRADED if res.degraded else EXIT_OK


def cmd_sweep(args):
    rc = _run_config(args)
    out = args.out or rc.output_path or "sweep.csv"
    sr = run_sweep(rc)
    csv_path, side = write_report(sr, out)
    with open(csv_path) as fh:
        sys.stdout.write(fh.read())
    print(f"# wrote {csv_path} and {side}", file=sys.stderr)
    return EXIT_DEGRADED if sr.degraded else EXIT_OK


def cmd_bench(args):
    rc = _run_config(args)
    rows = bench(rc)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=["n", "stage", "count", "mean_s", "max_s"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_compare(args):
    sr = read_report(args.report)
    rows = merge_baseline(sr, args.baseline, n=args.n, rsi_db=args.rsi_db)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "rsi_db", "pt_dbw", "fd_rate_lower", "baseline_rate", "delta", "status"])
    for r in rows:
        w.writerow([r.n, r.rsi_db, r.pt_dbw, r.fd_rate_lower, r.baseline_rate, r.delta,
                    r.status])
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fdrelay", description=__doc__.split("\n")[1])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials=True):
        sp.add_argument("--config", help="JSON or key = value file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--mode", choices=["scalar", "strict"], help="zero-forcing mode")
        if trials:
            sp.add_argument("--trials", type=int)
            sp.add_argument("--workers", type=int)
        sp.add_argument("--out")

    sp = sub.add_parser("solve", help="solve one realization, print JSON")
    common(sp, trials=False)
    sp.add_argument("--trial-index", type=int, default=0)
    sp.add_argument("--n", type=int)
    sp.add_argument("--pt-dbw", type=float)
    sp.add_argument("--rsi-db", type=float)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="Monte Carlo sweep, write CSV + JSON sidecar")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bench", help="wall-clock per solve stage")
    common(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("compare", help="join a sweep report with a baseline CSV")
    sp.add_argument("--report", required=True)
    sp.add_argument("--baseline", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--rsi-db", type=float)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ReportFormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_DEGRADED


if __name__ == "__main__":
    sys.exit(main())
