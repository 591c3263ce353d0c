"""
A small Monte Carlo sweep over total power for both RSI levels, written as a
CSV report, then joined against another rate curve with ``merge_baseline``.

Any ``pt_dbw,mean_rate`` file works as the comparison curve; here the -10 dB
series of the same sweep stands in for one.
"""

import csv
import tempfile
from pathlib import Path

from fdrelay import NetworkConfig
from fdrelay.harness import RunConfig, merge_baseline, run_sweep, write_report

rc = RunConfig(base=NetworkConfig(seed=7), pt_grid_dbw=(0.0, 10.0, 20.0, 30.0), trials=30,
               rsi_levels_db=(-10.0, -40.0), n_values=(2,))
sr = run_sweep(rc)

out = Path(tempfile.mkdtemp()) / "sweep.csv"
write_report(sr, out)
print(out.read_text())

for rsi in rc.rsi_levels_db:
    s = sr.series(2, rsi)
    print(f"RSI {rsi:>5g} dB  rate_lower:", " ".join(f"{c.mean_rate_lower:.3f}" for c in s))

base = out.with_name("rsi_minus10.csv")
with open(base, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["pt_dbw", "mean_rate"])
    for c in sr.series(2, -10.0):
        w.writerow([c.pt_dbw, c.mean_rate_lower])

print("\n-40 dB minus -10 dB, per P_T:")
for r in merge_baseline(sr, base, n=2, rsi_db=-40.0):
    print(f"  {r.pt_dbw:>5g} dBW  delta = {r.delta:+.4f} bit  ({r.status})")
