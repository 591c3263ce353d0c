"""
The relaxed optimum j_max is an upper bound on every feasible beamformer.
Blind random search approaches it from below; the recovered beamformer
usually sits on top of it.
"""

from fdrelay import NetworkConfig, sample_realization, solve_maxmin
from fdrelay.lift import build_lifted
from fdrelay.oracle import brute_force

cfg = NetworkConfig.from_total_power_dbw(15.0, n=2, seed=11)
print(f"{'trial':>5} {'j_max':>10} {'j_lower':>10} {'1e3 samples':>12} {'1e5 samples':>12}")
for t in range(8):
    ch = sample_realization(cfg, t)
    res = solve_maxmin(cfg, ch)
    lp = build_lifted(cfg, ch)
    small = brute_force(lp, 1_000, seed=t).j_bf
    large = brute_force(lp, 100_000, seed=t).j_bf
    print(f"{t:>5} {res.j_max:>10.5f} {res.j_lower:>10.5f} {small:>12.5f} {large:>12.5f}")
