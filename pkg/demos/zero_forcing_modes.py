"""
Scalar versus strict zero forcing.

The scalar condition w^H (I⊗H_RR^H) w = 0 only asks the relay to cancel its
self-interference on average over w; the strict one asks W H_RR = 0 and needs
a rank-deficient H_RR. A nonzero scalar-feasible w exists exactly when 0 lies
in the numerical range of H_RR^H, which fails often for small N.
"""

import numpy as np

from fdrelay import NetworkConfig, sample_realization, solve_maxmin


def zero_in_numerical_range(H, grid=720):
    # 0 ∉ W(H) iff some rotation e^{iθ}H has a definite Hermitian part
    for th in np.linspace(0, 2 * np.pi, grid, endpoint=False):
        A = np.exp(1j * th) * H
        if np.linalg.eigvalsh(0.5 * (A + A.conj().T))[0] > 0:
            return False
    return True


for n in (2, 3):
    cfg = NetworkConfig.from_total_power_dbw(20.0, n=n, seed=5)
    zero, inside = 0, 0
    for t in range(40):
        ch = sample_realization(cfg, t)
        r = solve_maxmin(cfg, ch)
        zero += r.j_max < 1e-9
        inside += zero_in_numerical_range(ch.H_RR.conj().T)
    print(f"scalar mode, N={n}: {zero}/40 draws give j_max = 0; "
          f"0 is in the numerical range for {inside}/40")

for rank in (1, 2):
    cfg = NetworkConfig.from_total_power_dbw(20.0, n=3, zfc_mode="strict", rsi_rank=rank,
                                             seed=5)
    js = [solve_maxmin(cfg, sample_realization(cfg, t)) for t in range(10)]
    print(f"strict mode, N=3, rank(H_RR)={rank}: mean j_max = "
          f"{np.mean([r.j_max for r in js]):.3f}, max rank ratio "
          f"{max(r.rank_ratio for r in js):.1e}")
