"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

Criteria 2, 3, 4, 6, 7 and 8 share one serial sweep (scalar mode, 200 trials
per cell, P_T in {0, 15, 30} dBW, N in {2, 3}, RSI in {-10, -40} dB) during
which every SDP solve is independently re-checked.
"""

import math
import time

import numpy as np
import pytest

import fdrelay.maxmin as maxmin
from fdrelay.channel import NetworkConfig, sample_realization
from fdrelay.harness import RunConfig, run_sweep, write_report
from fdrelay.lift import build_lifted, matrix_to_w
from fdrelay.maxmin import bisection_bound, feasibility_problem, solve_maxmin
from fdrelay.oracle import brute_force
from fdrelay.sdp import FEASIBLE, INFEASIBLE, OPTIMAL, check_solution, solve_feasibility

from conftest import ACCEPTANCE

SEED = 2024
PT_GRID = (0.0, 15.0, 30.0)
PT_SET = 15.0  # grid point whose first 100 trials form the instance set
N_VALUES = (2, 3)
RSI_LEVELS = (-10.0, -40.0)
TOL = 1e-4
T_START = time.perf_counter()

pytestmark = pytest.mark.slow


def report(k, ok, detail):
    ACCEPTANCE.append(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE[-1])
    assert ok, detail


class Certifier:
    """Wraps the SDP entry points used by maxmin and re-checks every result."""

    def __init__(self):
        self.n_feas = self.n_opt = 0
        self.max_violation = 0.0
        self.min_eig = np.inf
        self.max_denominator = 0.0
        self.bad = []

    def _check(self, p, sol):
        rep = check_solution(sol.G, p.constraints, 1e-8, sol.aux_scalar)
        self.max_violation = max(self.max_violation, rep.max_violation)
        self.min_eig = min(self.min_eig, rep.min_eigenvalue)
        if rep.max_violation > 1e-6 or rep.min_eigenvalue < -1e-8:
            self.bad.append((rep.max_violation, rep.min_eigenvalue))

    def wrap_feasibility(self, inner):
        def f(p, *a, **kw):
            sol = inner(p, *a, **kw)
            if sol.status == FEASIBLE:
                self.n_feas += 1
                self._check(p, sol)
            return sol
        return f

    def wrap_linear(self, inner):
        def f(p, *a, **kw):
            sol = inner(p, *a, **kw)
            if sol.status == OPTIMAL:
                self.n_opt += 1
                self._check(p, sol)
                den = next(c for c in p.constraints if c.name == "denominator")
                self.max_denominator = max(self.max_denominator,
                                           abs(den.lhs(sol.G, sol.aux_scalar) - 1.0))
            return sol
        return f


@pytest.fixture(scope="module")
def certifier():
    cert = Certifier()
    mp = pytest.MonkeyPatch()
    mp.setattr(maxmin, "solve_feasibility", cert.wrap_feasibility(maxmin.solve_feasibility))
    mp.setattr(maxmin, "solve_linear", cert.wrap_linear(maxmin.solve_linear))
    yield cert
    mp.undo()


@pytest.fixture(scope="module")
def run_config():
    return RunConfig(base=NetworkConfig(seed=SEED, zfc_mode="scalar"), pt_grid_dbw=PT_GRID,
                     trials=200, rsi_levels_db=RSI_LEVELS, n_values=N_VALUES)


@pytest.fixture(scope="module")
def sweep(run_config, certifier):
    return run_sweep(run_config)


@pytest.fixture(scope="module")
def instance_set(sweep):
    """100 records per (N, RSI) at P_T = PT_SET."""
    return {(n, r): sweep.cell(n, r, PT_SET).records[:100]
            for n in N_VALUES for r in RSI_LEVELS}


def test_criterion_01_identities():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for k in range(200):
        n = N_VALUES[k % 2]
        cfg = NetworkConfig(n=n, total_power=float(rng.uniform(1, 1000)), seed=SEED + 1)
        ch = sample_realization(cfg, k)
        lp = build_lifted(cfg, ch)
        W = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        w = matrix_to_w(W)
        pairs = [(np.vdot(w, lp.C1 @ w).real, np.trace(W @ lp.L_R @ W.conj().T).real)]
        for i in (1, 2):
            f_ri, f_jr = ch.f_from_relay(i), ch.f_to_relay(3 - i)
            pairs.append((np.vdot(w, lp.H[i - 1] @ w).real, abs(f_ri.conj() @ W @ f_jr) ** 2))
            pairs.append((np.vdot(w, lp.F[i - 1] @ w).real,
                          np.linalg.norm(f_ri.conj() @ W) ** 2))
        for lifted, direct in pairs:
            worst = max(worst, abs(lifted - direct) / max(abs(direct), 1e-300))
    report(1, worst <= 1e-10, f"200 instances, worst relative deviation {worst:.2e} (tol 1e-10)")


def test_criterion_02_sandwich(instance_set):
    viol, total, failed = 0, 0, 0
    for recs in instance_set.values():
        for r in recs:
            total += 1
            if r.solver_failure:
                failed += 1
                continue
            if not (0 <= r.j_lower <= r.j_max <= r.j_up + 1e-6):
                viol += 1
    report(2, viol == 0 and failed == 0,
           f"{total} instances, {viol} sandwich violations, {failed} solver failures")


def test_criterion_03_tightness(instance_set):
    gaps, rank1_bad, rank1 = [], 0, 0
    for recs in instance_set.values():
        for r in recs:
            g = (r.j_max - r.j_lower) / max(r.j_max, 1e-12)
            gaps.append(g)
            if r.rank_ratio < 1e-6:
                rank1 += 1
                rank1_bad += g > 1e-4
    med = float(np.median(gaps))
    report(3, med <= 0.05 and rank1_bad == 0,
           f"median gap {med:.2e} (tol 0.05); {rank1} rank-one instances, "
           f"{rank1_bad} with gap > 1e-4; max gap {max(gaps):.2e}")


def test_criterion_04_bisection(instance_set, run_config):
    over = 0
    for recs in instance_set.values():
        for r in recs:
            bound = math.ceil(math.log2(r.j_up * 1e4)) + 1 if r.j_up >= TOL else 0
            assert bound == bisection_bound(r.j_up, TOL)
            over += r.iterations > bound
    # 5 instances with a nonzero relaxed optimum from each (N, RSI) set
    failures, checked = [], 0
    for (n, rsi), recs in instance_set.items():
        cfg = run_config.cell_config(n, rsi, PT_SET)
        picks = [r for r in recs if r.j_max > TOL][:5]
        for r in picks:
            lp = build_lifted(cfg, sample_realization(cfg, r.trial_index))
            lo = solve_feasibility(feasibility_problem(lp, r.j_max - TOL)).status
            hi = solve_feasibility(feasibility_problem(lp, r.j_max + 10 * TOL)).status
            checked += 1
            if lo != FEASIBLE or hi != INFEASIBLE:
                failures.append((n, rsi, r.trial_index, lo, hi))
    report(4, over == 0 and checked == 20 and not failures,
           f"{over} runs over the iteration bound; bracketing re-check "
           f"{checked - len(failures)}/{checked} passed")


def test_criterion_05_oracle(instance_set, run_config):
    rsi = -40.0
    cfg = run_config.cell_config(2, rsi, PT_SET)
    above, competitive = [], 0
    recs = instance_set[(2, rsi)][:20]
    for r in recs:
        lp = build_lifted(cfg, sample_realization(cfg, r.trial_index))
        j_bf = brute_force(lp, 10**5, seed=(SEED, r.trial_index)).j_bf
        if j_bf > r.j_max + 1e-6:
            above.append((r.trial_index, j_bf, r.j_max))
        competitive += r.j_lower >= 0.9 * j_bf
    frac = competitive / len(recs)
    report(5, not above and frac >= 0.8,
           f"20 N=2 instances x 1e5 samples: {len(above)} with j_bf > j_max + 1e-6; "
           f"j_lower >= 0.9 j_bf on {frac:.0%} (need 80%)")


def test_criterion_06_rsi_trend(sweep):
    bad = []
    for n in N_VALUES:
        for pt in PT_GRID:
            lo = sweep.cell(n, -10.0, pt).mean_rate_lower
            hi = sweep.cell(n, -40.0, pt).mean_rate_lower
            if not hi >= lo:
                bad.append((n, pt, hi, lo))
    report(6, not bad, f"{len(N_VALUES) * len(PT_GRID)} (N, P_T) points, "
           f"{len(bad)} with rate(-40 dB) < rate(-10 dB)")


def test_criterion_07_power_trend(sweep):
    bad = []
    for n in N_VALUES:
        for rsi in RSI_LEVELS:
            s = sweep.series(n, rsi)
            for a, b in zip(s, s[1:]):
                se = math.hypot(a.std_rate_upper / math.sqrt(a.trials - a.failures),
                                b.std_rate_upper / math.sqrt(b.trials - b.failures))
                if b.mean_rate_upper < a.mean_rate_upper - se:
                    bad.append((n, rsi, a.pt_dbw, b.pt_dbw))
    report(7, not bad, f"{len(bad)} adjacent P_T pairs with mean rate_upper decreasing "
           "by more than one standard error")


def test_criterion_08_certificates(sweep, certifier):
    # a strict-mode pass so that both solver paths are covered
    for n in N_VALUES:
        for t in range(10):
            cfg = NetworkConfig(n=n, total_power=100.0, zfc_mode="strict", seed=SEED)
            solve_maxmin(cfg, sample_realization(cfg, t))
    c = certifier
    ok = not c.bad and c.max_denominator <= 1e-8 and c.n_feas > 0 and c.n_opt > 0
    report(8, ok, f"{c.n_feas} feasible + {c.n_opt} optimal solves re-checked: max violation "
           f"{c.max_violation:.1e}, min eigenvalue {c.min_eig:.1e}, "
           f"max denominator residual {c.max_denominator:.1e}")


def test_criterion_09_determinism(tmp_path):
    rc = RunConfig(base=NetworkConfig(seed=SEED), pt_grid_dbw=(0.0, 20.0), trials=8,
                   rsi_levels_db=RSI_LEVELS, n_values=N_VALUES)
    a, _ = write_report(run_sweep(rc), tmp_path / "a.csv")
    b, _ = write_report(run_sweep(rc), tmp_path / "b.csv")
    same = a.read_bytes() == b.read_bytes()
    report(9, same, "repeated sweep CSVs byte-identical" if same else "CSV bytes differ")


def test_criterion_10_runtime():
    worst = {}
    for n in N_VALUES:
        cfg = NetworkConfig(n=n, total_power=1000.0, seed=SEED)
        for t in range(5):
            t0 = time.perf_counter()
            solve_maxmin(cfg, sample_realization(cfg, t))
            worst[n] = max(worst.get(n, 0.0), time.perf_counter() - t0)
    total = time.perf_counter() - T_START
    ok = worst[2] < 1.0 and worst[3] < 5.0 and total < 900
    report(10, ok, f"slowest N=2 solve {worst[2]:.2f} s (< 1 s), N=3 {worst[3]:.2f} s (< 5 s); "
           f"acceptance module {total:.0f} s (< 900 s)")
