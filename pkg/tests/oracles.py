"""Independent reference computations used by the tests.

None of these route through the package's interior-point solver.
"""

import numpy as np
import scipy.linalg as sla
import scipy.optimize as so


def _whiten(lp, i, basis=None):
    S = lp.signal_matrix(i)
    B = lp.noise_matrix(i) + lp.phi[i - 1] / lp.P_R * lp.C1
    mats = [lp.C2_herm, lp.C2_skew]
    if basis is not None:
        S, B = (basis.conj().T @ M @ basis for M in (S, B))
        mats = []
    Li = np.linalg.inv(np.linalg.cholesky(B))
    return Li @ S @ Li.conj().T, [Li @ M @ Li.conj().T for M in mats]


def single_user_dual_scan(lp, i):
    """Relaxed single-user SINR maximum as a dual eigenvalue minimization.

    At the optimum the power budget is tight, so the Charnes-Cooper program
    reduces to ``max Tr(S V)`` over ``Tr(B V) = 1`` plus zero forcing, whose
    dual is ``min_nu lambda_max(B^-1/2 (S - nu . A) B^-1/2)``. Strict mode has
    no multipliers and the value is a generalized eigenvalue.
    """
    if lp.zfc_mode == "strict":
        S, _ = _whiten(lp, i, sla.null_space(lp.C2))
        return float(np.linalg.eigvalsh(S)[-1])
    S, (Ah, As) = _whiten(lp, i)

    def f(v):
        return max(np.linalg.eigvalsh(S - v[0] * Ah - v[1] * As)[-1], -1.0)

    best = np.inf
    for x0 in ([0, 0], [1, 0], [0, 1], [-1, -1]):
        r = so.minimize(f, x0, method="Nelder-Mead",
                        options=dict(xatol=1e-12, fatol=1e-14, maxiter=20000))
        best = min(best, r.fun)
    # only the zero matrix meets zero forcing: value 0 (dual unbounded below)
    return max(float(best), 0.0)


def single_user_random_search(lp, i, n_samples, seed=0):
    """Best single-user SINR over random null-space beamformers (strict mode)."""
    rng = np.random.default_rng(seed)
    basis = sla.null_space(lp.C2)
    k = basis.shape[1]
    best = 0.0
    for start in range(0, n_samples, 10000):
        m = min(10000, n_samples - start)
        x = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        W = x @ basis.T
        pw = np.einsum("ki,ij,kj->k", W.conj(), lp.C1, W).real
        W = W * np.sqrt(lp.P_R / pw)[:, None]
        num = np.einsum("ki,ij,kj->k", W.conj(), lp.signal_matrix(i), W).real
        den = np.einsum("ki,ij,kj->k", W.conj(), lp.noise_matrix(i), W).real + lp.phi[i - 1]
        best = max(best, float(np.max(num / den)))
    return best


def cvxpy_feasible(problem, solver="CVXOPT"):
    """Solve the feasibility system of an ``SdpProblem`` with cvxpy."""
    import cvxpy as cp

    G = cp.Variable((problem.dim, problem.dim), hermitian=True)
    cons = [G >> 0]
    for c in problem.constraints:
        lhs = cp.real(cp.trace(c.matrix @ G))
        cons.append({">=": lhs >= c.rhs, "<=": lhs <= c.rhs, "==": lhs == c.rhs}[c.relation])
    pr = cp.Problem(cp.Minimize(0), cons)
    pr.solve(solver=solver)
    return pr.status
