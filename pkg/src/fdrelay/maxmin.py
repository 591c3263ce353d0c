"""
Max-min SINR relay beamforming by semidefinite relaxation.

Pipeline for one realization:

1. ``upper_bound``: the two single-user SINR maxima (Charnes-Cooper SDPs);
   the larger one brackets the search from above.
2. ``bisection``: feasibility SDPs on the common SINR target ``j``.
3. ``recover_beamformer``: rank-one extraction from the relaxed optimum
   ``G*`` (principal eigenvector, eigenvector combinations, Gaussian
   randomization), every candidate made zero-forcing and scaled to the
   relay power budget.

In strict zero-forcing mode all SDPs are posed directly on the null space of
``w -> (I ⊗ H_RR^H) w`` (``G = B Ĝ B^H``), which is equivalent to imposing
``Tr(Z G) = 0`` on a PSD ``G`` but keeps the reduced problem strictly
feasible.
"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import lift
from .channel import check_config, trial_rng
from .linalg import crandn, herm_eig, hermitian_part
from .sdp import (EQ, GE, LE, FEASIBLE, INFEASIBLE, NUMERICAL_FAILURE, OPTIMAL,
                  SdpProblem, TraceConstraint, solve_feasibility, solve_linear)

log = logging.getLogger(__name__)

# Charnes-Cooper scale variable lower bound (stands in for omega > 0).
OMEGA_MIN = 1e-10
# Scalar-mode ZFC acceptance: |w^H C2 w| <= ZF_REL * ||w||^2 * ||H_RR||_F.
ZF_REL = 1e-6
# Relative eigenvalue floor below which a direction of G* is ignored.
EIG_FLOOR = 1e-12


class SolverError(RuntimeError):
    """Both single-user bound SDPs failed."""


@dataclass
class Subspace:
    """Coordinates in which the SDPs are posed (full space or ZF null space)."""

    basis: np.ndarray = None  # (n_w, k) orthonormal columns, None = identity

    def reduce(self, M):
        if self.basis is None:
            return np.asarray(M)
        B = self.basis
        return hermitian_part(B.conj().T @ M @ B)

    def expand(self, G):
        if self.basis is None:
            return G
        B = self.basis
        return hermitian_part(B @ G @ B.conj().T)

    def dim(self, lp):
        return lp.n_w if self.basis is None else self.basis.shape[1]


def subspace_for(lp):
    if lp.zfc_mode == "strict":
        return Subspace(lp.zf_null_basis())
    return Subspace()


def _zfc_rows(lp, sub):
    if lp.zfc_mode == "strict":
        return []
    return [TraceConstraint(sub.reduce(lp.C2_herm), EQ, 0.0, name="zfc_re"),
            TraceConstraint(sub.reduce(lp.C2_skew), EQ, 0.0, name="zfc_im")]


def feasibility_problem(lp, j, sub=None):
    """The relaxed feasibility system at common SINR target ``j``."""
    sub = sub or subspace_for(lp)
    rows = []
    for i in (1, 2):
        M = lp.signal_matrix(i) - j * lp.noise_matrix(i)
        rows.append(TraceConstraint(sub.reduce(M), GE, j * lp.phi[i - 1],
                                    name=f"sinr_{i}"))
    rows.append(TraceConstraint(sub.reduce(lp.C1), LE, lp.P_R, name="power"))
    rows += _zfc_rows(lp, sub)
    return SdpProblem(dim=sub.dim(lp), constraints=rows)


def charnes_cooper_problem(lp, i, sub=None):
    """Single-user SINR maximization after the Charnes-Cooper change of variables.

    Variables ``Y ⪰ 0`` and ``omega >= OMEGA_MIN``::

        max  Tr(H_i Y)
        s.t. Tr(C1 Y) <= omega P_R,  ZFC rows on Y,
             Tr(F_i Y) + omega phi_i = 1
    """
    sub = sub or subspace_for(lp)
    rows = [TraceConstraint(sub.reduce(lp.C1), LE, 0.0, aux_coef=-lp.P_R, name="power"),
            *_zfc_rows(lp, sub),
            TraceConstraint(sub.reduce(lp.noise_matrix(i)), EQ, 1.0,
                            aux_coef=lp.phi[i - 1], name="denominator")]
    return SdpProblem(dim=sub.dim(lp), constraints=rows,
                      objective=sub.reduce(lp.signal_matrix(i)),
                      aux_lower=OMEGA_MIN)


@dataclass
class UpperBound:
    j_up: float
    j_1_star: float
    j_2_star: float
    solutions: tuple = ()
    flagged: bool = False

    def __iter__(self):
        return iter((self.j_up, self.j_1_star, self.j_2_star))


def upper_bound(lp, feas_tol=1e-8, backend=None):
    """Largest of the two single-user relaxed SINR maxima.

    A rank > 1 optimizer is accepted; it only loosens the bound.
    """
    sub = subspace_for(lp)
    values, sols = [], []
    for i in (1, 2):
        p = charnes_cooper_problem(lp, i, sub)
        sol = solve_linear(p, feas_tol, backend=backend)
        if sol.status != OPTIMAL:
            sol = solve_linear(p, feas_tol, backend=backend, relaxed=True)
        sols.append(sol)
        values.append(max(sol.objective_value, 0.0) if sol.status == OPTIMAL else None)
    if values[0] is None and values[1] is None:
        raise SolverError("both single-user bound SDPs failed")
    flagged = None in values
    if flagged:
        log.warning("one single-user bound SDP failed; using the other")
    j1, j2 = (v if v is not None else np.nan for v in values)
    j_up = float(np.nanmax([j1, j2]))
    return UpperBound(j_up, j1, j2, tuple(sols), flagged)


def certified_level(G, lp):
    """Common SINR level reached by ``G`` scaled onto the relay power budget."""
    pw = float(np.sum(lp.C1.T * G).real)
    if pw <= 0:
        return 0.0
    a = lp.P_R / pw
    level = np.inf
    for i in (1, 2):
        num = a * float(np.sum(lp.signal_matrix(i).T * G).real)
        den = a * float(np.sum(lp.noise_matrix(i).T * G).real) + lp.phi[i - 1]
        level = min(level, max(num, 0.0) / den)
    return float(level)


def bisection_bound(j_up, tol):
    """Maximum number of feasibility solves the bisection may take."""
    if j_up < tol:
        return 0
    return math.ceil(math.log2(j_up / tol)) + 1


@dataclass
class BisectionResult:
    j_max: float
    G_star: np.ndarray
    iterations: int
    j_low: float
    j_high: float
    statuses: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    G_star_reduced: np.ndarray = None

    def __iter__(self):
        return iter((self.j_max, self.G_star))


def bisection(lp, j_up, tol=1e-4, feas_tol=1e-8, backend=None):
    """Bisection on the common SINR target over ``[0, j_up]``.

    Invariant: the relaxed system is feasible at ``j_low`` (or ``j_low = 0``)
    and infeasible or untested at ``j_high``. A feasible solve also certifies
    the level its matrix reaches on the power boundary, which may move
    ``j_low`` past the midpoint. Stops when ``j_high - j_low < tol``.
    """
    if j_up < 0 or tol <= 0:
        raise ValueError("need j_up >= 0 and tol > 0")
    sub = subspace_for(lp)
    k = sub.dim(lp)
    j_low, j_high = 0.0, float(j_up)
    G_red = np.zeros((k, k), dtype=complex)
    statuses, warnings = [], []
    it = 0
    while j_high - j_low >= tol:
        j = 0.5 * (j_low + j_high)
        p = feasibility_problem(lp, j, sub)
        sol = solve_feasibility(p, feas_tol, backend=backend)
        if sol.status == NUMERICAL_FAILURE:
            sol = solve_feasibility(p, feas_tol, backend=backend, relaxed=True)
        it += 1
        statuses.append(sol.status)
        if sol.status == FEASIBLE:
            G_red = sol.G
            level = certified_level(sub.expand(sol.G), lp)
            j_low = max(j, min(level, j_high))
        else:
            if sol.status != INFEASIBLE:
                msg = f"numerical failure at j={j:.6g}; treated as infeasible"
                warnings.append(msg)
                log.warning(msg)
            j_high = j
    return BisectionResult(j_max=j_low, G_star=sub.expand(G_red), iterations=it,
                           j_low=j_low, j_high=j_high, statuses=statuses,
                           warnings=warnings, G_star_reduced=G_red)


def plane_zf_roots(a, b, lp):
    """Unit vectors in ``span(a, b)`` with ``w^H C2 w = 0`` exactly.

    With ``E`` an orthonormal basis of the plane and ``x`` a unit 2-vector,
    ``x^H Q x = (Tr Q + s . q) / 2`` where ``s`` is the Bloch vector of ``x``
    and ``q_k = Tr(Q sigma_k)``. The two real zero-forcing equations cut a
    line; its intersections with the unit sphere are the roots (0 or 2).
    """
    na = np.linalg.norm(a)
    if na == 0:
        return []
    e1 = a / na
    b = b - np.vdot(e1, b) * e1
    nb = np.linalg.norm(b)
    if nb <= 1e-12 * np.linalg.norm(a):
        return []
    E = np.column_stack([e1, b / nb])
    rows, rhs = [], []
    for Q in (lp.C2_herm, lp.C2_skew):
        Qr = E.conj().T @ Q @ E
        q = np.array([2 * Qr[0, 1].real, -2 * Qr[0, 1].imag, (Qr[0, 0] - Qr[1, 1]).real])
        rows.append(q)
        rhs.append(-(Qr[0, 0] + Qr[1, 1]).real)
    Aq = np.array(rows)
    nvec = np.cross(Aq[0], Aq[1])
    nn = np.linalg.norm(nvec)
    if nn <= 1e-14 * (np.linalg.norm(Aq) ** 2 + 1e-300):
        return []
    s0 = np.linalg.lstsq(Aq, np.array(rhs), rcond=None)[0]
    r2 = 1.0 - s0 @ s0
    if r2 < 0:
        return []
    out = []
    for sign in (1.0, -1.0):
        s = s0 + sign * math.sqrt(r2) * nvec / nn
        x1 = math.sqrt(max(0.5 * (1 + s[2]), 0.0))
        if x1 > 1e-8:
            x = np.array([x1, (s[0] + 1j * s[1]) / (2 * x1)])
        else:
            x = np.array([0.0, 1.0 + 0j])
        out.append(E @ x)
    return out


def zf_polish(w, lp, max_iter=20):
    """Gauss-Newton steps onto ``{w : w^H C2 w = 0}`` (minimum-norm updates).

    Returns the polished vector, or None when it does not converge to
    roundoff level.
    """
    scale = max(np.linalg.norm(lp.C2, 2), 1e-300)
    for _ in range(max_iter):
        g1 = 2.0 * (lp.C2_herm @ w)
        g2 = 2.0 * (lp.C2_skew @ w)
        q = np.vdot(w, lp.C2 @ w)
        if abs(q) <= 1e-14 * scale * np.vdot(w, w).real:
            return w
        J = np.array([[np.vdot(g1, g1).real, np.vdot(g1, g2).real],
                      [np.vdot(g2, g1).real, np.vdot(g2, g2).real]])
        try:
            c = np.linalg.solve(J, [q.real, q.imag])
        except np.linalg.LinAlgError:
            return None
        w = w - c[0] * g1 - c[1] * g2
    q = np.vdot(w, lp.C2 @ w)
    return w if abs(q) <= 1e-12 * scale * np.vdot(w, w).real else None


@dataclass
class Recovery:
    w: np.ndarray
    j_lower: float
    method: str
    candidates_tried: int = 0
    candidates_accepted: int = 0

    def __iter__(self):
        return iter((self.w, self.j_lower, self.method))


def _scale_to_power(ws, lp):
    pw = np.einsum("ki,ij,kj->k", ws.conj(), lp.C1, ws).real
    ok = pw > 0
    ws = ws[ok] * np.sqrt(lp.P_R / pw[ok])[:, None]
    return ws, ok


def recover_beamformer(G_star, lp, n_randomizations=200, rng=None):
    """Extract a feasible rank-one beamformer from the relaxed optimum.

    Candidates are the principal eigenvector of ``G_star`` and
    ``n_randomizations`` Gaussian vectors with covariance ``G_star``. In
    strict mode each is projected onto the zero-forcing null space. In scalar
    mode a candidate already meeting the ZF threshold is kept; otherwise it is
    replaced by the exact ZF roots in its plane with a partner vector (the
    second eigenvector for the principal one, the principal one for random
    draws). Survivors are scaled to the relay power budget and the best
    min-SINR wins.
    """
    rng = np.random.default_rng(rng)
    G_star = hermitian_part(np.asarray(G_star))
    n_w = lp.n_w
    lam, U = herm_eig(G_star)
    if not lam[0] > 0:
        return Recovery(np.zeros(n_w, dtype=complex), 0.0, "zero")
    keep = lam > EIG_FLOOR * lam[0]
    u1 = U[:, 0]
    u2 = U[:, 1] if keep.sum() > 1 else None

    samples = []
    if n_randomizations:
        root = U[:, keep] * np.sqrt(lam[keep])[None, :]
        z = crandn(rng, int(keep.sum()), n_randomizations)
        samples = list((root @ z).T)

    cands, tags = [], []
    if lp.zfc_mode == "strict":
        B = lp.zf_null_basis()
        proj = lambda v: B @ (B.conj().T @ v)  # noqa: E731
        cands.append(proj(u1))
        tags.append("principal")
        for s in samples:
            cands.append(proj(s))
            tags.append("randomized")
    else:
        def zf_ok(v):
            return lift.zfc_residual(v, lp, "scalar") <= lift.zfc_threshold(v, lp, "scalar", ZF_REL)

        if zf_ok(u1):
            cands.append(u1)
            tags.append("principal")
        elif u2 is not None:
            for r in plane_zf_roots(u1, u2, lp):
                cands.append(r)
                tags.append("eigen_combination")
        for s in samples:
            if zf_ok(s):
                cands.append(s)
                tags.append("randomized")
            else:
                for r in plane_zf_roots(u1, s, lp):
                    cands.append(r)
                    tags.append("randomized")
    tried = 1 + len(samples)

    accepted = []
    for v, t in zip(cands, tags):
        nv = np.linalg.norm(v)
        if nv == 0 or not np.all(np.isfinite(v)):
            continue
        v = v / nv
        if lp.zfc_mode == "scalar":
            v = zf_polish(v, lp)
            if v is None:
                continue
        if lift.zfc_residual(v, lp) <= lift.zfc_threshold(v, lp, rel=ZF_REL):
            accepted.append((v, t))
    if not accepted:
        w = _scale_to_power(u1[None, :], lp)[0][0]
        return Recovery(w, lift.min_sinr(w, lp), "recovery_degraded", tried, 0)
    W = np.array([v for v, _ in accepted])
    W, ok = _scale_to_power(W, lp)
    names = [t for (_, t), o in zip(accepted, ok) if o]
    vals = lift.min_sinr_batch(W, lp)
    best = int(np.argmax(vals))
    return Recovery(W[best], float(vals[best]), names[best], tried, len(names))


@dataclass
class MaxMinResult:
    j_up: float
    j_max: float
    j_lower: float
    w: np.ndarray
    G_star: np.ndarray
    rank_ratio: float
    per_user_sinr: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def rate_lower_bits(self):
        return float(np.log2(1.0 + self.j_lower))

    @property
    def rate_upper_bits(self):
        return float(np.log2(1.0 + self.j_max))

    @property
    def degraded(self):
        return self.diagnostics.get("recovery_method") == "recovery_degraded"

    def to_dict(self, include_arrays=True):
        d = {"j_up": self.j_up, "j_max": self.j_max, "j_lower": self.j_lower,
             "rate_upper_bits": self.rate_upper_bits,
             "rate_lower_bits": self.rate_lower_bits,
             "rank_ratio": self.rank_ratio,
             "per_user_sinr": list(self.per_user_sinr),
             "diagnostics": self.diagnostics}
        if include_arrays:
            d["w"] = {"re": self.w.real.tolist(), "im": self.w.imag.tolist()}
        return d


def solve_maxmin(cfg, ch, backend=None):
    """Upper bound, bisection and recovery for one realization.

    ``j_max`` is the best relaxed level with a feasibility certificate: the
    bisection's lower bracket, or the recovered beamformer's level when that
    is higher (a feasible rank-one point is feasible for the relaxation).
    """
    check_config(cfg)
    timings = {}
    t0 = time.perf_counter()
    lp = lift.build_lifted(cfg, ch)
    t1 = time.perf_counter()
    timings["lift"] = t1 - t0
    try:
        ub = upper_bound(lp, cfg.feas_tol, backend=backend)
    except SolverError as exc:
        raise SolverError(f"trial {ch.trial_index}: {exc}") from exc
    t2 = time.perf_counter()
    timings["upper_bound"] = t2 - t1
    bis = bisection(lp, ub.j_up, cfg.bisection_tol, cfg.feas_tol, backend=backend)
    t3 = time.perf_counter()
    timings["bisection"] = t3 - t2
    rng = trial_rng(cfg.seed, ch.trial_index, stream=1)
    rec = recover_beamformer(bis.G_star, lp, cfg.n_randomizations, rng=rng)
    timings["recovery"] = time.perf_counter() - t3

    j_max = bis.j_max
    if rec.method != "recovery_degraded":
        j_max = max(j_max, rec.j_lower)
    lam = np.linalg.eigvalsh(bis.G_star)[::-1]
    rank_ratio = float(lam[1] / lam[0]) if lam[0] > 0 else 0.0
    per_user = (lift.sinr(rec.w, lp, 1), lift.sinr(rec.w, lp, 2))
    diag = {
        "trial_index": ch.trial_index,
        "j_1_star": ub.j_1_star, "j_2_star": ub.j_2_star,
        "upper_bound_flagged": ub.flagged,
        "j_max_bisection": bis.j_max, "j_high": bis.j_high,
        "bisection_iterations": bis.iterations,
        "bisection_bound": bisection_bound(ub.j_up, cfg.bisection_tol),
        "solver_statuses": bis.statuses,
        "warnings": list(bis.warnings),
        "recovery_method": rec.method,
        "candidates_accepted": rec.candidates_accepted,
        "relay_power": lift.relay_power(rec.w, lp),
        "zfc_residual": lift.zfc_residual(rec.w, lp),
        "timings": timings,
    }
    return MaxMinResult(j_up=ub.j_up, j_max=float(j_max), j_lower=rec.j_lower,
                        w=rec.w, G_star=bis.G_star, rank_ratio=rank_ratio,
                        per_user_sinr=per_user, diagnostics=diag)
