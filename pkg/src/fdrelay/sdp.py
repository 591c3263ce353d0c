"""
Semidefinite programs over a Hermitian PSD matrix with trace constraints.

Problems are stated on complex Hermitian data and solved in real arithmetic
through :func:`fdrelay.linalg.embed_real`. Each constraint may also carry a
coefficient on one optional scalar variable bounded below (``aux``), which is
what the Charnes-Cooper form of the single-user bound needs.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _ipm
from .linalg import ValidationError, embed_real, hermitian_part, unembed_real

GE, LE, EQ = ">=", "<=", "=="
RELATIONS = (GE, LE, EQ)

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
NUMERICAL_FAILURE = "numerical_failure"

# Interior-point stopping tolerance (relative residuals and gap).
IPM_TOL = 1e-10
# a stalled solve_linear run is still accepted at this relative gap
LINEAR_GAP_TOL = 1e-8


class UnboundedError(ArithmeticError):
    """The objective is unbounded over the feasible set."""


@dataclass(frozen=True)
class TraceConstraint:
    """``Tr(matrix @ G) + aux_coef * aux  <relation>  rhs``."""

    matrix: np.ndarray
    relation: str
    rhs: float
    aux_coef: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValidationError(f"relation must be one of {RELATIONS}")
        if not np.isfinite(self.rhs):
            raise ValidationError("constraint rhs must be finite")

    def lhs(self, G, aux=0.0):
        return float(np.sum(self.matrix.T * G).real) + self.aux_coef * aux


@dataclass
class SdpProblem:
    """Hermitian SDP: optional linear objective and a list of trace constraints.

    ``aux_lower`` enables the scalar variable (``aux >= aux_lower``);
    ``aux_objective`` is its objective coefficient.
    """

    dim: int
    constraints: list
    objective: Optional[np.ndarray] = None
    aux_lower: Optional[float] = None
    aux_objective: float = 0.0

    def __post_init__(self):
        if not self.constraints:
            raise ValidationError("an SDP needs at least one constraint")
        for c in self.constraints:
            if np.shape(c.matrix) != (self.dim, self.dim):
                raise ValidationError(
                    f"constraint {c.name!r} has shape {np.shape(c.matrix)}, "
                    f"expected {(self.dim, self.dim)}")
            if c.aux_coef and self.aux_lower is None:
                raise ValidationError("aux_coef given but no aux variable")
        if self.objective is not None and np.shape(self.objective) != (self.dim, self.dim):
            raise ValidationError("objective dimension mismatch")

    @property
    def has_aux(self):
        return self.aux_lower is not None


@dataclass
class SdpSolution:
    status: str
    G: np.ndarray
    aux_scalar: float
    objective_value: float
    max_constraint_violation: float
    min_eigenvalue: float
    iterations: int
    slack: float = np.nan
    info: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status in (OPTIMAL, FEASIBLE)


@dataclass
class ViolationReport:
    """Recomputed constraint residuals of a candidate ``G``.

    ``violations[k]`` is positive by the amount constraint ``k`` is violated
    (absolute value for equalities); ``scaled`` divides by ``1 + |rhs|``.
    """

    violations: np.ndarray
    scaled: np.ndarray
    min_eigenvalue: float
    max_eigenvalue: float
    feas_tol: float

    @property
    def max_violation(self):
        return float(max(self.violations.max(initial=0.0), 0.0))

    @property
    def max_scaled_violation(self):
        return float(max(self.scaled.max(initial=0.0), 0.0))

    @property
    def psd_ok(self):
        return self.min_eigenvalue >= -self.feas_tol * (1.0 + abs(self.max_eigenvalue))

    def passes(self, factor=1.0):
        return self.max_scaled_violation <= factor * self.feas_tol and self.psd_ok


def check_solution(G, constraints, feas_tol, aux=0.0):
    """Recompute every constraint residual and the spectrum of ``G``."""
    G = np.asarray(G)
    viol, scaled = [], []
    for c in constraints:
        if c.matrix.shape != G.shape:
            raise ValidationError("constraint and G dimensions differ")
        lhs = c.lhs(G, aux)
        if c.relation == GE:
            v = c.rhs - lhs
        elif c.relation == LE:
            v = lhs - c.rhs
        else:
            v = abs(lhs - c.rhs)
        viol.append(v)
        scaled.append(v / (1.0 + abs(c.rhs)))
    lam = np.linalg.eigvalsh(hermitian_part(G))
    return ViolationReport(np.array(viol), np.array(scaled), float(lam[0]),
                           float(lam[-1]), feas_tol)


def _row_scale(c):
    s = np.linalg.norm(c.matrix) + abs(c.rhs) + abs(c.aux_coef)
    return s if s > 0 else 1.0


def _to_conic(p, slack):
    """Build real conic data.

    LP block: one slack per inequality, then (slack mode) the cap slack of
    ``t <= 1``, then the shifted aux variable. Free block: ``t`` in slack mode.
    """
    n = p.dim
    d = 2 * n
    ineq = [k for k, c in enumerate(p.constraints) if c.relation != EQ]
    m = len(p.constraints) + (1 if slack else 0)
    nl = len(ineq) + (1 if slack else 0) + (1 if p.has_aux else 0)
    nf = 1 if slack else 0
    A = np.zeros((m, d, d))
    b = np.zeros(m)
    Al = np.zeros((m, nl))
    Af = np.zeros((m, nf))
    lo = p.aux_lower if p.has_aux else 0.0
    aux_col = nl - 1
    scales = []
    for k, c in enumerate(p.constraints):
        s = _row_scale(c)
        scales.append(s)
        A[k] = 0.5 * embed_real(hermitian_part(c.matrix)) / s
        b[k] = (c.rhs - c.aux_coef * lo) / s
        if p.has_aux:
            Al[k, aux_col] = c.aux_coef / s
        if c.relation != EQ:
            j = ineq.index(k)
            sign = -1.0 if c.relation == GE else 1.0
            Al[k, j] = sign
            if slack:
                Af[k, 0] = sign
    C = np.zeros((d, d))
    cl = np.zeros(nl)
    cf = np.zeros(nf)
    if slack:
        Af[m - 1, 0] = 1.0
        Al[m - 1, len(ineq)] = 1.0
        b[m - 1] = 1.0
        cf[0] = -1.0
    else:
        if p.objective is not None:
            C = -0.5 * embed_real(hermitian_part(p.objective))
        if p.has_aux:
            cl[aux_col] = -p.aux_objective
    return _ipm.ConicData(A=A, b=b, C=C, Al=Al, cl=cl, Af=Af, cf=cf), np.array(scales)


def _unpack(p, res):
    G = unembed_real(res.X)
    aux = float(res.xl[-1] + p.aux_lower) if p.has_aux else 0.0
    return G, aux


class InteriorPointBackend:
    """Default backend: the bundled primal-dual interior-point method."""

    def __init__(self, tol=IPM_TOL, max_iter=100):
        self.tol = tol
        self.max_iter = max_iter

    def __call__(self, data, relaxed=False):
        if relaxed:
            return _ipm.solve_conic(data, tol=self.tol, max_iter=2 * self.max_iter,
                                    min_sigma=0.1, step_scale=0.9)
        return _ipm.solve_conic(data, tol=self.tol, max_iter=self.max_iter)


DEFAULT_BACKEND = InteriorPointBackend()


def solve_feasibility(p, feas_tol=1e-8, backend=None, relaxed=False):
    """Find ``G ⪰ 0`` meeting every constraint of ``p`` (objective ignored).

    Solved as a max-slack program: maximize ``t <= 1`` with each row,
    normalised by its data scale, shifted by ``t`` (``>=`` rows need
    ``t`` extra margin, ``<=`` rows give ``t`` up, equalities are exact).
    The ``slack`` field of the result is ``t*`` in raw constraint units
    (normalised ``t*`` times the largest inequality-row scale), so
    ``slack >= -feas_tol`` bounds every absolute row violation by ``feas_tol``.
    """
    backend = backend or DEFAULT_BACKEND
    data, scales = _to_conic(p, slack=True)
    res = backend(data, relaxed=relaxed)
    G, aux = _unpack(p, res)
    ineq = [s for s, c in zip(scales, p.constraints) if c.relation != EQ]
    t_norm = float(res.xf[0])
    t = t_norm * (max(ineq) if ineq else 1.0)
    rep = check_solution(G, p.constraints, feas_tol, aux)
    info = {"ipm_status": res.status, "pinf": res.pinf, "dinf": res.dinf,
            "gap": res.gap, "dual_bound": -res.dobj}
    if res.status == _ipm.OPTIMAL:
        if t >= -feas_tol and rep.passes(10.0):
            status = FEASIBLE
        elif t < 0:
            status = INFEASIBLE
        else:
            status = NUMERICAL_FAILURE
    elif res.status == _ipm.INACCURATE:
        # trust only a clear margin either way
        margin = 1e-6
        if t > margin and rep.passes(10.0):
            status = FEASIBLE
        elif -res.dobj < -margin and res.dinf < 1e-6:
            status = INFEASIBLE
        else:
            status = NUMERICAL_FAILURE
    else:
        status = NUMERICAL_FAILURE
    return SdpSolution(status=status, G=G, aux_scalar=aux, objective_value=t,
                       max_constraint_violation=rep.max_violation,
                       min_eigenvalue=rep.min_eigenvalue, iterations=res.iterations,
                       slack=t, info=info)


def solve_linear(p, feas_tol=1e-8, backend=None, relaxed=False):
    """Maximize ``Tr(objective @ G) + aux_objective * aux`` subject to ``p``.

    Raises
    ------
    UnboundedError
        If the iterates diverge with a primal-feasible trajectory.
    """
    if p.objective is None:
        raise ValidationError("solve_linear needs an objective")
    backend = backend or DEFAULT_BACKEND
    data, _ = _to_conic(p, slack=False)
    res = backend(data, relaxed=relaxed)
    if res.status == _ipm.UNBOUNDED:
        raise UnboundedError("SDP objective is unbounded")
    G, aux = _unpack(p, res)
    rep = check_solution(G, p.constraints, feas_tol, aux)
    value = float(np.sum(p.objective.T * G).real) + p.aux_objective * aux
    info = {"ipm_status": res.status, "pinf": res.pinf, "dinf": res.dinf,
            "gap": res.gap, "dual_value": -res.dobj}
    converged = res.status == _ipm.OPTIMAL or (
        res.status == _ipm.INACCURATE and max(res.gap, res.pinf, res.dinf) <= LINEAR_GAP_TOL)
    if converged and rep.passes(10.0):
        status = OPTIMAL
    else:
        status = NUMERICAL_FAILURE
    return SdpSolution(status=status, G=G, aux_scalar=aux, objective_value=value,
                       max_constraint_violation=rep.max_violation,
                       min_eigenvalue=rep.min_eigenvalue, iterations=res.iterations,
                       info=info)
