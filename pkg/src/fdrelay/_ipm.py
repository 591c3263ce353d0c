"""
Primal-dual interior-point method for small dense conic programs.

Solves

    min  <C, X> + cl.xl + cf.xf
    s.t. <A_k, X> + Al[k].xl + Af[k].xf = b_k,   k = 1..m
         X in S^d_+,  xl >= 0,  xf free

together with its dual

    max  b.y   s.t.  C - sum_k y_k A_k = Z in S^d_+,
                     cl - Al^T y = zl >= 0,  cf - Af^T y = 0

using infeasible-start Mehrotra predictor-corrector steps in the HKM
direction. Free variables enter through a bordered Schur complement system.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

OPTIMAL = "optimal"
INACCURATE = "inaccurate"
FAILED = "failed"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass
class ConicData:
    A: np.ndarray   # (m, d, d), symmetric slices
    b: np.ndarray   # (m,)
    C: np.ndarray   # (d, d)
    Al: np.ndarray  # (m, l)
    cl: np.ndarray  # (l,)
    Af: np.ndarray  # (m, f)
    cf: np.ndarray  # (f,)

    @property
    def shape(self):
        return self.A.shape[0], self.A.shape[1], self.Al.shape[1], self.Af.shape[1]


@dataclass
class ConicResult:
    status: str
    X: np.ndarray
    xl: np.ndarray
    xf: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    zl: np.ndarray
    pobj: float
    dobj: float
    pinf: float
    dinf: float
    gap: float
    iterations: int


def _max_step_psd(X, dX):
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = sla.solve_triangular(L, np.eye(X.shape[0]), lower=True, check_finite=False)
    S = Li @ dX @ Li.T
    lam = np.linalg.eigvalsh(0.5 * (S + S.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def solve_conic(data, tol=1e-10, max_iter=100, min_sigma=0.0, step_scale=1.0,
                blowup=1e12):
    """Run the interior-point method on ``data``.

    ``min_sigma`` and ``step_scale`` < 1 give a more conservative (better
    centred) trajectory, used when a default run fails.
    """
    A, b, C, Al, cl, Af, cf = (data.A, data.b, data.C, data.Al, data.cl,
                               data.Af, data.cf)
    m, d, nl, nf = data.shape
    eye = np.eye(d)
    normA = np.sqrt(np.einsum("kij,kij->k", A, A) + np.sum(Al**2, axis=1)
                    + np.sum(Af**2, axis=1))
    normb = np.linalg.norm(b)
    normc = np.sqrt(np.sum(C * C) + cl @ cl + cf @ cf)
    xi = max(10.0, np.sqrt(d), float(np.max((1 + np.abs(b)) / (1 + normA))))
    eta = max(10.0, np.sqrt(d), float(normA.max(initial=0.0)), normc)
    X, Z = xi * eye, eta * eye
    xl, zl = np.full(nl, xi), np.full(nl, eta)
    xf, y = np.zeros(nf), np.zeros(m)
    nu = d + nl
    status = FAILED
    pobj = dobj = pinf = dinf = gap = np.inf
    best = None
    it = 0

    for it in range(max_iter + 1):
        rp = b - np.einsum("kij,ij->k", A, X) - Al @ xl - Af @ xf
        Aty = np.tensordot(y, A, axes=1)
        Rd = C - Aty - Z
        rdl = cl - Al.T @ y - zl
        rdf = cf - Af.T @ y
        pobj = float(np.sum(C * X) + cl @ xl + cf @ xf)
        dobj = float(b @ y)
        mu = (np.sum(X * Z) + xl @ zl) / nu
        pinf = np.linalg.norm(rp) / (1 + normb)
        dinf = np.sqrt(np.sum(Rd * Rd) + rdl @ rdl + rdf @ rdf) / (1 + normc)
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        err = max(pinf, dinf, gap)
        if best is None or err < best[0]:
            best = (err, X, xl, xf, y, Z, zl, pobj, dobj, pinf, dinf, gap, it)
        if pinf < tol and dinf < tol and gap < tol:
            status = OPTIMAL
            break
        if it == max_iter:
            break
        if np.linalg.norm(X) + np.linalg.norm(xl) + np.linalg.norm(xf) > blowup:
            status = UNBOUNDED
            break
        if np.linalg.norm(y) > blowup:
            status = INFEASIBLE
            break

        try:
            Lz = np.linalg.cholesky(Z)
            Zinv = sla.cho_solve((Lz, True), eye, check_finite=False)
            AX = A @ X
            AZi = A @ Zinv
            M = np.einsum("kab,lba->kl", AX, AZi)
            if nl:
                M += (Al * (xl / zl)) @ Al.T
            K = np.zeros((m + nf, m + nf))
            K[:m, :m] = 0.5 * (M + M.T)
            K[:m, m:] = Af
            K[m:, :m] = Af.T
            lu = sla.lu_factor(K, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            break
        if not np.all(np.isfinite(lu[0])) or np.min(np.abs(np.diag(lu[0]))) == 0:
            break

        XRd = X @ Rd

        def direction(Rc, rcl):
            T = (Rc - XRd) @ Zinv
            h = np.einsum("kij,ij->k", A, T)
            if nl:
                h = h + Al @ ((rcl - xl * rdl) / zl)
            sol = sla.lu_solve(lu, np.concatenate([rp - h, rdf]), check_finite=False)
            dy, dxf = sol[:m], sol[m:]
            dZ = Rd - np.tensordot(dy, A, axes=1)
            dX = (Rc - X @ dZ) @ Zinv
            dX = 0.5 * (dX + dX.T)
            dzl = rdl - Al.T @ dy
            dxl = (rcl - xl * dzl) / zl
            return dX, dxl, dxf, dy, dZ, dzl

        XZ = X @ Z
        xz = xl * zl
        # predictor
        dXa, dxla, _, _, dZa, dzla = direction(-XZ, -xz)
        ap = min(1.0, _max_step_psd(X, dXa), _max_step_lp(xl, dxla))
        ad = min(1.0, _max_step_psd(Z, dZa), _max_step_lp(zl, dzla))
        mu_aff = (np.sum((X + ap * dXa) * (Z + ad * dZa))
                  + (xl + ap * dxla) @ (zl + ad * dzla)) / nu
        sigma = min(1.0, max(min_sigma, (max(mu_aff, 0.0) / mu) ** 3))
        # corrector
        Rc = sigma * mu * eye - XZ - dXa @ dZa
        rcl = sigma * mu - xz - dxla * dzla
        dX, dxl, dxf, dy, dZ, dzl = direction(Rc, rcl)
        ap = _max_step_psd(X, dX)
        ap = min(ap, _max_step_lp(xl, dxl))
        ad = min(_max_step_psd(Z, dZ), _max_step_lp(zl, dzl))
        gamma = step_scale * (0.9 + 0.09 * min(ap, ad, 1.0))
        ap = min(1.0, gamma * ap)
        ad = min(1.0, gamma * ad)
        if not (np.isfinite(ap) and np.isfinite(ad)) or max(ap, ad) < 1e-12:
            break
        X = X + ap * dX
        X = 0.5 * (X + X.T)
        xl = xl + ap * dxl
        xf = xf + ap * dxf
        y = y + ad * dy
        Z = Z + ad * dZ
        Z = 0.5 * (Z + Z.T)
        zl = zl + ad * dzl

    if status == OPTIMAL:
        return ConicResult(status, X, xl, xf, y, Z, zl, pobj, dobj, pinf, dinf, gap, it)
    if status in (UNBOUNDED, INFEASIBLE):
        return ConicResult(status, X, xl, xf, y, Z, zl, pobj, dobj, pinf, dinf, gap, it)
    err, X, xl, xf, y, Z, zl, pobj, dobj, pinf, dinf, gap, bit = best
    status = INACCURATE if err < 1e-6 else FAILED
    return ConicResult(status, X, xl, xf, y, Z, zl, pobj, dobj, pinf, dinf, gap, it)
