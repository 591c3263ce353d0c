"""
Blind random-search baseline for the max-min beamforming problem.

Every returned point is an actual beamformer (power budget met, zero forcing
satisfied), so its min-SINR can never exceed the relaxed optimum. Deliberately
shares no code with :mod:`fdrelay.maxmin`.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

CHUNK = 8192
SCREEN_REL = 1e-6


@dataclass
class OracleResult:
    j_bf: float
    w_bf: np.ndarray
    samples_used: int
    samples_discarded: int
    all_discarded: bool = False


def _draw(rng, k, n_w):
    # interleaved re/im so that a longer run extends a shorter one
    x = rng.standard_normal((k, n_w, 2))
    return (x[..., 0] + 1j * x[..., 1]) / np.sqrt(2.0)


def _newton_to_zero_set(W, C2, iters=30):
    """Batch Gauss-Newton projection onto ``{w : w^H C2 w = 0}``."""
    A = 0.5 * (C2 + C2.conj().T)
    B = (C2 - C2.conj().T) / 2j
    W = W.copy()
    for _ in range(iters):
        g1 = 2.0 * W @ A.T
        g2 = 2.0 * W @ B.T
        q = np.einsum("ki,ij,kj->k", W.conj(), C2, W)
        j11 = np.einsum("ki,ki->k", g1.conj(), g1).real
        j12 = np.einsum("ki,ki->k", g1.conj(), g2).real
        j22 = np.einsum("ki,ki->k", g2.conj(), g2).real
        det = j11 * j22 - j12 ** 2
        det = np.where(np.abs(det) > 0, det, np.inf)
        c1 = (j22 * q.real - j12 * q.imag) / det
        c2 = (-j12 * q.real + j11 * q.imag) / det
        W = W - c1[:, None] * g1 - c2[:, None] * g2
    return W


def _min_sinr(W, lp):
    out = None
    for i in (0, 1):
        num = lp.gain[i] * np.einsum("ki,ij,kj->k", W.conj(), lp.H[i], W).real
        den = (lp.noise_gain * np.einsum("ki,ij,kj->k", W.conj(), lp.F[i], W).real
               + lp.phi[i])
        s = np.maximum(num, 0.0) / den
        out = s if out is None else np.minimum(out, s)
    return out


def brute_force(lp, n_samples, seed=0, mode=None):
    """Best min-SINR over ``n_samples`` random feasible beamformers.

    Directions are isotropic complex Gaussian. Strict mode projects them onto
    the null space of ``I ⊗ H_RR^H``; scalar mode Newton-projects them onto
    the zero set of ``w^H C2 w`` and discards those that do not reach the
    screening threshold. Survivors are scaled onto the relay power budget.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    mode = lp.zfc_mode if mode is None else mode
    rng = np.random.default_rng(seed)
    n, n_w = lp.n, lp.n_w
    C2 = np.kron(np.eye(n), lp.H_RR.conj().T)
    hrr = np.linalg.norm(lp.H_RR)
    null = sla.null_space(C2, rcond=1e-10) if mode == "strict" else None
    best_val, best_w = -np.inf, np.zeros(n_w, dtype=complex)
    discarded = 0
    done = 0
    while done < n_samples:
        k = min(CHUNK, n_samples - done)
        W = _draw(rng, k, n_w)
        done += k
        if mode == "strict":
            W = (W @ null.conj()) @ null.T
            keep = np.linalg.norm(W, axis=1) > 0
        else:
            W = _newton_to_zero_set(W, C2)
            nrm2 = np.einsum("ki,ki->k", W.conj(), W).real
            q = np.abs(np.einsum("ki,ij,kj->k", W.conj(), C2, W))
            keep = np.isfinite(q) & (nrm2 > 0) & (q <= SCREEN_REL * nrm2 * hrr)
        discarded += int(np.sum(~keep))
        W = W[keep]
        if not len(W):
            continue
        pw = np.einsum("ki,ij,kj->k", W.conj(), lp.C1, W).real
        W = W * np.sqrt(lp.P_R / pw)[:, None]
        vals = _min_sinr(W, lp)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_w = float(vals[i]), W[i]
    if best_val == -np.inf:
        return OracleResult(0.0, best_w, n_samples, discarded, all_discarded=True)
    return OracleResult(best_val, best_w, n_samples, discarded)
