"""
Vectorized (w-space) problem data for one channel realization.

The relay matrix ``W`` is represented by ``w = vec(W^H)`` (column-major), so
with ``X = W^H``:

* relay power       ``Tr(W L_R W^H)       = w^H (I ⊗ L_R) w``
* desired signal    ``|f_Ri^H W f_jR|^2   = w^H (f_Ri^* f_Ri^T ⊗ f_jR f_jR^H) w``
* relay noise gain  ``||f_Ri^H W||^2      = w^H (f_Ri^* f_Ri^T ⊗ I) w``
* zero forcing      ``W H_RR = 0  <=>  (I ⊗ H_RR^H) w = 0``
"""

from dataclasses import dataclass

import numpy as np

from .channel import check_config
from .linalg import ValidationError, kron, null_basis, quad_form, quad_forms, unvec


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LiftedProblem:
    """Hermitian data of the max-min problem in ``w``.

    ``H[i]``, ``F[i]`` are the unweighted signal and noise lifts of user
    ``i + 1``. The SINR of user ``i + 1`` is

        gain[i] * w^H H[i] w / (noise_gain * w^H F[i] w + phi[i])

    where ``gain[i]`` is the partner's transmit power and ``noise_gain`` is
    the relay noise variance (both 1 when source powers are excluded).
    """

    n: int
    H: tuple
    F: tuple
    C1: np.ndarray
    C2: np.ndarray
    C2_herm: np.ndarray
    C2_skew: np.ndarray
    Z: np.ndarray
    L_R: np.ndarray
    phi: tuple
    gain: tuple
    noise_gain: float
    P_R: float
    H_RR: np.ndarray
    zfc_mode: str = "scalar"

    @property
    def n_w(self):
        return self.n * self.n

    @property
    def hrr_norm(self):
        return float(np.linalg.norm(self.H_RR))

    def signal_matrix(self, i):
        """Weighted numerator matrix of user ``i`` (1 or 2)."""
        return self.gain[i - 1] * self.H[i - 1]

    def noise_matrix(self, i):
        """Weighted relay-noise matrix of user ``i`` (1 or 2)."""
        return self.noise_gain * self.F[i - 1]

    def zf_null_basis(self):
        """Orthonormal basis of ``{w : (I ⊗ H_RR^H) w = 0}``."""
        return null_basis(self.C2)


def relay_covariance(cfg, ch):
    """``L_R = p1 f_1R f_1R^H + p2 f_2R f_2R^H + sigma_R^2 I``."""
    n = ch.n
    return (cfg.p1 * np.outer(ch.f_1R, ch.f_1R.conj())
            + cfg.p2 * np.outer(ch.f_2R, ch.f_2R.conj())
            + cfg.sigma2_relay * np.eye(n))


def build_lifted(cfg, ch):
    check_config(cfg)
    n = cfg.n
    if ch.n != n or ch.H_RR.shape != (n, n):
        raise ValidationError(
            f"channel dimension {ch.n} does not match config n={n}")
    eye = np.eye(n)
    L_R = relay_covariance(cfg, ch)
    C1 = kron(eye, L_R)
    C2 = kron(eye, ch.H_RR.conj().T)
    C2_herm = 0.5 * (C2 + C2.conj().T)
    C2_skew = (C2 - C2.conj().T) / 2j
    Z = C2.conj().T @ C2

    H, F, phi = [], [], []
    for i in (1, 2):
        f_ri = ch.f_from_relay(i)
        f_jr = ch.f_to_relay(3 - i)
        outer_ri = np.outer(f_ri.conj(), f_ri)  # f_Ri^* f_Ri^T
        H.append(kron(outer_ri, np.outer(f_jr, f_jr.conj())))
        F.append(kron(outer_ri, eye))
        p_i = cfg.p1 if i == 1 else cfg.p2
        phi.append(float(p_i * abs(ch.f_self(i)) ** 2 + cfg.sigma2_user))

    if cfg.include_source_power:
        gain = (float(cfg.p2), float(cfg.p1))
        noise_gain = float(cfg.sigma2_relay)
    else:
        gain, noise_gain = (1.0, 1.0), 1.0

    return LiftedProblem(
        n=n, H=tuple(_frozen(h) for h in H), F=tuple(_frozen(f) for f in F),
        C1=_frozen(C1), C2=_frozen(C2), C2_herm=_frozen(C2_herm),
        C2_skew=_frozen(C2_skew), Z=_frozen(Z), L_R=_frozen(L_R),
        phi=tuple(phi), gain=gain, noise_gain=noise_gain,
        P_R=float(cfg.relay_power), H_RR=_frozen(ch.H_RR), zfc_mode=cfg.zfc_mode)


def w_to_matrix(w, n):
    """Relay matrix ``W`` from ``w = vec(W^H)``."""
    return unvec(w, n).conj().T


def matrix_to_w(W):
    return np.asarray(W).conj().T.reshape(-1, order="F")


def sinr(w, lp, i):
    """SINR of user ``i`` (1 or 2) for beamformer ``w``."""
    w = np.asarray(w).reshape(-1)
    num = quad_form(w, lp.signal_matrix(i)).real
    if num <= 0.0:
        return 0.0
    den = quad_form(w, lp.noise_matrix(i)).real + lp.phi[i - 1]
    return float(num / den)


def sinr_batch(ws, lp, i):
    """SINR of user ``i`` for every row of ``ws``."""
    num = np.maximum(quad_forms(ws, lp.signal_matrix(i)), 0.0)
    den = quad_forms(ws, lp.noise_matrix(i)) + lp.phi[i - 1]
    return num / den


def min_sinr_batch(ws, lp):
    return np.minimum(sinr_batch(ws, lp, 1), sinr_batch(ws, lp, 2))


def min_sinr(w, lp):
    return min(sinr(w, lp, 1), sinr(w, lp, 2))


def rate(w, lp, i):
    """Rate of user ``i`` in bits per channel use."""
    return float(np.log2(1.0 + sinr(w, lp, i)))


def relay_power(w, lp):
    return float(quad_form(w, lp.C1).real)


def zfc_residual(w, lp, mode=None):
    """Zero-forcing residual: ``|w^H C2 w|`` (scalar) or ``||C2 w||`` (strict)."""
    mode = lp.zfc_mode if mode is None else mode
    w = np.asarray(w).reshape(-1)
    if mode == "strict":
        return float(np.linalg.norm(lp.C2 @ w))
    if mode == "scalar":
        return abs(quad_form(w, lp.C2))
    raise ValidationError(f"unknown zfc mode {mode!r}")


def zfc_threshold(w, lp, mode=None, rel=1e-6):
    """Acceptance threshold for :func:`zfc_residual` at beamformer ``w``."""
    mode = lp.zfc_mode if mode is None else mode
    nw2 = float(np.vdot(w, w).real)
    if mode == "strict":
        return rel * np.sqrt(nw2) * max(lp.hrr_norm, 1e-300)
    return rel * nw2 * max(lp.hrr_norm, 1e-300)


def direct_sinr(W, cfg, ch, i):
    """SINR evaluated from the unvectorized relay matrix ``W``."""
    f_ri = ch.f_from_relay(i)
    f_jr = ch.f_to_relay(3 - i)
    p_i, p_j = (cfg.p1, cfg.p2) if i == 1 else (cfg.p2, cfg.p1)
    sig = abs(f_ri.conj() @ W @ f_jr) ** 2
    amp = np.linalg.norm(f_ri.conj() @ W) ** 2
    if cfg.include_source_power:
        sig, amp = p_j * sig, cfg.sigma2_relay * amp
    return float(sig / (amp + p_i * abs(ch.f_self(i)) ** 2 + cfg.sigma2_user))
