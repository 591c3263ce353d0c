"""
Network configuration and random channel realizations.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .linalg import crandn

ZFC_MODES = ("scalar", "strict")


class ConfigError(ValueError):
    """Raised when a :class:`NetworkConfig` violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one full-duplex two-way relay network.

    ``n`` is the number of relay antennas per side (the relay has ``2n``).
    Unset powers follow the default split: each source gets a quarter of
    ``total_power`` and the relay gets half.
    """

    n: int = 2
    total_power: float = 10.0
    p1: float = None
    p2: float = None
    relay_power: float = None
    sigma2_relay: float = 1.0
    sigma2_user: float = 1.0
    rsi_db: float = -40.0
    zfc_mode: str = "scalar"
    rsi_rank: int = 1
    bisection_tol: float = 1e-4
    feas_tol: float = 1e-8
    seed: int = 0
    # Scale the desired-signal term by the partner's transmit power and the
    # amplified relay noise by sigma2_relay. False drops both weights.
    include_source_power: bool = True
    n_randomizations: int = 200

    def __post_init__(self):
        if self.p1 is None:
            object.__setattr__(self, "p1", self.total_power / 4.0)
        if self.p2 is None:
            object.__setattr__(self, "p2", self.total_power / 4.0)
        if self.relay_power is None:
            object.__setattr__(self, "relay_power", self.total_power / 2.0)

    @property
    def m(self):
        return 2 * self.n

    @property
    def rsi_power(self):
        return float(db_to_linear(self.rsi_db))

    def replace(self, **changes):
        """Copy with changes; powers left at their defaults are re-derived."""
        if "total_power" in changes:
            for name in ("p1", "p2", "relay_power"):
                changes.setdefault(name, None)
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_total_power_dbw(cls, pt_dbw, **kwargs):
        return cls(total_power=float(db_to_linear(pt_dbw)), **kwargs)

    def to_dict(self):
        return dataclasses.asdict(self)


def validate_config(cfg):
    """Return the list of violated invariants (empty when ``cfg`` is valid)."""
    out = []
    if not isinstance(cfg.n, (int, np.integer)) or cfg.n < 2:
        out.append(f"M ≥ 4 required (relay antennas per side n={cfg.n} must be ≥ 2)")
    powers = {"total_power": cfg.total_power, "p1": cfg.p1, "p2": cfg.p2,
              "relay_power": cfg.relay_power}
    bad = [k for k, v in powers.items() if not (np.isfinite(v) and v > 0)]
    if bad:
        out.append(f"powers must be positive ({', '.join(bad)})")
    elif cfg.p1 + cfg.p2 + cfg.relay_power > cfg.total_power * (1 + 1e-12):
        out.append("p1 + p2 + relay_power must not exceed total_power")
    for name in ("sigma2_relay", "sigma2_user"):
        v = getattr(cfg, name)
        if not (np.isfinite(v) and v > 0):
            out.append(f"noise variance {name} must be positive")
    if not np.isfinite(cfg.rsi_db):
        out.append("rsi_db must be finite")
    if cfg.zfc_mode not in ZFC_MODES:
        out.append(f"zfc_mode must be one of {ZFC_MODES}")
    elif cfg.zfc_mode == "strict" and not (
            isinstance(cfg.rsi_rank, (int, np.integer)) and 1 <= cfg.rsi_rank <= cfg.n):
        out.append(f"strict mode requires 1 ≤ rsi_rank ≤ n (got {cfg.rsi_rank})")
    for name in ("bisection_tol", "feas_tol"):
        if not getattr(cfg, name) > 0:
            out.append(f"{name} must be positive")
    if cfg.n_randomizations < 0:
        out.append("n_randomizations must be non-negative")
    return out


def check_config(cfg):
    violations = validate_config(cfg)
    if violations:
        raise ConfigError(violations)
    return cfg


@dataclass(frozen=True)
class ChannelRealization:
    """All channel coefficients of one Monte Carlo draw."""

    f_1R: np.ndarray
    f_2R: np.ndarray
    f_R1: np.ndarray
    f_R2: np.ndarray
    H_RR: np.ndarray
    f_11: complex
    f_22: complex
    trial_index: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self):
        return self.f_1R.size

    def f_to_relay(self, i):
        return self.f_1R if i == 1 else self.f_2R

    def f_from_relay(self, i):
        return self.f_R1 if i == 1 else self.f_R2

    def f_self(self, i):
        return self.f_11 if i == 1 else self.f_22


def trial_rng(seed, trial_index, stream=0):
    """Generator keyed on ``(seed, trial_index)``; ``stream`` > 0 gives
    further independent streams for the same trial."""
    key = (int(trial_index),) if stream == 0 else (int(trial_index), int(stream))
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.default_rng(ss)


def sample_realization(cfg, trial_index):
    """Draw the channel realization for ``trial_index``.

    Link coefficients are CN(0, 1); relay and source RSI coefficients are
    CN(0, 10^(rsi_db/10)). The unit-variance draws are taken in a fixed order
    that does not depend on ``rsi_db``, so two configs differing only in RSI
    level share the same underlying randomness. In strict mode ``H_RR`` is a
    product of ``n x r`` and ``r x n`` Gaussian factors with the same mean
    entry power.
    """
    check_config(cfg)
    n = cfg.n
    rng = trial_rng(cfg.seed, trial_index)
    f_1R, f_2R, f_R1, f_R2 = (crandn(rng, n) for _ in range(4))
    f_11, f_22 = crandn(rng, 2)
    amp = np.sqrt(cfg.rsi_power)
    if cfg.zfc_mode == "strict":
        r = cfg.rsi_rank
        a = crandn(rng, n, r)
        b = crandn(rng, r, n)
        H_RR = amp / np.sqrt(r) * (a @ b)
    else:
        H_RR = amp * crandn(rng, n, n)
    return ChannelRealization(
        f_1R=f_1R, f_2R=f_2R, f_R1=f_R1, f_R2=f_R2, H_RR=H_RR,
        f_11=complex(amp * f_11), f_22=complex(amp * f_22),
        trial_index=int(trial_index))
