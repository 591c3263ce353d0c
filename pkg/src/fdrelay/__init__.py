"""Max-min rate balancing for full-duplex MIMO two-way relaying by SDR."""

__version__ = "0.1.0"

from .channel import (ChannelRealization, ConfigError, NetworkConfig,  # noqa: E402
                      sample_realization, validate_config)
from .lift import LiftedProblem, build_lifted, rate, relay_power, sinr, zfc_residual  # noqa: E402
from .maxmin import (MaxMinResult, bisection, recover_beamformer,  # noqa: E402
                     solve_maxmin, upper_bound)
from .oracle import OracleResult, brute_force  # noqa: E402

__all__ = [
    "ChannelRealization", "ConfigError", "NetworkConfig", "sample_realization",
    "validate_config", "LiftedProblem", "build_lifted", "rate", "relay_power",
    "sinr", "zfc_residual", "MaxMinResult", "bisection", "recover_beamformer",
    "solve_maxmin", "upper_bound", "OracleResult", "brute_force",
]
