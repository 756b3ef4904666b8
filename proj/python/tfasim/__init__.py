"""Python interface to the mmWave MIMO downlink association simulator.

Configurations and results are plain dicts mirroring the on-disk JSON schema
(`result.json`); see `default_config()` for the full set of keys.
"""

from ._tfasim import (
    __version__,
    default_config,
    emit_results,
    los_probability,
    oracle_check,
    path_loss_db,
    power_sweep,
    run_experiment,
)

__all__ = [
    "__version__",
    "default_config",
    "emit_results",
    "los_probability",
    "oracle_check",
    "path_loss_db",
    "power_sweep",
    "run_experiment",
]
