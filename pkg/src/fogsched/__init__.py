"""Online utility-power efficient task scheduling for homogeneous fog networks."""

from .config import NetworkConfig, default_config, load_config, validate_config
from .scheduler import schedule_slot
from .simulation import run_simulation, sweep

__all__ = [
    "NetworkConfig",
    "default_config",
    "load_config",
    "run_simulation",
    "schedule_slot",
    "sweep",
    "validate_config",
]
__version__ = "0.1.0"
