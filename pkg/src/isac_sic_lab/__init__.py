"""Rate analysis for uplink NOMA integrated sensing and communications.

Closed-form sensing rates, Monte Carlo communication rates and outage, the
SR-CR region, and a CLI that writes CSV/SVG artifacts.
"""
__version__ = "0.1.0"

from .errors import ConfigError, NumericError, StatisticalError, StructuralError
from .model import C_SIC, FDSAC, S_SIC, SystemConfig, reference_config, validate_config

__all__ = [
    "__version__",
    "C_SIC",
    "S_SIC",
    "FDSAC",
    "SystemConfig",
    "reference_config",
    "validate_config",
    "ConfigError",
    "NumericError",
    "StatisticalError",
    "StructuralError",
]
