"""UL/DL interference asymmetry for UAV remote-controller links under a log-Gaussian Cox interferer field."""

__version__ = "0.1.0"

from .config import ConfigError, SystemConfig, load_config, parse_config  # noqa: E402
from .intensity import LgcpParams  # noqa: E402

__all__ = ["ConfigError", "LgcpParams", "SystemConfig", "load_config", "parse_config", "__version__"]
