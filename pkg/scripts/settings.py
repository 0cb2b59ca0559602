import os
from pathlib import Path


class SettingsError(ValueError):
    """Raised when an environment override cannot be parsed"""
    pass


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise SettingsError(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise SettingsError(f"{name} must be positive, got {value}")
    return value


# Paths
SCRIPT_DIR = Path(__file__).parent.absolute()
ROOT_DIR = SCRIPT_DIR.parent
OUTPUT_DIR = ROOT_DIR / "output"

# Caps
ORDER_CAP = _int_from_env("MTCM_ORDER_CAP", 512)
WEIGHT_CAP = _int_from_env("MTCM_WEIGHT_CAP", 10**6)
G_DIM_CAP = 20  # 2^g types per datum
TABLE_CHECK_CAP = 64  # full homomorphism scans above this order are skipped

# Corpus
EXHAUSTIVE_ORDER_BOUND = 16

# Logging
LOG_LEVEL = os.environ.get("MTCM_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
