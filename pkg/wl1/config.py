import os
from pathlib import Path

from dotenv import load_dotenv


def _load_env():
    env_path = Path(__file__).resolve().parent.parent / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path)
    else:
        load_dotenv()


def _env_bool(name, default):
    return os.getenv(name, str(default)).strip().lower() in ("1", "true", "yes")


class Config:
    """Base configuration class"""

    _load_env()

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("LOG_DIR", "./logs")
    LOG_JSON = _env_bool("LOG_JSON", True)

    # Parallelism
    WORKERS = int(os.getenv("WL1_WORKERS", 1))

    # Exact RIC enumeration
    RIC_BUDGET = int(os.getenv("WL1_RIC_BUDGET", 2_000_000))
    RIC_BATCH = int(os.getenv("WL1_RIC_BATCH", 4096))

    # Solver defaults
    FEAS_TOL = float(os.getenv("WL1_FEAS_TOL", 1e-8))
    OPT_TOL = float(os.getenv("WL1_OPT_TOL", 1e-8))
    MAX_ITERS = int(os.getenv("WL1_MAX_ITERS", 50_000))

    # Artifacts
    OUTPUT_DIR = os.getenv("WL1_OUTPUT_DIR", "./results")

    # HTTP API
    JSON_SORT_KEYS = False


class DevelopmentConfig(Config):
    """Development configuration"""

    DEBUG = True
    ENV_NAME = "development"


class ProductionConfig(Config):
    """Production configuration"""

    DEBUG = False
    ENV_NAME = "production"


class TestingConfig(Config):
    """Testing configuration"""

    TESTING = True
    ENV_NAME = "testing"
    LOG_JSON = False


config = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
    "default": DevelopmentConfig,
}


def get_config(name=None):
    """Return the config class selected by name or WL1_ENV"""
    name = name or os.getenv("WL1_ENV", "default")
    return config.get(name, config["default"])


def get_workers():
    """Worker count, read at call time so WL1_WORKERS can be changed in-process"""
    try:
        workers = int(os.getenv("WL1_WORKERS", Config.WORKERS))
    except ValueError:
        workers = 1
    return max(1, workers)


def get_ric_budget():
    """Enumeration budget in supports"""
    return int(os.getenv("WL1_RIC_BUDGET", Config.RIC_BUDGET))


def get_ric_batch():
    """Supports evaluated per batched eigen-solve"""
    return max(1, int(os.getenv("WL1_RIC_BATCH", Config.RIC_BATCH)))
