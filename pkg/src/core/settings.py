"""
Runtime settings read from the environment.
"""

import os

DEBUG_ASSERT_ENV = "SKEWPAIR_DEBUG_ASSERT"
CONFIG_ENV = "SKEWPAIR_CONFIG"
DEFAULT_CONFIG_PATH = "config/skewpair_config.yaml"


def debug_assertions_enabled() -> bool:
    """True when per-step invariant checks are switched on."""
    return os.environ.get(DEBUG_ASSERT_ENV, "").strip().lower() in ("1", "true", "yes", "on")


def config_path() -> str:
    return os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_PATH)
