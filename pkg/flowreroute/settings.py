import logging
import os
from typing import Optional

logger = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 10**7
DEFAULT_LOG_LEVEL = "WARNING"


class Settings():
    def __init__(self):
        ...

    def _positive(self, name: str, cast, default):
        raw = os.environ.get(name)
        if raw is None or raw == "":
            return default
        try:
            value = cast(raw)
        except ValueError:
            logger.warning("%s=%r is not a number, using %s", name, raw, default)
            return default
        if value <= 0:
            logger.warning("%s=%r must be positive, using %s", name, raw, default)
            return default
        return value

    def seed(self) -> Optional[int]:
        raw = os.environ.get("FLOWREROUTE_SEED")
        if raw is None or raw == "":
            return None
        try:
            return int(raw)
        except ValueError:
            logger.warning("FLOWREROUTE_SEED=%r is not an integer, keeping --seed", raw)
            return None

    def max_states(self) -> int:
        return self._positive("FLOWREROUTE_MAX_STATES", int, DEFAULT_MAX_STATES)

    def max_seconds(self) -> Optional[float]:
        return self._positive("FLOWREROUTE_MAX_SECONDS", float, None)

    def log_level(self) -> str:
        level = os.environ.get("FLOWREROUTE_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
        if not isinstance(logging.getLevelName(level), int):
            logger.warning("unknown FLOWREROUTE_LOG_LEVEL %r, using %s", level, DEFAULT_LOG_LEVEL)
            return DEFAULT_LOG_LEVEL
        return level

settings = Settings()
