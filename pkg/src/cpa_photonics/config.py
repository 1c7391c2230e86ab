"""Runtime configuration for cpa-photonics."""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RuntimeConfig:
    """Process-level settings read from the environment."""

    workers: int = 1
    log_level: str = "INFO"
    progress: bool = True

    @classmethod
    def from_env(cls, env_path: str = ".env") -> "RuntimeConfig":
        """Load configuration from environment variables.

        Args:
            env_path: Path to .env file

        Returns:
            RuntimeConfig instance

        Raises:
            ValueError: If a variable is set to a malformed value
        """
        load_dotenv(dotenv_path=env_path)

        workers = cls._get_int_env("CPA_WORKERS", 1)
        if workers < 1:
            raise ValueError(f"CPA_WORKERS must be >= 1, got {workers}")

        return cls(
            workers=workers,
            log_level=os.getenv("CPA_LOG_LEVEL", "INFO").upper(),
            progress=cls._get_bool_env("CPA_PROGRESS", True),
        )

    @staticmethod
    def _get_int_env(key: str, default: int) -> int:
        value = os.getenv(key)
        if value is None or value == "":
            return default
        try:
            return int(value)
        except ValueError:
            raise ValueError(
                f"Environment variable {key} must be an integer, got {value!r}"
            )

    @staticmethod
    def _get_bool_env(key: str, default: bool) -> bool:
        value = os.getenv(key)
        if value is None or value == "":
            return default
        lowered = value.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"Environment variable {key} must be a boolean, got {value!r}")
