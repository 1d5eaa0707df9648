# adaptive_lb/config.py
import os
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Adaptive Load Balancing Simulator"
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False

    # Experiment execution
    DEFAULT_SEEDS: int = 5
    BASE_SEED: int = 0
    MAX_WORKERS: Optional[int] = None  # None -> CPU count, 1 -> in-process

    # Selection rules
    DEFAULT_HISTORY_WEIGHT: float = 0.3  # bookkeeping weight for rules without w

    # Output
    OUTPUT_DIR: Path = Path("results")
    CSV_FLOAT_FORMAT: str = "%.3f"

    class Config:
        env_prefix = "ADAPTIVE_LB_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"  # Ignore extra fields from environment

    @property
    def workers(self) -> int:
        return self.MAX_WORKERS or os.cpu_count() or 1


settings = Settings()
