import logging
import os
from dataclasses import dataclass
from pathlib import Path

ROOT = Path(__file__).resolve().parents[3]


@dataclass(frozen=True)
class Settings:
    env: str = os.getenv("KBK_ENV", "dev")
    output_dir: str = os.getenv("KBK_OUTPUT_DIR", str(ROOT / "runs"))
    log_level: str = os.getenv("KBK_LOG_LEVEL", "INFO")
    batch_workers: int = int(os.getenv("KBK_BATCH_WORKERS", "1"))

settings = Settings()


def configure_logging(level: str | None = None) -> None:
    """Install one stream handler on the root logger (entry points only)."""
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
