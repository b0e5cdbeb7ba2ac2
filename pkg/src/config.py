"""Process-level settings; the CLI fills them from flags or COLLECTIVE_DISCORD_* variables."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

ENV_PREFIX = "COLLECTIVE_DISCORD"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def env_var(name: str) -> str:
    return f"{ENV_PREFIX}_{name.upper()}"


class Settings(BaseModel):
    """Defaults that CLI flags and sweep configs may override."""

    model_config = ConfigDict(frozen=True)

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    json_logs: bool = False
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path("results")
