from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List, Optional
from pathlib import Path
import os
from dotenv import load_dotenv
import logging

# Load environment variables from .env file if it exists
load_dotenv()

logging.basicConfig(
    level=os.getenv("LAMSH_LOG_LEVEL", "WARNING").upper(),
    format="%(levelname)s %(name)s %(message)s",
)
logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Shell settings, overridable through LAMSH_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="LAMSH_", case_sensitive=True)

    PROJECT_NAME: str = "lamsh"

    # Startup script
    RC: Optional[str] = None
    DEFAULT_RC: str = "~/.lamshrc"

    # Evaluation limits
    MAX_REDUCTION_DEPTH: int = 10000

    # REPL
    PROMPT: str = "λ> "
    CONTINUATION_PROMPT: str = ".. "
    HISTORY_FILE: str = "~/.lamsh_history"

    LOG_LEVEL: str = "WARNING"

    # External commands
    COMMAND_SEARCH_PATH: Optional[str] = None
    PROCESS_ADAPTER: str = "subprocess"
    PIPE_CHUNK_SIZE: int = 65536
    ENCODING: str = "utf-8"

    def __init__(self, **values):
        super().__init__(**values)
        # DEBUG: Log resolved settings (config.py:__init__)
        logger.debug(f"[CONFIG] RC: {self.RC or self.DEFAULT_RC}")
        logger.debug(f"[CONFIG] MAX_REDUCTION_DEPTH: {self.MAX_REDUCTION_DEPTH}")
        logger.debug(f"[CONFIG] PROCESS_ADAPTER: {self.PROCESS_ADAPTER}")

    @property
    def search_path(self) -> List[str]:
        """Directories searched for external commands."""
        raw = self.COMMAND_SEARCH_PATH
        if raw is None:
            raw = os.environ.get("PATH", "")
        return [entry for entry in raw.split(os.pathsep) if entry]

    @property
    def rc_path(self) -> Path:
        """Startup script location, explicit setting first."""
        return Path(self.RC or self.DEFAULT_RC).expanduser()


settings = Settings()
