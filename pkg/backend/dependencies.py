import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel

# Load environment variables
load_dotenv()

# Get the backend directory (where this file is located)
BACKEND_DIR = os.path.dirname(os.path.abspath(__file__))


class Settings(BaseModel):
    fixtures_dir: str
    field: int = 2
    event_tol: float = 1e-9
    grid_h_factor: float = 0.05
    log_level: str = "INFO"
    max_workers: int = 4


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Resolve analysis settings from the environment (.env honoured)."""
    return Settings(
        fixtures_dir=os.getenv("EVASION_FIXTURES", os.path.join(BACKEND_DIR, "fixtures")),
        field=int(os.getenv("EVASION_FIELD", "2")),
        event_tol=float(os.getenv("EVASION_EVENT_TOL", "1e-9")),
        grid_h_factor=float(os.getenv("EVASION_GRID_H_FACTOR", "0.05")),
        log_level=os.getenv("EVASION_LOG_LEVEL", "INFO"),
        max_workers=int(os.getenv("EVASION_MAX_WORKERS", "4")),
    )
