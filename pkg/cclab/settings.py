"""Configuration settings for cclab."""

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Runtime knobs, read from CCLAB_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="CCLAB_", extra="ignore")

    threads: int = 0  # 0 = one worker per CPU
    nodes: int = 24
    samples: int = 200_000
    seed: int = 0
    mc_threshold: int = 256
    grid_step_deg: float = 0.25
    alpha_step: float = 0.01
    log_level: str = "INFO"


settings = Settings()

# Numerical defaults
DEFAULT_NODES = settings.nodes
DEFAULT_SAMPLES = settings.samples
DEFAULT_SEED = settings.seed
MC_THRESHOLD = settings.mc_threshold
DEFAULT_GRID_STEP_DEG = settings.grid_step_deg
DEFAULT_ALPHA_STEP = settings.alpha_step

MIN_NODES = 4
MIN_SAMPLES = 1000
MAX_METRIC_STEP_DEG = 0.5
MAX_NUMERICAL_STEP_DEG = 1.0
ALPHA_EPS = 1e-4
REFINE_TOL = 1e-4  # radians
UNIT_POWER_TOL = 1e-12
REGIME_RTOL = 1e-12
TOUCH_RTOL = 1e-9

# Elements per broadcast block inside the MI engine
BLOCK_ELEMENTS = 1 << 20

# Standard constellations accepted by name on the command line
STANDARD_CONSTELLATIONS = {
    "bpsk": ("PSK", 2),
    "psk2": ("PSK", 2),
    "qpsk": ("PSK", 4),
    "psk4": ("PSK", 4),
    "psk8": ("PSK", 8),
    "8psk": ("PSK", 8),
    "psk16": ("PSK", 16),
    "qam4": ("QAM", 4),
    "qam16": ("QAM", 16),
    "qam64": ("QAM", 64),
}


def validate_settings():
    """Validate that the configured values are usable."""
    problems = []
    if settings.threads < 0:
        problems.append("CCLAB_THREADS must be >= 0")
    if settings.nodes < MIN_NODES:
        problems.append(f"CCLAB_NODES must be >= {MIN_NODES}")
    if settings.samples < MIN_SAMPLES:
        problems.append(f"CCLAB_SAMPLES must be >= {MIN_SAMPLES}")
    if not 0 < settings.grid_step_deg <= MAX_NUMERICAL_STEP_DEG:
        problems.append(f"CCLAB_GRID_STEP_DEG must be in (0, {MAX_NUMERICAL_STEP_DEG}]")
    if not 0 < settings.alpha_step < 0.5:
        problems.append("CCLAB_ALPHA_STEP must be in (0, 0.5)")

    if problems:
        raise ValueError(f"Invalid configuration: {'; '.join(problems)}")
