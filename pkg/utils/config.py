import hashlib
import logging
import os
from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()

# Local directories
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
LOG_DIR = os.getenv("HSS_LOG_DIR", os.path.join(BASE_DIR, "logs"))
LOG_LEVEL = os.getenv("HSS_LOG_LEVEL", "INFO").upper()

# Hash used by the sharing scheme (any fixed-digest hashlib algorithm)
DEFAULT_HASH = os.getenv("HSS_HASH", "sha256")

# Worker pools
SETUP_WORKERS = int(os.getenv("HSS_SETUP_WORKERS", "1"))    # threads hashing M_priv
SEARCH_WORKERS = int(os.getenv("HSS_SEARCH_WORKERS", "1"))  # processes for demo searches

# Search budgets are BUDGET_FACTOR times the expected cost
BUDGET_FACTOR = int(os.getenv("HSS_BUDGET_FACTOR", "64"))

# Builders enumerate subsets exhaustively, so n is capped
MAX_PARTICIPANTS = int(os.getenv("HSS_MAX_PARTICIPANTS", "20"))

# Herding demo
DEMO_BLOCK_BITS = 64
DEMO_MIN_WIDTH = 8
DEMO_MAX_WIDTH = 32

# Commitments hash COMMITMENT_PREFIX || share, never the bare share
COMMITMENT_PREFIX = b"\x02"

# Control-area version ceiling
MAX_VERSION = 2**31 - 1

# CLI exit codes
EXIT_CODES = {
    "ok": 0,
    "verify_failed": 1,
    "usage": 2,
    "secret_length": 3,
    "io": 4,
    "unauthorized": 5,
    "version": 6,
    "malformed": 7,
    "no_commitments": 8,
    "budget": 9,
    "version_overflow": 10,
}


def validate_config():
    """Validate the loaded configuration, returning a list of problems."""
    problems = []

    try:
        if hashlib.new(DEFAULT_HASH).digest_size == 0:
            problems.append(f"HSS_HASH={DEFAULT_HASH} has no fixed digest size")
    except ValueError:
        problems.append(f"HSS_HASH={DEFAULT_HASH} is not a hashlib algorithm")

    if SETUP_WORKERS < 1:
        problems.append(f"HSS_SETUP_WORKERS must be >= 1, got {SETUP_WORKERS}")
    if SEARCH_WORKERS < 1:
        problems.append(f"HSS_SEARCH_WORKERS must be >= 1, got {SEARCH_WORKERS}")
    if BUDGET_FACTOR < 1:
        problems.append(f"HSS_BUDGET_FACTOR must be >= 1, got {BUDGET_FACTOR}")
    if not isinstance(logging.getLevelName(LOG_LEVEL), int):
        problems.append(f"HSS_LOG_LEVEL={LOG_LEVEL} is not a logging level")

    for problem in problems:
        logging.getLogger(__name__).warning(f"⚠️  {problem}")
    return problems
