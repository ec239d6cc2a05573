# utils/__init__.py

# Only import modules used by the sharing toolkit

from .config import EXIT_CODES, validate_config
from .logging_helper import attach_console, get_module_logger
from .rng import RandomSource, SeededRandom, SystemRandomSource, make_rng
from .storage import atomic_write_text, dump_canonical, read_json
