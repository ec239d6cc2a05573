import logging
import os
import tempfile

# route per-module log files away from the repo before utils.config is imported
os.environ.setdefault("HSS_LOG_DIR", tempfile.mkdtemp(prefix="hss-logs-"))

import pytest  # noqa: E402

from utils.rng import make_rng  # noqa: E402


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture(autouse=True)
def detach_console_handlers():
    """The CLI mirrors loggers to the stderr of the test that ran it; drop those handlers."""
    yield
    for name in ["sharing"] + [n for n in logging.root.manager.loggerDict if n.startswith("sharing")]:
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            if getattr(handler, "_hss_console", False):
                logger.removeHandler(handler)


class FixedRandom:
    """Stub source: every randbelow returns `value`."""

    seed = None

    def __init__(self, value: int):
        self.value = value

    def token_bytes(self, n: int) -> bytes:
        return bytes(n)

    def randbelow(self, k: int) -> int:
        return self.value % k

    def spawn_seed(self) -> int:
        return self.value
