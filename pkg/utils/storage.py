"""
JSON file helpers. Writes go through a temporary file in the target
directory followed by os.replace, so readers never see a half-written file.
"""

import json
import os
import tempfile

from .logging_helper import get_module_logger

logger = get_module_logger(__name__)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)

    fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info(f"💾 Wrote {path}")


def read_json(path: str):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dump_canonical(obj) -> str:
    """Stable text form: insertion-ordered keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"
