"""On-disk persistence for whole-vector norm values.

File layout (JSON lines)::

    {"format": "schlumprecht-norm-cache", "version": 1}
    ["<rle key>", <value>]
    ...

The RLE key is :meth:`CanonicalForm.rle_key`.  Any defect in the file (bad
header, wrong version, malformed record, non-finite or negative value) makes
the whole file untrusted: it is ignored and nothing is loaded.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from pathlib import Path

from .vectors import CanonicalForm

log = logging.getLogger(__name__)

CACHE_FORMAT = "schlumprecht-norm-cache"
CACHE_VERSION = 1
CACHE_FILENAME = "norms.jsonl"
CACHE_ENV = "SCHLUMPRECHT_CACHE_DIR"


def cache_path(cache_dir: str | os.PathLike | None) -> Path | None:
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    return Path(cache_dir) / CACHE_FILENAME if cache_dir else None


def load_cache(path: str | os.PathLike) -> dict[str, float]:
    path = Path(path)
    if not path.exists():
        return {}
    records: dict[str, float] = {}
    try:
        with path.open(encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header != {"format": CACHE_FORMAT, "version": CACHE_VERSION}:
                raise ValueError(f"unexpected header {header!r}")
            for line in fh:
                if not line.strip():
                    continue
                key, value = json.loads(line)
                value = float(value)
                if not isinstance(key, str) or not math.isfinite(value) or value < 0:
                    raise ValueError(f"bad record {line.strip()!r}")
                CanonicalForm.from_rle_key(key)
                records[key] = value
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        log.warning("discarding corrupt norm cache %s: %s", path, exc)
        return {}
    return records


def save_cache(path: str | os.PathLike, records: dict[str, float]) -> None:
    """Write atomically: a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".norms-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"format": CACHE_FORMAT, "version": CACHE_VERSION}) + "\n")
            for key in sorted(records):
                fh.write(json.dumps([key, records[key]]) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
