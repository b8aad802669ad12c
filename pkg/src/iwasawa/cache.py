"""Content-addressed result cache.

Entries live at ``<cache_dir>/<code_version>/<sha256>.json``.  They are
written to a temporary file and renamed into place, and never modified.
The cache is advisory: unreadable or corrupt entries are discarded and
recomputed, and IO failures only produce warnings.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from pathlib import Path

from . import __version__

CACHE_ENV = "IWASAWA_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.path.expanduser("~")) / ".cache" / "iwasawa-kit"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cache_key(job: dict) -> str:
    return hashlib.sha256(canonical(job).encode()).hexdigest()


def entry_path(key: str, cache_dir=None, version: str = __version__) -> Path:
    base = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return base / version / (key + ".json")


def _read(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            entry = json.load(fh)
        if not isinstance(entry, dict) or "payload" not in entry:
            raise ValueError("malformed entry")
        return entry
    except FileNotFoundError:
        return None
    except (OSError, ValueError) as exc:
        warnings.warn("discarding cache entry %s: %s" % (path, exc))
        try:
            path.unlink()
        except OSError:
            pass
        return None


def _write(path: Path, entry: dict):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(canonical(entry))
        os.replace(tmp, path)
    except OSError as exc:
        warnings.warn("could not write cache entry %s: %s" % (path, exc))


def cache_get_or_compute(job: dict, producer, cache_dir=None, version: str = __version__,
                         enabled: bool = True):
    """Return the cached payload for ``job``, computing and storing it if needed.

    ``producer()`` must return a JSON-serializable payload.
    """
    if not enabled:
        return producer()
    key = cache_key(job)
    path = entry_path(key, cache_dir, version)
    entry = _read(path)
    if entry is not None and entry.get("version") == version and entry.get("key") == key:
        return entry["payload"]
    payload = producer()
    # round-trip so that warm and cold results are identical objects
    payload = json.loads(canonical(payload))
    _write(path, {"key": key, "version": version, "job": job, "payload": payload})
    return payload
