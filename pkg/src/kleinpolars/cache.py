"""On-disk cache for expensive, exactly serializable artifacts.

Entries are JSON files named by the sha256 of (operation, inputs, version);
each stores its payload's own hash so a damaged file is a miss, not a
wrong answer.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .certificate import canonical

log = logging.getLogger(__name__)

CACHE_ENV = "KLEINPOLARS_CACHE_DIR"
CACHE_VERSION = "1"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "kleinpolars"


@dataclass
class CacheEntry:
    key: str
    payload: dict
    version: str = CACHE_VERSION

    def payload_hash(self) -> str:
        return hashlib.sha256(canonical(self.payload).encode()).hexdigest()


def cache_key(operation: str, inputs: dict) -> str:
    body = canonical({"operation": operation, "inputs": inputs, "version": CACHE_VERSION})
    return hashlib.sha256(body.encode()).hexdigest()


class Cache:
    def __init__(self, root: Path | str | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = []

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, operation: str, inputs: dict) -> CacheEntry | None:
        if not self.enabled:
            return None
        key = cache_key(operation, inputs)
        path = self._path(key)
        if not path.exists():
            return None
        try:
            raw = json.loads(path.read_text())
            entry = CacheEntry(raw["key"], raw["payload"], raw["version"])
        except (OSError, ValueError, KeyError):
            log.warning("unreadable cache entry %s", path)
            return None
        if entry.key != key or entry.version != CACHE_VERSION or entry.payload_hash() != raw.get("sha256"):
            log.warning("stale or damaged cache entry %s", path)
            return None
        self.hits.append(operation)
        return entry

    def put(self, operation: str, inputs: dict, payload: dict) -> CacheEntry:
        entry = CacheEntry(cache_key(operation, inputs), payload)
        if not self.enabled:
            return entry
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self._path(entry.key).with_suffix(".tmp")
        tmp.write_text(json.dumps({"key": entry.key, "version": entry.version,
                                   "sha256": entry.payload_hash(), "payload": payload}))
        tmp.replace(self._path(entry.key))
        return entry
