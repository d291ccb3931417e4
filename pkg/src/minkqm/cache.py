"""JSON result cache for moment computations.

Keys encode (method, L, the series/enumeration index, the truncation
setting, eps); values store the formatted decimal strings exactly as first
emitted, so a cache hit reproduces the original output byte for byte.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

ENV_CACHE = "MINKQM_CACHE"


def cache_key(method: str, L: int, index, trunc, eps) -> str:
    return f"{method}:L={L}:idx={index}:trunc={trunc}:eps={eps}"


class ResultCache:
    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path else None
        self._data: dict[str, dict] = {}
        if self.path and self.path.exists():
            self._data = json.loads(self.path.read_text())

    def get(self, key: str) -> dict | None:
        return self._data.get(key)

    def put(self, key: str, entry: dict):
        self._data[key] = entry
        self._save()

    def _save(self):
        if not self.path:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(self._data, fh, sort_keys=True, indent=1)
            os.replace(tmp, self.path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def resolve_cache_path(cli_value: str | None) -> str | None:
    if cli_value:
        return cli_value
    return os.environ.get(ENV_CACHE)
