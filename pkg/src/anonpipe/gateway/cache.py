"""On-disk content-addressed store for model responses."""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path


class ResponseCache:
    """Maps request fingerprints to stored responses; safe under concurrent use.

    Keys are sha256 over (kind, template version, payload, provider id).
    Writes go through a temp file plus atomic rename.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @staticmethod
    def key(kind: str, template_version: str, payload: str, provider_id: str) -> str:
        material = "\x00".join((kind, template_version, payload, provider_id))
        return hashlib.sha256(material.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)["response"]

    def put(self, key: str, response: str) -> None:
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        with self._lock:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump({"response": response}, fh, ensure_ascii=False)
            tmp.replace(path)

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*.json"))
