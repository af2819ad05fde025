"""Bundled fixtures plus an on-disk cache with a sha256 manifest."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..errors import DataGapError, InconsistencyError, ParseError
from ..numberfield import NumberField
from .formats import dump_json, field_from_json, newforms_from_json

CACHE_ENV = "FERMATCHECK_CACHE"


def bundled_root() -> Path:
    return Path(str(resources.files("fermatcheck") / "data"))


def default_cache_root() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "fermatcheck"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class FixtureStore:
    """Read-only bundled data under ``root`` and a writable cache under ``cache_root``.

    Cache layout: <cache_root>/<source>/<label>/<level>.json, with every write
    recorded in <cache_root>/manifest.json together with its hash.
    """

    def __init__(self, root: Path | None = None, cache_root: Path | None = None):
        self.root = Path(root) if root is not None else bundled_root()
        self.cache_root = Path(cache_root) if cache_root is not None else default_cache_root()

    # ------------------------------------------------------------ bundled
    def field_path(self, label: str) -> Path:
        return self.root / "fields" / f"{label}.json"

    def field_labels(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "fields").glob("*.json"))

    def field_blob(self, label: str) -> dict:
        path = self.field_path(label)
        if not path.exists():
            raise DataGapError(f"no field fixture for {label!r}")
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None

    def bundled_newforms_path(self, label: str) -> Path:
        return self.root / "newforms" / f"{label}.json"

    # ------------------------------------------------------------ cache
    @property
    def manifest_path(self) -> Path:
        return self.cache_root / "manifest.json"

    def manifest(self) -> dict:
        if not self.manifest_path.exists():
            return {}
        return json.loads(self.manifest_path.read_text())

    def cache_path(self, source: str, label: str, level: int | str) -> Path:
        return self.cache_root / source / label / f"{level}.json"

    def cache_put(self, source: str, label: str, level, blob: dict, schema: str) -> Path:
        path = self.cache_path(source, label, level)
        text = dump_json(blob)
        atomic_write(path, text)
        man = self.manifest()
        man[str(path.relative_to(self.cache_root))] = {
            "sha256": sha256_text(text),
            "fetched_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "schema": schema,
        }
        atomic_write(self.manifest_path, dump_json(man))
        return path

    def cache_get(self, source: str, label: str, level) -> dict | None:
        path = self.cache_path(source, label, level)
        if not path.exists():
            return None
        text = path.read_text()
        entry = self.manifest().get(str(path.relative_to(self.cache_root)))
        if entry is None:
            raise InconsistencyError(f"{path}: cached file missing from the manifest")
        if entry["sha256"] != sha256_text(text):
            raise InconsistencyError(f"{path}: content hash does not match the manifest")
        return json.loads(text)


@lru_cache(maxsize=None)
def _load_field_cached(root: str, label: str) -> NumberField:
    return field_from_json(FixtureStore(Path(root)).field_blob(label))


def load_field(label: str, store: FixtureStore | None = None) -> NumberField:
    """A verified NumberField from its descriptor file."""
    store = store or FixtureStore()
    return _load_field_cached(str(store.root), label)


def load_newforms(label: str, level_norm: int = 2, store: FixtureStore | None = None, offline: bool = True, client=None):
    """Newform records for (field, level): bundled data, then cache, then the network."""
    store = store or FixtureStore()
    path = store.bundled_newforms_path(label)
    if path.exists() and level_norm == 2:
        return newforms_from_json(json.loads(path.read_text()))
    cached = store.cache_get("lmfdb", label, level_norm)
    if cached is not None:
        return newforms_from_json(cached)
    if offline or client is None:
        raise DataGapError(f"no newform data for {label} at level norm {level_norm} (offline)")
    return client.fetch_newforms(label, level_norm, store)
