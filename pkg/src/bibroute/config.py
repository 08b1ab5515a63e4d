"""Broker configuration: a small TOML file plus programmatic defaults."""
from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass
from pathlib import Path


@dataclass
class BrokerConfig:
    data_dir: Path = Path("data")
    registry_path: Path | None = None
    stoplist_path: Path | None = None
    host: str = "127.0.0.1"
    port: int = 8040
    admin_enabled: bool = True
    cache_ttl: float = 600.0
    search_timeout: float = 10.0
    static_dir: Path | None = None

    @classmethod
    def from_file(cls, path: Path | str) -> "BrokerConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        cfg = cls()
        if "data_dir" in raw:
            cfg.data_dir = Path(raw["data_dir"])
        if "registry" in raw:
            cfg.registry_path = Path(raw["registry"])
        if "stoplist" in raw:
            cfg.stoplist_path = Path(raw["stoplist"])
        cfg.host = raw.get("host", cfg.host)
        cfg.port = int(raw.get("port", cfg.port))
        cfg.admin_enabled = bool(raw.get("admin_enabled", cfg.admin_enabled))
        cfg.cache_ttl = float(raw.get("cache_ttl", cfg.cache_ttl))
        cfg.search_timeout = float(raw.get("search_timeout", cfg.search_timeout))
        if "static_dir" in raw:
            cfg.static_dir = Path(raw["static_dir"])
        return cfg
